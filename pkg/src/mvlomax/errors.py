"""Exception hierarchy shared across the package.

The CLI maps these classes onto process exit codes (config errors 2, model
domain errors 3, numerical non-convergence 4), so library code is expected to
raise the most specific class that applies rather than bare ValueError.
"""

from __future__ import annotations


class ModelError(Exception):
    """Base class for every error raised by this package."""


class InputValidationError(ModelError, ValueError):
    """Malformed or out-of-domain input.

    Examples: non-0/1 exposure entries, a coordinate index out of range, a
    quantile level outside [0, 1), a hypergeometric argument outside the
    supported domain.
    """


class InfiniteMomentError(ModelError, ArithmeticError):
    """A requested moment does not exist for the given tail indices.

    Raised instead of returning an infinite float: moment nonexistence is a
    model fact, not a numerical accident, and callers must be able to tell
    the two apart.
    """


class NonConvergenceError(ModelError, FloatingPointError):
    """A series or iteration failed to reach its tolerance within the term cap."""
