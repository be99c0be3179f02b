"""Command-line front door: configs in, CSV out.

Configs are line-oriented text. Each nonempty line is `key value...` with
whitespace-separated tokens; lines starting with '#' are comments. Keys:

    name NAME                 scenario name (used in output file names)
    matrix E1 ... E(n+1)      one 0/1 exposure row per line, repeated n times
    preset KIND N             alternative to matrix lines (arnold,
                              independent, flexible_I, flexible_II,
                              nested_common)
    sigma S1 ... Sn           per-coordinate scales
    gamma G1 ... G(n+1)       factor shapes
    grid Q1 Q2 ...            quantile levels in [0, 1), may be empty
    mc M SEED                 Monte Carlo sample count and seed (M=0 off)

A sweep config instead varies the factor shape while holding a fixed
default probability over a horizon, recalibrating the scale each time:

    sweep CASE1 CASE2 ...     named 3-line patterns: case1, case2, case3,
                              independent
    mu M1 M2 ...              factor shape values to sweep
    default_prob P            per-coordinate default probability in (0, 1)
    horizon T                 horizon the probability refers to

Subcommands: describe (portfolio summary), eval (survival, density, and
conditional values at points), risk (VaR/CTE table), simulate (Monte Carlo
vs closed forms), calibrate (scale from a default probability), scenario
(write the full CSV bundle to --out-dir). A config argument may be a file
path or one of the bundled names: case1, case2, case3, independent,
musweep.

All numbers are printed with 10 significant digits and fixed row order, so
outputs are byte-identical across runs for a fixed (config, seed). Exit
codes: 0 success, 2 config or usage error, 3 model domain error (bad input
or nonexistent moment), 4 numeric non-convergence.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .dist import (conditional_ddf_eq, conditional_ddf_gt, correlation,
                   covariance, joint_ddf, joint_pdf, marginal_mean,
                   marginal_var)
from .errors import (InfiniteMomentError, InputValidationError,
                     NonConvergenceError)
from .portfolio import ExposurePortfolio, build_portfolio, pair_decomposition
from .portfolio import preset as build_preset
from .risk import (QuantileGrid, cte_marginal, cte_maxima, cte_minima,
                   economic_cte, risk_report, var_extreme, var_marginal)
from .sim import mc_estimate, sample_background_risk, sample_common_shock

BUNDLED_CONFIGS = ("case1", "case2", "case3", "independent", "musweep")

_SWEEP_PATTERNS = {
    "case1": ((1, 1, 0, 0), (1, 1, 0, 0), (1, 1, 0, 0)),
    "case2": ((1, 1, 0, 0), (1, 0, 1, 0), (1, 0, 0, 1)),
    "case3": ((1, 1, 0, 0), (1, 1, 0, 0), (1, 0, 1, 0)),
    "independent": ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0)),
}

_SAMPLERS = {
    "background-risk": sample_background_risk,
    "common-shock": sample_common_shock,
}


class ConfigError(Exception):
    """Malformed or unreadable configuration; maps to exit code 2."""


@dataclass(frozen=True)
class ScenarioConfig:
    """Parsed scenario: either a portfolio with grid and MC settings, or a
    shape sweep recalibrated against a fixed default probability."""

    name: str
    portfolio: ExposurePortfolio | None
    grid: QuantileGrid
    mc_samples: int
    mc_seed: int
    sweep_cases: tuple[str, ...] = ()
    sweep_mu: tuple[float, ...] = ()
    default_prob: float | None = None
    horizon: float | None = None

    @property
    def is_sweep(self) -> bool:
        return bool(self.sweep_cases)


def _fmt(x) -> str:
    return format(float(x), ".10g")


def _fail(origin: str, lineno: int, msg: str):
    raise ConfigError(f"{origin}:{lineno}: {msg}")


def _parse_floats(args, origin, lineno, key):
    try:
        return tuple(float(a) for a in args)
    except ValueError:
        _fail(origin, lineno, f"{key} expects numbers, got {' '.join(args)!r}")


def _parse_config_text(text: str, origin: str) -> ScenarioConfig:
    matrix_rows: list[tuple[int, ...]] = []
    scalars: dict[str, tuple[int, tuple[str, ...]]] = {}
    known_once = ("name", "preset", "sigma", "gamma", "grid", "mc", "sweep",
                  "mu", "default_prob", "horizon")
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        key, args = parts[0], tuple(parts[1:])
        if key == "matrix":
            try:
                matrix_rows.append(tuple(int(a) for a in args))
            except ValueError:
                _fail(origin, lineno,
                      f"matrix entries must be integers, got {' '.join(args)!r}")
        elif key in known_once:
            if key in scalars:
                _fail(origin, lineno, f"duplicate key {key!r} "
                      f"(first seen on line {scalars[key][0]})")
            scalars[key] = (lineno, args)
        else:
            _fail(origin, lineno, f"unknown key {key!r}")

    if "name" not in scalars:
        raise ConfigError(f"{origin}: missing required key 'name'")
    lineno, args = scalars["name"]
    if len(args) != 1:
        _fail(origin, lineno, "name expects exactly one token")
    name = args[0]
    if not all(ch.isalnum() or ch in "_.-" for ch in name):
        _fail(origin, lineno,
              f"name {name!r} may only use letters, digits, '_', '.', '-'")

    if "grid" in scalars:
        lineno, args = scalars["grid"]
        try:
            grid = QuantileGrid.of(
                _parse_floats(args, origin, lineno, "grid"))
        except InputValidationError as exc:
            _fail(origin, lineno, str(exc))
    else:
        grid = QuantileGrid.default()

    sweep_keys = [k for k in ("sweep", "mu", "default_prob", "horizon")
                  if k in scalars]
    if sweep_keys:
        missing = [k for k in ("sweep", "mu", "default_prob", "horizon")
                   if k not in scalars]
        if missing:
            raise ConfigError(
                f"{origin}: sweep configs need all of sweep/mu/default_prob/"
                f"horizon; missing {', '.join(missing)}")
        clash = [k for k in ("preset", "sigma", "gamma", "mc")
                 if k in scalars] + (["matrix"] if matrix_rows else [])
        if clash:
            raise ConfigError(
                f"{origin}: sweep configs cannot also set "
                f"{', '.join(sorted(set(clash)))}")
        lineno, args = scalars["sweep"]
        for case in args:
            if case not in _SWEEP_PATTERNS:
                _fail(origin, lineno, f"unknown sweep case {case!r}; "
                      f"choose from {', '.join(sorted(_SWEEP_PATTERNS))}")
        if not args:
            _fail(origin, lineno, "sweep expects at least one case")
        cases = args
        lineno, args = scalars["mu"]
        mus = _parse_floats(args, origin, lineno, "mu")
        if not mus:
            _fail(origin, lineno, "mu expects at least one value")
        for v in mus:
            if not (math.isfinite(v) and v > 0.0):
                _fail(origin, lineno, f"mu values must be positive, got {v}")
        lineno, args = scalars["default_prob"]
        if len(args) != 1:
            _fail(origin, lineno, "default_prob expects one number")
        (p_def,) = _parse_floats(args, origin, lineno, "default_prob")
        if not 0.0 < p_def < 1.0:
            _fail(origin, lineno,
                  f"default_prob must lie in (0, 1), got {p_def}")
        lineno, args = scalars["horizon"]
        if len(args) != 1:
            _fail(origin, lineno, "horizon expects one number")
        (horizon,) = _parse_floats(args, origin, lineno, "horizon")
        if not (math.isfinite(horizon) and horizon > 0.0):
            _fail(origin, lineno, f"horizon must be positive, got {horizon}")
        return ScenarioConfig(name=name, portfolio=None, grid=grid,
                              mc_samples=0, mc_seed=0, sweep_cases=cases,
                              sweep_mu=mus, default_prob=p_def,
                              horizon=horizon)

    for key in ("sigma", "gamma"):
        if key not in scalars:
            raise ConfigError(f"{origin}: missing required key {key!r}")
    if matrix_rows and "preset" in scalars:
        raise ConfigError(
            f"{origin}: give either matrix lines or a preset, not both")
    if not matrix_rows and "preset" not in scalars:
        raise ConfigError(
            f"{origin}: portfolio shape missing; add matrix lines or a "
            f"preset")
    lineno, args = scalars["sigma"]
    sigma = _parse_floats(args, origin, lineno, "sigma")
    lineno, args = scalars["gamma"]
    gamma = _parse_floats(args, origin, lineno, "gamma")
    try:
        if matrix_rows:
            portfolio = build_portfolio(matrix_rows, sigma, gamma)
        else:
            lineno, args = scalars["preset"]
            if len(args) != 2:
                _fail(origin, lineno, "preset expects KIND and N")
            try:
                n = int(args[1])
            except ValueError:
                _fail(origin, lineno,
                      f"preset dimension must be an integer, got {args[1]!r}")
            portfolio = build_preset(args[0], n, sigma, gamma)
    except InputValidationError as exc:
        raise ConfigError(f"{origin}: {exc}") from exc

    mc_samples, mc_seed = 0, 0
    if "mc" in scalars:
        lineno, args = scalars["mc"]
        if len(args) != 2:
            _fail(origin, lineno, "mc expects M and SEED")
        try:
            mc_samples, mc_seed = int(args[0]), int(args[1])
        except ValueError:
            _fail(origin, lineno,
                  f"mc expects integers, got {' '.join(args)!r}")
        if mc_samples < 0 or mc_seed < 0:
            _fail(origin, lineno, "mc values must be nonnegative")
    return ScenarioConfig(name=name, portfolio=portfolio, grid=grid,
                          mc_samples=mc_samples, mc_seed=mc_seed)


def parse_config(path) -> ScenarioConfig:
    """Parse a scenario config file; diagnostics carry path:line."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc}") from exc
    return _parse_config_text(text, str(p))


def _load_config(token: str) -> ScenarioConfig:
    path = Path(token)
    if path.exists():
        return parse_config(path)
    if token in BUNDLED_CONFIGS:
        res = resources.files("mvlomax").joinpath("configs")
        text = res.joinpath(f"{token}.cfg").read_text()
        return _parse_config_text(text, f"bundled:{token}")
    raise ConfigError(
        f"no such config file or bundled scenario: {token!r}; bundled "
        f"names are {', '.join(BUNDLED_CONFIGS)}")


def calibrate_sigma(p_default: float, horizon: float,
                    gamma_star: float) -> float:
    """Scale that puts default probability p_default at the horizon for a
    Pareto-II margin with the given tail index; verified by round trip."""
    p_default = float(p_default)
    horizon = float(horizon)
    gamma_star = float(gamma_star)
    if not (math.isfinite(p_default) and 0.0 < p_default < 1.0):
        raise InputValidationError(
            f"default probability must lie in (0, 1), got {p_default}")
    if not (math.isfinite(horizon) and horizon > 0.0):
        raise InputValidationError(
            f"horizon must be a positive real, got {horizon}")
    if not (math.isfinite(gamma_star) and gamma_star > 0.0):
        raise InputValidationError(
            f"tail index must be a positive real, got {gamma_star}")
    sigma = horizon / math.expm1(-math.log1p(-p_default) / gamma_star)
    back = -math.expm1(-gamma_star * math.log1p(horizon / sigma))
    if abs(back - p_default) > 1e-12:
        raise NonConvergenceError(
            f"calibration round trip failed: recovered default probability "
            f"{back!r} vs requested {p_default!r}")
    return sigma


def _require_portfolio(cfg: ScenarioConfig) -> ExposurePortfolio:
    if cfg.portfolio is None:
        raise ConfigError(
            f"config {cfg.name!r} defines a parameter sweep; only the "
            f"scenario subcommand can run it")
    return cfg.portfolio


def _grid_override(cfg: ScenarioConfig, arg: str | None) -> QuantileGrid:
    if arg is None:
        return cfg.grid
    tokens = [t for t in arg.split(",") if t.strip()]
    try:
        return QuantileGrid.of(float(t) for t in tokens)
    except (ValueError, InputValidationError) as exc:
        raise ConfigError(f"bad --grid value {arg!r}: {exc}") from exc


def _default_targets(p: ExposurePortfolio):
    targets = [("marginal", i) for i in range(1, p.n + 1)]
    targets.append(tuple(range(1, p.n + 1)))
    targets.append("maxima")
    return targets


def _parse_target(tok: str):
    t = tok.strip().lower()
    if t in ("maxima", "minima"):
        return t
    if t.startswith("marginal:"):
        try:
            return ("marginal", int(t.split(":", 1)[1]))
        except ValueError:
            raise ConfigError(f"bad target {tok!r}: coordinate must be an "
                              f"integer") from None
    if t.startswith("minima:"):
        try:
            return tuple(int(s) for s in t.split(":", 1)[1].split("+"))
        except ValueError:
            raise ConfigError(f"bad target {tok!r}: subset must look like "
                              f"minima:1+2") from None
    raise ConfigError(
        f"bad target {tok!r}; use marginal:I, minima, minima:I+J, or maxima")


def _risk_rows(p: ExposurePortfolio, targets, grid: QuantileGrid):
    rows = []
    for target in targets:
        rep = risk_report(p, target, grid)
        for q, var, cte in rep.rows:
            rows.append((rep.target, _fmt(q), _fmt(var), _fmt(cte)))
    return rows


def _correlation_rows(p: ExposurePortfolio):
    rows = []
    for k in range(1, p.n + 1):
        for l in range(k + 1, p.n + 1):
            try:
                value = correlation(p, k, l)
            except (InfiniteMomentError, NonConvergenceError):
                value = float("nan")
            rows.append((str(k), str(l), _fmt(value)))
    return rows


def _analytic_or_nan(fn) -> float:
    try:
        return float(fn())
    except (InfiniteMomentError, NonConvergenceError):
        return float("nan")


def _var_analytic(p: ExposurePortfolio, target, q) -> float:
    if isinstance(target, tuple) and target and target[0] == "marginal":
        return var_marginal(p, target[1], q)
    return var_extreme(p, target, q)


def _cte_analytic(p: ExposurePortfolio, target, q) -> float:
    if isinstance(target, tuple) and target and target[0] == "marginal":
        return cte_marginal(p, target[1], q)
    if target == "maxima":
        return cte_maxima(p, q)
    subset = tuple(range(1, p.n + 1)) if target == "minima" else target
    return cte_minima(p, subset, q)


def _mc_rows(p: ExposurePortfolio, grid: QuantileGrid, m: int, seed: int,
             representation: str):
    batch = _SAMPLERS[representation](p, m, seed)
    rows = []

    def add(statistic, detail, est, se, analytic):
        z = ((est - analytic) / se
             if se > 0.0 and math.isfinite(analytic) else float("nan"))
        rows.append((statistic, detail, _fmt(est), _fmt(se), _fmt(analytic),
                     _fmt(z)))

    means, ses = mc_estimate(batch, "mean")
    for i in range(1, p.n + 1):
        add("mean", str(i), means[i - 1], ses[i - 1],
            _analytic_or_nan(lambda: marginal_mean(p, i)))
    for k in range(1, p.n + 1):
        for l in range(k + 1, p.n + 1):
            est, se = mc_estimate(batch, "cov", k=k, l=l)
            add("cov", f"{k}+{l}", est, se,
                _analytic_or_nan(lambda: covariance(p, k, l)))
    est, se = mc_estimate(batch, "ddf", x=p.sigma)
    add("ddf", "x=sigma", est, se, joint_ddf(p, p.sigma))
    full = tuple(range(1, p.n + 1))
    targets = [(f"marginal:{i}", ("marginal", i)) for i in range(1, p.n + 1)]
    targets += [("minima", full), ("maxima", "maxima")]
    positive = [q for q in grid if q > 0.0]
    for q in positive:
        for label, target in targets:
            est, se = mc_estimate(batch, "var", target=target, q=q)
            add("var", f"{label}@{_fmt(q)}", est, se,
                _var_analytic(p, target, q))
            est, se = mc_estimate(batch, "cte", target=target, q=q)
            add("cte", f"{label}@{_fmt(q)}", est, se,
                _analytic_or_nan(lambda: _cte_analytic(p, target, q)))
    if positive and p.n >= 2:
        q = positive[-1]
        for k in range(1, p.n + 1):
            for l in range(1, p.n + 1):
                if k == l:
                    continue
                est, se = mc_estimate(batch, "econ_cte", k=k, l=l, q=q)
                add("econ_cte", f"{k}|{l}@{_fmt(q)}", est, se,
                    _analytic_or_nan(lambda: economic_cte(p, k, l, q)))
    return rows


def _sweep_rows(cfg: ScenarioConfig):
    preamble = (
        f"# scale recalibrated for each mu: the {_fmt(cfg.horizon)}-horizon "
        f"default probability is held at {_fmt(cfg.default_prob)} "
        f"(marginal tail index 2*mu)",
    )
    rows = []
    for case in cfg.sweep_cases:
        pattern = _SWEEP_PATTERNS[case]
        for mu in cfg.sweep_mu:
            sigma = calibrate_sigma(cfg.default_prob, cfg.horizon, 2.0 * mu)
            gamma = (2.0 * mu,) * 4 if case == "independent" else (mu,) * 4
            p = build_portfolio(pattern, (sigma,) * 3, gamma)
            for q in cfg.grid:
                cte = cte_minima(p, (1, 2, 3), q)
                rows.append((case, _fmt(mu), _fmt(sigma), _fmt(q),
                             "minima:1+2+3", _fmt(cte)))
    return preamble, rows


def _write_csv(path: Path, header, rows, preamble=()) -> Path:
    lines = list(preamble)
    lines.append(",".join(header))
    lines.extend(",".join(row) for row in rows)
    path.write_text("\n".join(lines) + "\n")
    return path


def run_scenario(cfg: ScenarioConfig, out_dir=".", samples: int | None = None,
                 seed: int | None = None,
                 representation: str = "background-risk") -> list[Path]:
    """Write the scenario's CSV artifacts; returns the paths written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if cfg.is_sweep:
        preamble, rows = _sweep_rows(cfg)
        written.append(_write_csv(
            out / f"{cfg.name}_sweep.csv",
            ("case", "mu", "sigma", "q", "target", "cte"), rows, preamble))
        return written
    p = cfg.portfolio
    written.append(_write_csv(
        out / f"{cfg.name}_risk.csv", ("target", "q", "var", "cte"),
        _risk_rows(p, _default_targets(p), cfg.grid)))
    written.append(_write_csv(
        out / f"{cfg.name}_correlations.csv",
        ("pair_k", "pair_l", "correlation"), _correlation_rows(p)))
    m = cfg.mc_samples if samples is None else samples
    s = cfg.mc_seed if seed is None else seed
    if m > 0:
        written.append(_write_csv(
            out / f"{cfg.name}_mc.csv",
            ("statistic", "detail", "estimate", "se", "analytic", "z"),
            _mc_rows(p, cfg.grid, m, s, representation)))
    return written


def _cmd_describe(args) -> int:
    cfg = _load_config(args.config)
    lines = [f"name: {cfg.name}"]
    if cfg.is_sweep:
        lines.append(f"sweep cases: {' '.join(cfg.sweep_cases)}")
        lines.append(f"mu values: {' '.join(_fmt(v) for v in cfg.sweep_mu)}")
        lines.append(f"default probability: {_fmt(cfg.default_prob)}")
        lines.append(f"horizon: {_fmt(cfg.horizon)}")
        lines.append("grid: " + " ".join(_fmt(q) for q in cfg.grid))
        print("\n".join(lines))
        return 0
    p = cfg.portfolio
    lines.append(f"dimension: {p.n}")
    for i, row in enumerate(p.c.entries, 1):
        lines.append(f"matrix row {i}: " + " ".join(str(v) for v in row))
    lines.append("sigma: " + " ".join(_fmt(s) for s in p.sigma))
    lines.append("gamma: " + " ".join(_fmt(g) for g in p.gamma))
    for i in range(1, p.n + 1):
        lines.append(f"marginal index {i}: {_fmt(p.marginal_indices[i - 1])}")
    for i in range(1, p.n + 1):
        mean = _analytic_or_nan(lambda: marginal_mean(p, i))
        var = _analytic_or_nan(lambda: marginal_var(p, i))
        lines.append(f"marginal mean {i}: {_fmt(mean)}")
        lines.append(f"marginal variance {i}: {_fmt(var)}")
    for k in range(1, p.n + 1):
        for l in range(k + 1, p.n + 1):
            d = pair_decomposition(p, k, l)
            lines.append(f"pair {k},{l} shared shape: {_fmt(d.shared)}")
            corr = _analytic_or_nan(lambda: correlation(p, k, l))
            lines.append(f"pair {k},{l} correlation: {_fmt(corr)}")
    lines.append("grid: " + " ".join(_fmt(q) for q in cfg.grid))
    lines.append(f"mc: {cfg.mc_samples} {cfg.mc_seed}")
    print("\n".join(lines))
    return 0


def _parse_point(tok: str, n: int, what: str):
    parts = [t for t in tok.split(",") if t.strip()]
    try:
        x = tuple(float(t) for t in parts)
    except ValueError:
        raise ConfigError(f"bad {what} point {tok!r}: expected "
                          f"comma-separated numbers") from None
    if len(x) != n:
        raise ConfigError(
            f"bad {what} point {tok!r}: expected {n} coordinates, "
            f"got {len(x)}")
    return x


def _parse_pair_point(tok: str, what: str):
    parts = tok.split(",")
    if len(parts) != 4:
        raise ConfigError(
            f"bad {what} argument {tok!r}: expected K,L,XK,XL")
    try:
        k, l = int(parts[0]), int(parts[1])
        xk, xl = float(parts[2]), float(parts[3])
    except ValueError:
        raise ConfigError(
            f"bad {what} argument {tok!r}: expected two integers then two "
            f"numbers") from None
    return k, l, xk, xl


def _cmd_eval(args) -> int:
    cfg = _load_config(args.config)
    p = _require_portfolio(cfg)
    if not (args.ddf or args.pdf or args.cond_eq or args.cond_gt):
        raise ConfigError(
            "eval needs at least one of --ddf/--pdf/--cond-eq/--cond-gt")
    rows = []
    for tok in args.ddf or ():
        x = _parse_point(tok, p.n, "--ddf")
        rows.append(("ddf", "x=" + " ".join(_fmt(v) for v in x),
                     _fmt(joint_ddf(p, x))))
    for tok in args.pdf or ():
        x = _parse_point(tok, p.n, "--pdf")
        rows.append(("pdf", "x=" + " ".join(_fmt(v) for v in x),
                     _fmt(joint_pdf(p, x))))
    for tok in args.cond_eq or ():
        k, l, xk, xl = _parse_pair_point(tok, "--cond-eq")
        rows.append(("cond_eq", f"k={k} l={l} xk={_fmt(xk)} xl={_fmt(xl)}",
                     _fmt(conditional_ddf_eq(p, k, l, xk, xl))))
    for tok in args.cond_gt or ():
        k, l, xk, xl = _parse_pair_point(tok, "--cond-gt")
        rows.append(("cond_gt", f"k={k} l={l} xk={_fmt(xk)} xl={_fmt(xl)}",
                     _fmt(conditional_ddf_gt(p, k, l, xk, xl))))
    print("quantity,detail,value")
    for row in rows:
        print(",".join(row))
    return 0


def _cmd_risk(args) -> int:
    cfg = _load_config(args.config)
    p = _require_portfolio(cfg)
    grid = _grid_override(cfg, args.grid)
    targets = ([_parse_target(t) for t in args.target]
               if args.target else _default_targets(p))
    table = list(_risk_rows(p, targets, grid))
    print("target,q,var,cte")
    for row in table:
        print(",".join(row))
    return 0


def _cmd_simulate(args) -> int:
    cfg = _load_config(args.config)
    p = _require_portfolio(cfg)
    grid = _grid_override(cfg, args.grid)
    m = cfg.mc_samples if args.samples is None else args.samples
    seed = cfg.mc_seed if args.seed is None else args.seed
    if m <= 0:
        raise ConfigError(
            "simulate needs a positive sample count; set mc in the config "
            "or pass --samples")
    table = list(_mc_rows(p, grid, m, seed, args.representation))
    print("statistic,detail,estimate,se,analytic,z")
    for row in table:
        print(",".join(row))
    return 0


def _cmd_calibrate(args) -> int:
    sigma = calibrate_sigma(args.default_prob, args.horizon, args.gamma_star)
    print("default_prob,horizon,gamma_star,sigma")
    print(",".join((_fmt(args.default_prob), _fmt(args.horizon),
                    _fmt(args.gamma_star), _fmt(sigma))))
    return 0


def _cmd_scenario(args) -> int:
    cfg = _load_config(args.config)
    written = run_scenario(cfg, out_dir=args.out_dir, samples=args.samples,
                           seed=args.seed,
                           representation=args.representation)
    for path in written:
        print(path)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mvlomax",
        description="Multivariate Pareto-II portfolios: closed forms, "
                    "extremes, risk measures, and samplers.")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_config(sp):
        sp.add_argument("config",
                        help="config file path or bundled name "
                             f"({', '.join(BUNDLED_CONFIGS)})")

    sp = sub.add_parser("describe", help="print a portfolio summary")
    with_config(sp)
    sp.set_defaults(func=_cmd_describe)

    sp = sub.add_parser("eval",
                        help="evaluate survival/density/conditionals at "
                             "points")
    with_config(sp)
    sp.add_argument("--ddf", action="append", metavar="X1,...,XN",
                    help="joint survival at a point (repeatable)")
    sp.add_argument("--pdf", action="append", metavar="X1,...,XN",
                    help="joint density at a point (repeatable)")
    sp.add_argument("--cond-eq", action="append", metavar="K,L,XK,XL",
                    help="P[X_k > xk | X_l = xl] (repeatable)")
    sp.add_argument("--cond-gt", action="append", metavar="K,L,XK,XL",
                    help="P[X_k > xk | X_l > xl] (repeatable)")
    sp.set_defaults(func=_cmd_eval)

    sp = sub.add_parser("risk", help="VaR/CTE table for chosen targets")
    with_config(sp)
    sp.add_argument("--target", action="append",
                    metavar="marginal:I|minima|minima:I+J|maxima",
                    help="risk target (repeatable; default: all marginals, "
                         "the full minimum, and the maximum)")
    sp.add_argument("--grid", help="comma-separated quantile levels "
                                   "overriding the config grid")
    sp.set_defaults(func=_cmd_risk)

    sp = sub.add_parser("simulate",
                        help="Monte Carlo estimates vs closed forms")
    with_config(sp)
    sp.add_argument("--samples", type=int, help="replicate count override")
    sp.add_argument("--seed", type=int, help="seed override")
    sp.add_argument("--grid", help="comma-separated quantile levels "
                                   "overriding the config grid")
    sp.add_argument("--representation", choices=sorted(_SAMPLERS),
                    default="background-risk", help="sampler construction")
    sp.set_defaults(func=_cmd_simulate)

    sp = sub.add_parser("calibrate",
                        help="scale from a default probability at a horizon")
    sp.add_argument("--default-prob", type=float, required=True,
                    help="default probability in (0, 1)")
    sp.add_argument("--horizon", type=float, required=True,
                    help="horizon the probability refers to")
    sp.add_argument("--gamma-star", type=float, required=True,
                    help="marginal tail index")
    sp.set_defaults(func=_cmd_calibrate)

    sp = sub.add_parser("scenario",
                        help="write the full CSV bundle for a config")
    with_config(sp)
    sp.add_argument("--out-dir", default=".", help="output directory")
    sp.add_argument("--samples", type=int,
                    help="Monte Carlo replicate count override")
    sp.add_argument("--seed", type=int, help="seed override")
    sp.add_argument("--representation", choices=sorted(_SAMPLERS),
                    default="background-risk", help="sampler construction")
    sp.set_defaults(func=_cmd_scenario)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (InputValidationError, InfiniteMomentError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NonConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
