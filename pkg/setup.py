"""Build script: compiles the optional series-kernel extension.

The extension is a pure accelerator. If no C toolchain (or Cython) is
available the install must still succeed, so every failure path degrades to
the pure-Python kernels instead of aborting.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """build_ext that treats any compilation failure as a soft skip."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # no toolchain at all
            warnings.warn(f"skipping compiled kernels ({exc}); pure-Python fallback will be used")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"skipping {ext.name} ({exc}); pure-Python fallback will be used")


def extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError as exc:
        warnings.warn(f"compiled kernels not built ({exc})")
        return []
    return cythonize(
        [
            Extension(
                "mvlomax._kernels_cy",
                ["src/mvlomax/_kernels_cy.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
