"""Builds the optional compiled scan kernel.

The package works without it (a numpy fallback is selected at import time),
so a failed compile only downgrades performance.
"""
import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the extension if possible; warn and continue otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler or toolchain missing
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(
            f"warning: building the compiled kernel failed ({exc}); "
            "falling back to the pure-python implementation",
            file=sys.stderr,
        )


def _extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError as exc:
        print(f"warning: {exc}; skipping the compiled kernel", file=sys.stderr)
        return []
    return cythonize(
        [
            Extension(
                "orbitstrata._kernels",
                ["src/orbitstrata/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )


setup(ext_modules=_extensions(), cmdclass={"build_ext": OptionalBuildExt})
