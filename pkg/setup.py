"""Build script for the optional compiled sampling kernels.

The package works without the extension (a pure numpy fallback is
selected at import time), so a failed extension build downgrades to a
warning instead of aborting the install.
"""

import os
import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Build the extension if possible; warn and continue otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001 - any build failure is non-fatal
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(
            "WARNING: building the compiled kernels failed; "
            "the pure numpy backend will be used.\n"
            f"  reason: {exc}",
            file=sys.stderr,
        )


def make_extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError as exc:
        print(
            f"WARNING: Cython/numpy unavailable at build time ({exc}); "
            "skipping compiled kernels.",
            file=sys.stderr,
        )
        return []

    ext = Extension(
        "cvshare._kernels",
        sources=["src/cvshare/_kernels.pyx"],
        include_dirs=[numpy.get_include()],
        library_dirs=[os.path.join(os.path.dirname(numpy.__file__), "random", "lib")],
        libraries=["npyrandom"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], language_level=3)


setup(
    ext_modules=make_extensions(),
    cmdclass={"build_ext": optional_build_ext},
)
