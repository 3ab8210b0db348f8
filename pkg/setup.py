"""Build script for the optional compiled kernel extension.

The package works without the extension (a numpy fallback is selected at
import time), so a failed compile downgrades to a warning instead of
aborting the install.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """build_ext that tolerates a missing/broken C toolchain."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover - toolchain dependent
            warnings.warn(f"compiled kernels skipped: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover - toolchain dependent
            warnings.warn(f"compiled kernels skipped ({ext.name}): {exc}")


def extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:  # pragma: no cover
        return []
    return cythonize(
        [
            Extension(
                "causalot._kernels._speedups",
                ["src/causalot/_kernels/_speedups.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
