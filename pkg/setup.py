"""Build the optional Cython speedup kernel.

The package is fully functional without the compiled extension (a numpy
fallback with identical semantics is selected at import time), so a failed
extension build downgrades to a pure-Python install instead of aborting.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "apsquares.kernels._speedups",
                ["src/apsquares/kernels/_speedups.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    import sys

    print(f"apsquares: building without compiled kernels ({exc})", file=sys.stderr)

setup(ext_modules=ext_modules)
