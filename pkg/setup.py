"""Build script: compiles the optional Cython kernel extension.

The package works without the extension (a NumPy fallback is selected at
import time); set SPINE_NO_EXTENSION=1 to skip compilation entirely.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("SPINE_NO_EXTENSION") != "1":
    try:
        import numpy
        from Cython.Build import cythonize

        ext = Extension(
            "spine.kernels._speedups",
            ["src/spine/kernels/_speedups.pyx"],
            include_dirs=[numpy.get_include()],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            extra_compile_args=["-O3"],
        )
        ext_modules = cythonize([ext], language_level="3")
    except Exception as exc:  # pragma: no cover - build-env dependent
        print(f"spine: building without compiled kernels ({exc})")

setup(ext_modules=ext_modules)
