"""Build the optional Cython force kernel.

If Cython or a C compiler is unavailable the package still installs and
falls back to the NumPy kernel at import time.
"""
import os

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None


def get_extensions():
    if cythonize is None or os.environ.get("FORCEMBED_NO_EXT"):
        return []
    extensions = [
        Extension(
            "forcembed._kernels",
            ["src/forcembed/_kernels.pyx"],
            include_dirs=[np.get_include()],
            # no -ffast-math: the kernel relies on a fixed summation order
            extra_compile_args=["-O3"],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        )
    ]
    return cythonize(
        extensions,
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "initializedcheck": False,
            "cdivision": True,
        },
    )


setup(ext_modules=get_extensions())
