"""Build script for the optional compiled kernels.

The package is fully functional without the extension (a numpy fallback is
selected at import time); the extension only accelerates the hot kernels.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "mfvdm._kernels_ext",
                ["src/mfvdm/_kernels_ext.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
