"""Build script: compiles the optional geometry kernel extension.

The extension is marked optional so a missing compiler or Cython never
blocks installation; the package falls back to the pure-Python kernels
at import time (see airinput/kernels.py).
"""

from setuptools import setup

try:
    from Cython.Build import cythonize
    from setuptools import Extension

    extensions = cythonize(
        [
            Extension(
                "airinput._kernels",
                ["src/airinput/_kernels.pyx"],
                # no FMA contraction: compiled results must match the
                # pure-Python kernels bit for bit
                extra_compile_args=["-ffp-contract=off"],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
