"""Build script: compiles the fast pair-stepping core when Cython is available.

The package is fully functional without the extension; `ipdarena._backend`
falls back to the numpy implementation at import time.
"""
import sys

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/ipdarena/_backend/_fastcore.pyx"],
        language_level=3,
    )
except ImportError:
    print("Cython not available; installing with pure-python backend only",
          file=sys.stderr)

setup(ext_modules=ext_modules)
