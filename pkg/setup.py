"""Build the optional compiled matcher; everything else is declared in pyproject.toml."""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("HTNKIT_NO_EXT", "0") in ("", "0"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(["src/htnkit/_kernels/_match.pyx"], language_level=3, quiet=True)

setup(ext_modules=ext_modules)
