"""Builds the optional compiled kernels; the package works without them."""
from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize
    ext_modules = cythonize([Extension("artifact._kernels", ["src/artifact/_kernels.pyx"])],
                            language_level=3, quiet=True)
except ImportError:
    pass

setup(ext_modules=ext_modules)
