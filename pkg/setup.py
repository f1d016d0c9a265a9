from setuptools import setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(["src/tautring/_ckernel.pyx"], quiet=True)
except ImportError:  # pure-Python install; kernel.py falls back
    ext_modules = []

setup(ext_modules=ext_modules)
