import numpy as np
from setuptools import setup, Extension

try:
    from Cython.Build import cythonize
    ext_modules = cythonize(
        [Extension("entrolab._kernels", ["src/entrolab/_kernels.pyx"],
                   include_dirs=[np.get_include()])],
        language_level=3)
except ImportError:
    # pure-python kernels remain available; the extension is optional
    ext_modules = []

setup(ext_modules=ext_modules)
