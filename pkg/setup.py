import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

# Compiled hot kernels: tile blending and the max-flow solver. Both are
# optional -- the package falls back to pure-Python implementations when
# the extensions are unavailable (see splatcut.backend).
extensions = [
    Extension(
        "splatcut._kernels",
        ["src/splatcut/_kernels.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        optional=True,
    ),
    Extension(
        "splatcut._maxflow",
        ["src/splatcut/_maxflow.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        optional=True,
    ),
]

setup(ext_modules=cythonize(extensions, language_level="3"))
