from setuptools import Extension, setup
from Cython.Build import cythonize
import numpy as np

# The compiled kernels are an optimisation only; trustdyn._backend falls back
# to the pure-Python twin when the extension is absent.
ext = Extension(
    "trustdyn._kernels",
    ["src/trustdyn/_kernels.pyx"],
    include_dirs=[np.get_include()],
    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
)

setup(
    ext_modules=cythonize(
        [ext],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "initializedcheck": False,
            "cdivision": True,
        },
    )
)
