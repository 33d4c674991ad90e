import numpy as np
from setuptools import Extension, setup
from Cython.Build import cythonize

# -ffp-contract=off: the numpy fallback must reproduce the compiled kernels
# bit-for-bit on the convolution path, which FMA contraction would break.
ext = Extension(
    "heavypaths._kernels",
    sources=["src/heavypaths/_kernels.pyx"],
    include_dirs=[np.get_include()],
    extra_compile_args=["-O3", "-ffp-contract=off"],
    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
)

setup(
    ext_modules=cythonize(
        [ext],
        language_level="3",
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    )
)
