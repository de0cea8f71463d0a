import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "contextuality.lp._kernel",
        ["src/contextuality/lp/_kernel.pyx"],
        include_dirs=[np.get_include()],
        # no -ffast-math / -march=native: keeps results bit-identical to the numpy fallback
        extra_compile_args=["-O2"],
    )
]

setup(
    ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}),
)
