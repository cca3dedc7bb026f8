import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "bestmat._kernels._speedups",
                ["src/bestmat/_kernels/_speedups.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            ),
            Extension(
                "bestmat._kernels._csolver",
                ["src/bestmat/_kernels/_csolver.pyx"],
                language="c++",
                extra_compile_args=["-O3"],
            ),
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
