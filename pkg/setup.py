import os

from setuptools import setup

ext_modules = []
if os.environ.get("TRAWL_SKIP_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "trawl.kernels._ckernels",
                    ["src/trawl/kernels/_ckernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            language_level=3,
        )
    except ImportError:
        # Cython unavailable: the package falls back to the numpy kernels.
        ext_modules = []

setup(ext_modules=ext_modules)
