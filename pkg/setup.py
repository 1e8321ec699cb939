"""Build script for the optional compiled kernel extension.

The package works without the extension (qcorr.kernels falls back to the
pure-NumPy implementation), so a failed compile only costs speed.
"""

import sys

import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = []
if cythonize is not None and "--pure-python" not in sys.argv:
    extensions = cythonize(
        [
            Extension(
                "qcorr._kernels_c",
                ["src/qcorr/_kernels_c.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=extensions)
