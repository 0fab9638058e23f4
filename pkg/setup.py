"""Build shim for the optional Cython kernel.

The package is pure Python plus one compiled hot-loop module
(qproto_bench._kernels._money_cy).  If Cython or a C compiler is
missing the build falls back to the pure-Python kernel, which is
selected automatically at import time.
"""

from setuptools import setup

try:
    import numpy
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    ext_modules = cythonize(
        [
            Extension(
                "qproto_bench._kernels._money_cy",
                ["src/qproto_bench/_kernels/_money_cy.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
