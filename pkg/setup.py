"""Build hook for the optional compiled integer-matrix kernels.

The package is pure Python apart from ``umbra._kernels_cy``, a Cython twin
of ``umbra._kernels_py``.  The extension is marked optional: if Cython or a
C compiler is missing the build still succeeds and the package falls back
to the pure-Python kernels at import time.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "umbra._kernels_cy",
                ["src/umbra/_kernels_cy.pyx"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
