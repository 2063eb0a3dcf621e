"""Build the optional compiled scan kernels.

The extension is marked optional: if Cython or a C compiler is missing the
package still installs and falls back to the numpy kernels at import.
"""
import sys

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover
    cythonize = None

if sys.platform == "win32":
    omp_compile, omp_link = ["/openmp"], []
else:
    omp_compile, omp_link = ["-fopenmp"], ["-fopenmp"]

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "clusteropt._ckernels",
                ["src/clusteropt/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3", "-ffp-contract=off"] + omp_compile,
                extra_link_args=omp_link,
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
