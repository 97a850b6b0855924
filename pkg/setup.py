import os

import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

# -ffast-math lets gcc vectorize expf through libmvec; the filter kernels
# tolerate the relaxed semantics (all inputs finite, tolerances >= 1e-5).
# Set DEPTHFILL_PORTABLE=1 to drop -march=native for redistributable builds.
flags = ["-O3", "-ffast-math", "-fopenmp"]
if not os.environ.get("DEPTHFILL_PORTABLE"):
    flags.append("-march=native")

ext = Extension(
    "depthfill._kernels._jbf_cy",
    sources=["src/depthfill/_kernels/_jbf_cy.pyx"],
    include_dirs=[np.get_include()],
    extra_compile_args=flags,
    extra_link_args=["-fopenmp", "-lmvec", "-lm"],
    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
)

setup(ext_modules=cythonize([ext], language_level="3"))
