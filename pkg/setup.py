import os

import numpy as np
from setuptools import Extension, setup

# The compiled kernel core is optional: when Cython (or a C compiler) is not
# available the package installs pure-Python and selects the NumPy fallback
# kernels at import time.
ext_modules = []
if os.path.exists("src/dgadapt/_kernels.pyx"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "dgadapt._kernels",
                    ["src/dgadapt/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[
                        ("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")
                    ],
                )
            ],
            language_level=3,
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules)
