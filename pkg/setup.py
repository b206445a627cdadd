from setuptools import setup, Extension

import numpy as np

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    ext_modules = cythonize(
        Extension(
            "ergmkit._cykernel",
            ["src/ergmkit/_cykernel.pyx"],
            include_dirs=[np.get_include()],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        ),
        language_level=3,
    )
else:
    # No Cython available: the package still installs and falls back to the
    # pure-Python kernel at import time.
    ext_modules = []

setup(ext_modules=ext_modules)
