from setuptools import setup, Extension

import numpy as np

try:
    from Cython.Build import cythonize
except ImportError:
    # Pure-python fallback backend still works without the extension.
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "kponet._kernels.core",
                ["src/kponet/_kernels/core.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3", "-march=native", "-fno-math-errno"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
