"""Build script: compiles the closure/scan kernel as a C extension.

The package also ships a pure-numpy fallback (derange._kernel.pure), so a
failed or skipped extension build only costs speed, never functionality.
"""

from setuptools import setup, Extension

ext_modules = []
try:
    from Cython.Build import cythonize
    import numpy as np

    ext_modules = cythonize(
        [
            Extension(
                "derange._kernel._ckernel",
                ["src/derange/_kernel/_ckernel.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
