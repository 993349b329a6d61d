"""Build script; compiles the Cython statistics kernel when Cython is available.

The package works without the extension (a NumPy fallback is selected at
import time), so any build failure here should not block installation:
run ``pip install -e . --no-build-isolation`` and check
``checkerdep._kernels.BACKEND`` to see which kernel is active.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "checkerdep._kernels._ckernels",
                ["src/checkerdep/_kernels/_ckernels.pyx"],
            )
        ],
        language_level="3",
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
