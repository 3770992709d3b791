import os

from setuptools import setup

ext_modules = []
if os.environ.get("TEMPRES_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
        import numpy as np

        ext_modules = cythonize(
            [
                Extension(
                    "tempres._gls_core",
                    ["src/tempres/_gls_core.pyx"],
                    include_dirs=[np.get_include()],
                )
            ],
            language_level=3,
        )
    except ImportError:
        # No Cython / numpy at build time: install the pure-Python fallback only.
        ext_modules = []

setup(ext_modules=ext_modules)
