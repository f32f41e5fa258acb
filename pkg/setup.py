"""Build script.

The theta-series kernel has a Cython implementation compiled here; if Cython
or a C compiler is unavailable the build falls back to the pure-NumPy kernel
(selected automatically at import time), so the extension is optional.

Set FINITEGAP_NO_EXT=1 to skip the extension build entirely.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("FINITEGAP_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "finitegap._kernels._theta_cy",
                    ["src/finitegap/_kernels/_theta_cy.pyx"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except Exception as exc:  # pragma: no cover - build environment dependent
        print(f"finitegap: skipping Cython kernel build ({exc!r}); "
              "the pure-NumPy fallback will be used")
        ext_modules = []

setup(ext_modules=ext_modules)
