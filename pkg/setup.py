"""Build script for the optional compiled stencil core.

The package works without the extension (a numpy fallback is selected at
import time); set FRACWAVE_NO_EXT=1 to skip compilation entirely.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("FRACWAVE_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "fracwave._fdcore",
                    ["src/fracwave/_fdcore.pyx"],
                    # -ffp-contract=off keeps the compiled arithmetic
                    # bit-identical to the numpy fallback.
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
