"""Build script; compiles the optional tokenizer extension when Cython is available.

Set CELLGAUGE_SKIP_EXT=1 to force a pure-Python install. The package works
either way: the scanner backend is selected at import time.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("CELLGAUGE_SKIP_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [Extension("cellgauge._tokenizer", ["src/cellgauge/_tokenizer.pyx"])],
            language_level=3,
        )

setup(ext_modules=ext_modules)
