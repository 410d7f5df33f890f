"""Build hook for the optional compiled kernel.

The package is pure Python plus one Cython extension for the hot loops
(permutation orbits, token propagation).  If Cython or a C compiler is
unavailable the build falls back to the pure-Python kernels; nothing else
changes.  Set RLEMKIT_PURE=1 to skip the extension on purpose.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("RLEMKIT_PURE"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/rlemkit/kernels/_speed.pyx"],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules)
