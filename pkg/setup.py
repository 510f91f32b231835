"""Build script: compiles the lattice-scan kernel as a C extension.

The kernel source (src/criticalline/kernel/_scan_core.py) is plain Python
written in Cython pure-python mode.  If Cython or a C compiler is missing
the package still works: the kernel falls back to interpreting the same
file, so the build is best-effort.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("CRITICALLINE_SKIP_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "criticalline.kernel._scan_core",
                    ["src/criticalline/kernel/_scan_core.py"],
                    # -ffp-contract=off: the interpreted fallback must produce
                    # bit-identical doubles, so FMA contraction is disabled.
                    extra_compile_args=["-O3", "-ffp-contract=off", "-fno-fast-math"],
                )
            ],
            language_level=3,
            annotate=False,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
