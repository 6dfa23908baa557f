"""Build script: compiles the Gibbs sampling hot kernels as a C extension.

The extension is optional.  If Cython or a C compiler is unavailable the
package installs anyway and falls back to the pure-Python kernels in
``wexpfit._kernels_py`` (selected at import time by ``wexpfit._backend``).
"""

import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "wexpfit._kernels",
                ["src/wexpfit/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                # -ffp-contract=off: no FMA contraction, keeps the compiled
                # kernels bit-identical to the pure-Python reference
                extra_compile_args=["-O3", "-ffp-contract=off"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError as exc:  # pragma: no cover - build environment dependent
    sys.stderr.write(f"wexpfit: building without compiled kernels ({exc})\n")

setup(ext_modules=ext_modules)
