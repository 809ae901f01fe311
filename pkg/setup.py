"""Build script for the optional compiled kernel extension.

The package works without the extension (a pure-Python twin of every
kernel ships in fairmarket._kernels_py); building it is only a speed
concern.  Set FAIRMARKET_PURE=1 to skip the extension entirely.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None


class optional_build_ext(build_ext):
    """Degrade to the pure-Python package when compilation fails."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, cythonize failure, ...
            print(f"warning: kernel extension not built ({exc}); "
                  "falling back to pure-Python kernels")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: building {ext.name} failed ({exc}); "
                  "falling back to pure-Python kernels")


ext_modules = []
if cythonize is not None and not os.environ.get("FAIRMARKET_PURE"):
    # -ffp-contract=off keeps double arithmetic identical to CPython's
    # (no FMA fusion), which the bit-exact backend contract relies on.
    ext_modules = cythonize(
        [
            Extension(
                "fairmarket._kernels",
                ["src/fairmarket/_kernels.pyx"],
                # -fno-builtin-sin/-cos: GCC otherwise fuses the two
                # calls on one angle into glibc sincos(), whose results
                # can differ from separate sin()/cos() by 1 ulp.
                extra_compile_args=[
                    "-O3",
                    "-ffp-contract=off",
                    "-fno-builtin-sin",
                    "-fno-builtin-cos",
                ],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})
