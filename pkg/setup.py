"""Builds the optional compiled kernels; the package works without them."""
import os

import numpy as np
from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001
            print(f"warning: compiled kernels not built ({exc}); using numpy fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            print(f"warning: failed to build {ext.name} ({exc}); using numpy fallback")


ext_modules = []
if not os.environ.get("POISONBENCH_NO_EXT"):
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "poisonbench._core._kernels",
                sources=["src/poisonbench/_core/_kernels.pyx"],
                language="c++",
                include_dirs=[np.get_include()],
                # keep float rounding identical to the numpy fallback
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": 3},
    )

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
