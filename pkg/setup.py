import os

from setuptools import setup

ext_modules = []
if os.environ.get("BRANCHBPA_NO_EXT", "") in ("", "0"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "branchbpa._kernels",
                    ["src/branchbpa/_kernels.pyx"],
                    language="c++",
                    extra_compile_args=["-O2", "-std=c++14"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
