"""Builds the optional compiled matcher; the package works without it."""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # fall back to the pure-Python matcher
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "dynpi._match_ext",
                ["src/dynpi/_match_ext.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
