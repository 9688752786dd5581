"""Build script for the optional compiled transport kernel.

The package is pure Python plus one Cython extension for the solver's
interface sweep. If Cython or a C compiler is unavailable the extension
is skipped and the NumPy fallback kernel is used at runtime.
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "hymo._transport",
                ["src/hymo/_transport.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
    for ext in extensions:
        ext.optional = True
except ImportError:
    extensions = []

setup(ext_modules=extensions)
