"""Build hook for the optional compiled LCS kernel.

The package is fully functional without the extension; lgmgc.kernels falls
back to the pure-Python implementation when the import fails.  Build in
place for development with:

    python setup.py build_ext --inplace
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "lgmgc._lcs",
                ["src/lgmgc/_lcs.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
