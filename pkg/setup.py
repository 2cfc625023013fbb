"""Build script for the optional compiled simplex kernel.

The package is fully functional without the extension: linchoice.lp falls
back to the pure-NumPy pivot loop when the compiled module is absent
(see linchoice/lp/__init__.py). The extension is therefore marked optional
so installation never fails on a machine without a C toolchain.
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
                "linchoice.lp._pivot_cy",
                ["src/linchoice/lp/_pivot_cy.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )

setup(ext_modules=ext_modules)
