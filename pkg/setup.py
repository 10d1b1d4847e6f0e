"""Build script for the compiled closure kernel.

The extension is optional: when Cython (or a C compiler) is unavailable the
package still installs and finalg._kernels falls back to the numpy backend.
"""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    extensions = [
        Extension(
            "finalg._kernels._closure_c",
            ["src/finalg/_kernels/_closure_c.pyx"],
        ),
    ]
    ext_modules = cythonize(extensions, language_level="3")

setup(ext_modules=ext_modules)
