"""Builds the optional compiled kernel; the package works without it."""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("CROWDSWEEP_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        from setuptools import Extension
        ext_modules = cythonize(
            [Extension("crowdsweep.oracle._kernel", ["src/crowdsweep/oracle/_kernel.pyx"],
                       include_dirs=[numpy.get_include()],
                       define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                       extra_compile_args=["-O3"])],
            compiler_directives={"language_level": "3"})

setup(ext_modules=ext_modules)
