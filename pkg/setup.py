import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("GREEDYLAB_NO_EXT", "") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [Extension(
                "greedylab._ckernels",
                ["src/greedylab/_ckernels.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
