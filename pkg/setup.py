from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # the pure-Python kernels are used instead
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("ellis_lab._kernels", ["src/ellis_lab/_kernels.pyx"], extra_compile_args=["-O3"])],
        language_level="3",
    )

setup(ext_modules=ext_modules)
