from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("gibbs_spectral._chain_ext", ["src/gibbs_spectral/_chain_ext.pyx"])],
        language_level="3",
    )
except ImportError:
    # No Cython: install the pure-Python package, the fallback kernel is used.
    ext_modules = []

setup(ext_modules=ext_modules)
