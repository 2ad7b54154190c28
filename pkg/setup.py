from setuptools import setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python fallback is selected at import time
    ext_modules = []
else:
    ext_modules = cythonize(
        "src/ncsat/solver/_csolver.pyx",
        compiler_directives={"language_level": 3},
    )

setup(ext_modules=ext_modules)
