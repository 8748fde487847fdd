from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

# The compiled kernels are optional: without Cython (or a C compiler) the
# package falls back to the numpy implementations in ratiokit._kernels.
extensions = []
if cythonize is not None:
    extensions = cythonize(
        [
            Extension(
                "ratiokit._kernels._core",
                ["src/ratiokit/_kernels/_core.pyx"],
            )
        ],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )

setup(ext_modules=extensions)
