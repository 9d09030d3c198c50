from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install; procyc.kernels falls back
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "procyc._kernels",
                ["src/procyc/_kernels.pyx"],
                # no FMA contraction: keeps results bit-identical to the Python backend
                extra_compile_args=["-O2", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
