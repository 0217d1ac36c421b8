from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "parsched._speedups",
                ["src/parsched/_speedups.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # Pure-Python install: parsched._fallback carries the same semantics.
    ext_modules = []

setup(ext_modules=ext_modules)
