from setuptools import Extension, setup

# The C accelerator is optional: everything has a pure-Python fallback, the
# extension only makes the height-800 survey runs fit in sane wall time.
setup(
    ext_modules=[
        Extension(
            "sqfscan._fastfactor",
            sources=["src/sqfscan/_fastfactor.c"],
            extra_compile_args=["-O2"],
            optional=True,
        )
    ]
)
