from setuptools import Extension, setup

setup(
    ext_modules=[
        Extension(
            "graphrecourse._fastspace",
            ["src/graphrecourse/_fastspace.c"],
            extra_compile_args=["-O2"],
        )
    ]
)
