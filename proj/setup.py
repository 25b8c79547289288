from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

sources = [
    "bindings/module.cpp",
    "src/core.cpp",
    "src/verify.cpp",
    "src/select.cpp",
    "src/policy.cpp",
    "src/simworld.cpp",
    "src/ttrl.cpp",
    "src/harness.cpp",
    "src/config.cpp",
]

setup(
    ext_modules=[
        Pybind11Extension(
            "prmlab._core",
            sources,
            include_dirs=["include", "vendor"],
            cxx_std=20,
        )
    ],
    cmdclass={"build_ext": build_ext},
)
