from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

ext = Pybind11Extension(
    "dp4dnli._dp4d",
    sources=[
        "src/constellation.cpp",
        "src/link.cpp",
        "src/nli_model.cpp",
        "src/ssfm.cpp",
        "src/bench.cpp",
        "bindings/module.cpp",
    ],
    include_dirs=["include", "vendor"],
    libraries=["fftw3"],
    cxx_std=20,
    extra_compile_args=["-O2"],
)

setup(ext_modules=[ext], cmdclass={"build_ext": build_ext})
