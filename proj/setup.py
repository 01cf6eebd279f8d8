"""Build the _banditlab extension through the main CMake tree."""

import glob
import os
import shutil
import subprocess
import sys
from pathlib import Path

import pybind11
from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        source_dir = Path(__file__).resolve().parent
        build_dir = Path(self.build_temp).resolve() / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)
        cfg = "Debug" if self.debug else "Release"
        subprocess.run(
            [
                "cmake",
                "-S", str(source_dir),
                "-B", str(build_dir),
                f"-DCMAKE_BUILD_TYPE={cfg}",
                f"-DPython3_EXECUTABLE={sys.executable}",
                f"-Dpybind11_DIR={pybind11.get_cmake_dir()}",
                "-DBANDITLAB_BUILD_TESTS=OFF",
                "-DBANDITLAB_BUILD_CLI=OFF",
            ],
            check=True,
        )
        subprocess.run(
            [
                "cmake", "--build", str(build_dir),
                "--target", "_banditlab",
                "-j", str(os.cpu_count() or 1),
            ],
            check=True,
        )
        built = glob.glob(str(build_dir / "python" / "banditlab" / "_banditlab*"))
        if not built:
            raise RuntimeError("cmake did not produce the _banditlab module")
        dest = Path(self.get_ext_fullpath(ext.name))
        dest.parent.mkdir(parents=True, exist_ok=True)
        shutil.copy2(built[0], dest)


setup(
    ext_modules=[CMakeExtension("banditlab._banditlab")],
    cmdclass={"build_ext": CMakeBuild},
)
