import os
import shutil
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        source_dir = Path(__file__).resolve().parent
        ext_path = Path(self.get_ext_fullpath(ext.name)).resolve()
        package_dir = ext_path.parent
        package_dir.mkdir(parents=True, exist_ok=True)
        build_temp = Path(self.build_temp).resolve()
        build_temp.mkdir(parents=True, exist_ok=True)

        cmake_args = [
            "-DCMAKE_BUILD_TYPE=Release",
            "-DSTARPDE_BUILD_TESTS=OFF",
            f"-DPython3_EXECUTABLE={sys.executable}",
        ]
        subprocess.run(["cmake", "-S", str(source_dir), "-B", str(build_temp), *cmake_args],
                       check=True)
        subprocess.run(
            ["cmake", "--build", str(build_temp), "--target", "_core",
             "--parallel", str(os.cpu_count() or 2)],
            check=True)

        built = list((build_temp / "python" / "starpde").glob("_core*"))
        if not built:
            raise RuntimeError("CMake did not produce the _core extension")
        shutil.copy2(built[0], ext_path)


setup(
    packages=["starpde"],
    package_dir={"starpde": "python/starpde"},
    ext_modules=[CMakeExtension("starpde._core")],
    cmdclass={"build_ext": CMakeBuild},
    zip_safe=False,
)
