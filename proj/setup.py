"""Builds the _core extension by driving the project's CMake configuration,
so the pip install and the plain CMake build produce the same module."""

import os
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name: str):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext: CMakeExtension) -> None:
        source_dir = Path(__file__).resolve().parent
        build_dir = Path(self.build_temp).resolve() / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)

        subprocess.run(
            [
                "cmake",
                "-S", str(source_dir),
                "-B", str(build_dir),
                "-DCMAKE_BUILD_TYPE=Release",
                f"-DPython3_EXECUTABLE={sys.executable}",
            ],
            check=True,
        )
        subprocess.run(
            [
                "cmake",
                "--build", str(build_dir),
                "--target", "_core",
                "-j", str(os.cpu_count() or 2),
            ],
            check=True,
        )

        built = sorted(build_dir.glob("_core.*"))
        if not built:
            raise RuntimeError(f"no _core module produced under {build_dir}")
        out = Path(self.get_ext_fullpath(ext.name)).resolve()
        out.parent.mkdir(parents=True, exist_ok=True)
        self.copy_file(str(built[0]), str(out))


setup(
    ext_modules=[CMakeExtension("multisift._core")],
    cmdclass={"build_ext": CMakeBuild},
)
