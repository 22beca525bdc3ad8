"""Build glue: compile the PyO3 extension with cargo and ship it as
`flagtwistor_py`.  No maturin/setuptools-rust dependency — plain
setuptools plus a cargo invocation."""

import shutil
import subprocess
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

ROOT = Path(__file__).resolve().parent


class CargoExtension(Extension):
    def __init__(self, name: str, package: str):
        super().__init__(name, sources=[])
        self.package = package


class cargo_build_ext(build_ext):
    def build_extension(self, ext):
        if not isinstance(ext, CargoExtension):
            return super().build_extension(ext)
        subprocess.run(
            ["cargo", "build", "--release", "-p", ext.package],
            cwd=ROOT,
            check=True,
        )
        release = ROOT / "target" / "release"
        stem = ext.name.replace("-", "_")
        for candidate in (f"lib{stem}.so", f"lib{stem}.dylib", f"{stem}.dll"):
            built = release / candidate
            if built.exists():
                break
        else:
            raise FileNotFoundError(f"cargo produced no cdylib for {ext.name}")
        dest = Path(self.get_ext_fullpath(ext.name))
        dest.parent.mkdir(parents=True, exist_ok=True)
        shutil.copy2(built, dest)


setup(
    ext_modules=[CargoExtension("flagtwistor_py", "flagtwistor-py")],
    cmdclass={"build_ext": cargo_build_ext},
)
