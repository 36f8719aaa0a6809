import os
from dataclasses import dataclass
from typing import Optional


@dataclass()
class VersionInfo:
    build_type: str
    version: str
    version_build: Optional[str]

    @property
    def is_release(self) -> bool:
        return self.build_type == "release"

    @property
    def is_dev(self) -> bool:
        return self.build_type.startswith("dev")


def extract_version_info(package_path: str) -> VersionInfo:
    """
    Read the build type and version string from the package version.py
    without importing the package
    """
    version_path = os.path.join(package_path, "version.py")

    namespace = {}
    with open(version_path) as file:
        exec(file.read(), namespace)

    build_type = namespace.get("build_type")
    version = namespace.get("version")
    if build_type is None or version is None:
        raise ValueError(f"{version_path} must define build_type and version")

    return VersionInfo(
        build_type=build_type,
        version=version,
        version_build=namespace.get("version_build"),
    )
