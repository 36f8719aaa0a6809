"""
Version information for rdplab.

The version is `major.minor.patch`, followed for non-release builds by a
build tag: `devN` (or a bare `dev`) for development builds and the UTC date
`YYYYMMDD` for nightly builds. This file is also read by setup.py without
importing the package, so it must stay self-contained.
"""

import re
from datetime import datetime, timezone
from typing import Optional, Tuple

version_base = "0.1.0"
build_type = "dev"  # release, nightly, dev or devN

_BASE_PATTERN = re.compile(r"(\d+)\.(\d+)\.(\d+)")
_DEV_PATTERN = re.compile(r"dev\d*")


def _build_tag(type_: str) -> Optional[str]:
    if type_ == "release":
        return None
    if type_ == "nightly":
        return datetime.now(timezone.utc).strftime("%Y%m%d")
    if _DEV_PATTERN.fullmatch(type_):
        return type_
    raise ValueError(f"Unknown build type: {type_}")


def _generate_version_attributes(
    base: str, type_: str
) -> Tuple[str, int, int, int, Optional[str]]:
    """
    :param base: the `major.minor.patch` base
    :param type_: release, nightly, dev or devN
    :return: full version string, major, minor, patch and build tag
    """
    match = _BASE_PATTERN.fullmatch(base)
    if match is None:
        raise ValueError(f"version base must be major.minor.patch, given {base!r}")
    major, minor, patch = (int(part) for part in match.groups())
    build = _build_tag(type_)
    ver = base if build is None else f"{base}.{build}"
    return ver, major, minor, patch, build


version, version_major, version_minor, version_patch, version_build = (
    _generate_version_attributes(version_base, build_type)
)
__version__ = version


__all__ = [
    "__version__",
    "version_base",
    "build_type",
    "version",
    "version_major",
    "version_minor",
    "version_patch",
    "version_build",
]
