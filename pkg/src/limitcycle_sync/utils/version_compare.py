"""Version comparison for manifests written by other builds."""

from __future__ import annotations

from packaging.version import InvalidVersion, Version


def parse_version(v: str) -> Version | None:
    """Parse a version string, returning None on failure."""
    try:
        return Version(v)
    except InvalidVersion:
        if v.startswith("v"):
            try:
                return Version(v[1:])
            except InvalidVersion:
                pass
    return None


def classify_difference(recorded: str, current: str) -> str:
    """How the running build relates to the one that wrote a manifest.

    Returns: "same", "older", "newer" (current is newer), or "unknown".
    """
    rec = parse_version(recorded)
    cur = parse_version(current)
    if rec is None or cur is None:
        return "unknown"
    if rec == cur:
        return "same"
    return "newer" if cur > rec else "older"
