"""Run manifests and their verification results."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any

MANIFEST_NAME = "manifest.yaml"


class CheckStatus(enum.Enum):
    MATCH = "match"
    MISMATCH = "mismatch"
    MISSING = "missing"
    EXTRA = "extra"


@dataclass(frozen=True)
class OutputFile:
    path: str
    sha256: str
    size: int

    def to_dict(self) -> dict[str, Any]:
        return {"path": self.path, "sha256": self.sha256, "size": self.size}


@dataclass
class RunManifest:
    """Everything needed to regenerate an invocation's data files.

    ``command`` holds the sub-command and its positional/mode arguments; every
    numeric input lives in ``config``.
    """

    tool_version: str
    command: list[str]
    config: dict[str, Any]
    master_seed: int
    config_digest: str = ""
    timings: dict[str, float] = field(default_factory=dict)
    outputs: list[OutputFile] = field(default_factory=list)

    def output(self, path: str) -> OutputFile | None:
        for item in self.outputs:
            if item.path == path:
                return item
        return None

    def to_dict(self) -> dict[str, Any]:
        return {
            "tool_version": self.tool_version,
            "command": list(self.command),
            "master_seed": self.master_seed,
            "config_digest": self.config_digest,
            "timings": dict(self.timings),
            "outputs": [o.to_dict() for o in self.outputs],
            "config": self.config,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> RunManifest:
        return cls(
            tool_version=str(data.get("tool_version", "")),
            command=[str(c) for c in data.get("command", [])],
            config=dict(data.get("config") or {}),
            master_seed=int(data.get("master_seed", 0)),
            config_digest=str(data.get("config_digest", "")),
            timings={k: float(v) for k, v in (data.get("timings") or {}).items()},
            outputs=[
                OutputFile(path=str(o["path"]), sha256=str(o["sha256"]), size=int(o.get("size", 0)))
                for o in data.get("outputs") or []
            ],
        )


@dataclass(frozen=True)
class OutputCheck:
    path: str
    status: CheckStatus
    expected: str = ""
    actual: str = ""


@dataclass
class VerifyReport:
    manifest_path: str
    recorded_version: str
    current_version: str
    version_status: str
    command: list[str]
    checks: list[OutputCheck] = field(default_factory=list)
    drift: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return bool(self.checks) and all(c.status == CheckStatus.MATCH for c in self.checks)

    @property
    def summary(self) -> str:
        counts: dict[str, int] = {}
        for c in self.checks:
            counts[c.status.value] = counts.get(c.status.value, 0) + 1
        return ", ".join(f"{k}={v}" for k, v in sorted(counts.items())) or "no outputs"

    def to_dict(self) -> dict[str, Any]:
        return {
            "manifest": self.manifest_path,
            "ok": self.ok,
            "recorded_version": self.recorded_version,
            "current_version": self.current_version,
            "version_status": self.version_status,
            "command": list(self.command),
            "outputs": [
                {"path": c.path, "status": c.status.value, "expected": c.expected, "actual": c.actual}
                for c in self.checks
            ],
            "config_drift": list(self.drift),
        }
