"""Write, load and compare run manifests."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

import yaml
from deepdiff import DeepDiff

from limitcycle_sync import __version__
from limitcycle_sync.core.errors import ConfigError
from limitcycle_sync.models.manifest import (
    MANIFEST_NAME,
    CheckStatus,
    OutputCheck,
    OutputFile,
    RunManifest,
)
from limitcycle_sync.utils.hashing import sha256_file
from limitcycle_sync.utils.version_compare import classify_difference

logger = logging.getLogger(__name__)

# Paths that legitimately differ between a run and its re-run.
VOLATILE_CONFIG_PATHS = ["root['output']['dir']", "root['threads']"]


def record_output(manifest: RunManifest, path: Path, root: Path) -> OutputFile:
    item = OutputFile(
        path=path.relative_to(root).as_posix(),
        sha256=sha256_file(path),
        size=path.stat().st_size,
    )
    manifest.outputs.append(item)
    return item


def write_manifest(manifest: RunManifest, out_dir: Path) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / MANIFEST_NAME
    path.write_text(yaml.safe_dump(manifest.to_dict(), sort_keys=False), encoding="utf-8")
    logger.debug("manifest written to %s (%d outputs)", path, len(manifest.outputs))
    return path


def load_manifest(path: Path | str) -> RunManifest:
    path = Path(path)
    if path.is_dir():
        path = path / MANIFEST_NAME
    if not path.is_file():
        raise ConfigError(f"manifest not found: {path}", field="manifest")
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError(str(exc), field="manifest", line=mark.line + 1 if mark is not None else None)
    if not isinstance(data, dict) or "command" not in data or "config" not in data:
        raise ConfigError("not a run manifest (needs command and config)", field="manifest")
    return RunManifest.from_dict(data)


def compare_outputs(recorded: RunManifest, rerun_dir: Path) -> list[OutputCheck]:
    """Hash every recorded output against its counterpart under ``rerun_dir``."""
    checks: list[OutputCheck] = []
    for item in recorded.outputs:
        candidate = rerun_dir / item.path
        if not candidate.is_file():
            checks.append(OutputCheck(item.path, CheckStatus.MISSING, expected=item.sha256))
            continue
        actual = sha256_file(candidate)
        status = CheckStatus.MATCH if actual == item.sha256 else CheckStatus.MISMATCH
        checks.append(OutputCheck(item.path, status, expected=item.sha256, actual=actual))
    return checks


def config_drift(recorded: dict[str, Any], current: dict[str, Any]) -> list[str]:
    """Readable differences between two resolved configurations."""
    diff = DeepDiff(recorded, current, exclude_paths=VOLATILE_CONFIG_PATHS, verbose_level=2)
    return format_diff(diff) if diff else []


def format_diff(diff: DeepDiff) -> list[str]:
    details: list[str] = []
    for path, change in diff.get("values_changed", {}).items():
        details.append(f"Changed {path}: {change.get('old_value')!r} -> {change.get('new_value')!r}")
    for path, change in diff.get("type_changes", {}).items():
        details.append(f"Type changed {path}: {change.get('old_value')!r} -> {change.get('new_value')!r}")
    for path in diff.get("dictionary_item_added", {}):
        details.append(f"Added: {path}")
    for path in diff.get("dictionary_item_removed", {}):
        details.append(f"Removed: {path}")
    for path in diff.get("iterable_item_added", {}):
        details.append(f"List item added: {path}")
    for path in diff.get("iterable_item_removed", {}):
        details.append(f"List item removed: {path}")
    return details or ["Differences detected (see raw diff)"]


def version_status(manifest: RunManifest) -> str:
    status = classify_difference(manifest.tool_version, __version__)
    if status != "same":
        logger.warning(
            "manifest written by version %s, running %s (%s)", manifest.tool_version, __version__, status,
        )
    return status
