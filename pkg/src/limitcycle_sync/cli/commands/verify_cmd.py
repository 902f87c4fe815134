"""lcsync verify <manifest> - Re-run a recorded invocation and compare output hashes."""

from __future__ import annotations

import logging
import tempfile
from pathlib import Path
from typing import Optional

import click
import typer
import yaml

from limitcycle_sync import __version__
from limitcycle_sync.cli.invocation import fail
from limitcycle_sync.cli.options import OutputOption
from limitcycle_sync.core.errors import ConfigError, SyncError
from limitcycle_sync.core.manifest_store import (
    compare_outputs,
    config_drift,
    load_manifest,
    version_status,
)
from limitcycle_sync.models.manifest import MANIFEST_NAME, CheckStatus, OutputCheck, RunManifest, VerifyReport
from limitcycle_sync.output.formatters import console, emit
from limitcycle_sync.output.tables import kv_panel, verify_table

logger = logging.getLogger(__name__)

app = typer.Typer(context_settings={"allow_interspersed_args": True})


def rerun(manifest: RunManifest, workdir: Path) -> tuple[int, Path]:
    """Invoke the recorded command with the recorded configuration; returns (exit code, output dir)."""
    from limitcycle_sync.cli.app import app as root_app

    config_path = workdir / "config.yaml"
    config_path.write_text(yaml.safe_dump(manifest.config, sort_keys=False), encoding="utf-8")
    out_dir = workdir / "out"
    args = [*manifest.command, "--config", str(config_path), "--out-dir", str(out_dir)]
    logger.debug("re-running: lcsync %s", " ".join(args))
    command = typer.main.get_command(root_app)
    try:
        with console.capture():
            code = command.main(args=args, prog_name="lcsync", standalone_mode=False)
    except click.ClickException as exc:
        raise ConfigError(f"recorded command is not valid: {exc.format_message()}", field="command") from exc
    return int(code or 0), out_dir


def extra_outputs(recorded: RunManifest, out_dir: Path) -> list[OutputCheck]:
    manifest_path = out_dir / MANIFEST_NAME
    if not manifest_path.is_file():
        return []
    current = load_manifest(manifest_path)
    return [
        OutputCheck(item.path, CheckStatus.EXTRA, actual=item.sha256)
        for item in current.outputs
        if recorded.output(item.path) is None
    ]


@app.callback(invoke_without_command=True)
def verify(
    manifest_path: Path = typer.Argument(help="manifest.yaml or the directory holding it"),
    output: Optional[str] = OutputOption,
) -> None:
    """Bit-reproducibility check of every file a manifest lists."""
    fmt = output or "table"
    try:
        manifest = load_manifest(manifest_path)
    except SyncError as exc:
        raise fail(exc) from exc

    status = version_status(manifest)
    with tempfile.TemporaryDirectory(prefix="lcsync-verify-") as tmp:
        try:
            code, out_dir = rerun(manifest, Path(tmp))
        except SyncError as exc:
            raise fail(exc) from exc
        if code != 0:
            logger.warning("re-run exited with code %d", code)
        checks = compare_outputs(manifest, out_dir) + extra_outputs(manifest, out_dir)
        drift: list[str] = []
        if (out_dir / MANIFEST_NAME).is_file():
            drift = config_drift(manifest.config, load_manifest(out_dir).config)

    report = VerifyReport(
        manifest_path=str(manifest_path),
        recorded_version=manifest.tool_version,
        current_version=__version__,
        version_status=status,
        command=manifest.command,
        checks=checks,
        drift=drift,
    )

    def render():
        items = [verify_table(report)]
        summary = {
            "Result": "[green]reproduced[/green]" if report.ok else "[red]differs[/red]",
            "Outputs": report.summary,
            "Versions": f"{report.recorded_version} -> {report.current_version} ({report.version_status})",
        }
        items.append(kv_panel("Verify", summary, border="green" if report.ok else "red"))
        if report.drift:
            items.append(kv_panel("Configuration drift", {str(i + 1): d for i, d in enumerate(report.drift)},
                                  border="yellow"))
        return items

    emit(report.to_dict(), fmt, render)
    if not report.ok:
        raise typer.Exit(code=1)
