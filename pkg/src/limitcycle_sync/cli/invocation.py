"""One CLI invocation: resolved settings, written files, timings and the manifest."""

from __future__ import annotations

import contextlib
import logging
import time
from collections.abc import Callable, Iterator
from pathlib import Path
from typing import Any, Optional

import numpy as np
import typer

from limitcycle_sync import __version__
from limitcycle_sync.config.settings import Settings, load_config
from limitcycle_sync.core.errors import ConfigError, SyncError
from limitcycle_sync.core.manifest_store import record_output, write_manifest
from limitcycle_sync.models.manifest import RunManifest
from limitcycle_sync.output.formatters import err_console
from limitcycle_sync.utils.csv_io import write_table
from limitcycle_sync.utils.hashing import config_digest

logger = logging.getLogger(__name__)

EXIT_CONFIG = 2
EXIT_SOLVER = 3


def fail(exc: SyncError) -> typer.Exit:
    """Print a diagnostic and return the matching exit."""
    if isinstance(exc, ConfigError):
        err_console.print(f"[red]config error:[/red] {exc}", markup=True, highlight=False)
        return typer.Exit(code=EXIT_CONFIG)
    where = exc.operation or "solver"
    err_console.print(f"[red]{type(exc).__name__}[/red] in {where}: {exc}", highlight=False)
    return typer.Exit(code=EXIT_SOLVER)


class Invocation:
    """Context manager wrapping a sub-command.

    Loads the layered configuration on entry; on a clean exit writes
    ``manifest.yaml`` next to the outputs. Library errors become exit codes.
    """

    def __init__(
        self,
        command: list[str],
        config_path: Optional[Path],
        overrides: dict[str, Any] | None = None,
        derived: Callable[[Settings], dict[str, Any]] | None = None,
    ):
        self.command = command
        self.config_path = config_path
        self.overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
        self.derived = derived
        self.settings: Settings
        self.manifest: RunManifest
        self._t0 = 0.0

    def __enter__(self) -> Invocation:
        self._t0 = time.perf_counter()
        try:
            self.settings = load_config(self.config_path, self.overrides)
            if self.derived is not None:
                self.settings.apply(self.derived(self.settings))
        except SyncError as exc:
            raise fail(exc) from exc
        values = self.settings.as_dict()
        self.manifest = RunManifest(
            tool_version=__version__,
            command=list(self.command),
            config=values,
            master_seed=int(values["seed"]),
            config_digest=config_digest(values),
        )
        return self

    def __exit__(self, exc_type, exc, tb) -> bool:
        if exc is None:
            self.manifest.timings[self.command[0]] = time.perf_counter() - self._t0
            write_manifest(self.manifest, self.out_dir)
            return False
        if isinstance(exc, SyncError):
            raise fail(exc) from exc
        return False

    @property
    def out_dir(self) -> Path:
        return self.settings.out_dir

    @property
    def format(self) -> str:
        return self.settings.get("output.format")

    def write_table(self, name: str, columns: dict[str, np.ndarray]) -> Path:
        path = write_table(self.out_dir / name, columns)
        record_output(self.manifest, path, self.out_dir)
        logger.debug("wrote %s", path)
        return path

    def write_text(self, name: str, text: str) -> Path:
        path = self.out_dir / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        record_output(self.manifest, path, self.out_dir)
        return path

    @contextlib.contextmanager
    def timed(self, stage: str) -> Iterator[None]:
        start = time.perf_counter()
        try:
            yield
        finally:
            self.manifest.timings[stage] = time.perf_counter() - start
