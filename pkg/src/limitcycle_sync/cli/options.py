"""Shared CLI options."""

from __future__ import annotations

from pathlib import Path
from typing import Optional

import typer

OutputOption = typer.Option(None, "--output", "-o", help="Output format: table, json, yaml")
ConfigOption: Optional[Path] = typer.Option(None, "--config", "-c", help="YAML configuration file")
OutDirOption: Optional[Path] = typer.Option(None, "--out-dir", help="Directory for CSV files and the manifest")
SeedOption: Optional[int] = typer.Option(None, "--seed", help="Master seed")
ThreadsOption: Optional[int] = typer.Option(
    None, "--threads", help="Worker processes (default: LCSYNC_THREADS or 1); never changes results",
)
Gamma1Option: Optional[float] = typer.Option(None, "--gamma1", help="Linear gain rate")
Gamma2Option: Optional[float] = typer.Option(None, "--gamma2", help="Two-photon loss rate")
DOption: Optional[float] = typer.Option(None, "--D", help="Dissipative coupling rate")
DeltaOption: Optional[float] = typer.Option(None, "--delta", help="Detuning omega1 - omega2 around the mean frequency")
PhotonsOption: Optional[float] = typer.Option(
    None, "--photons", help="Photon number n = gamma1 / (2 gamma2); sets gamma2",
)


def common_overrides(
    out_dir: Optional[Path] = None,
    seed: Optional[int] = None,
    threads: Optional[int] = None,
    output: Optional[str] = None,
) -> dict[str, object]:
    return {
        "output.dir": str(out_dir) if out_dir is not None else None,
        "seed": seed,
        "threads": threads,
        "output.format": output,
    }


def pair_derived(
    delta: Optional[float] = None,
    photons: Optional[float] = None,
    section: str = "pair",
    gamma2_key: Optional[str] = None,
):
    """Overrides that need the resolved config: detuning around the mean, gamma2 from n."""

    def derive(settings) -> dict[str, object]:
        pair = settings.section("pair")
        out: dict[str, object] = {}
        if delta is not None:
            mean = 0.5 * (pair["omega1"] + pair["omega2"])
            out["pair.omega1"] = mean + 0.5 * delta
            out["pair.omega2"] = mean - 0.5 * delta
        if photons is not None:
            out[gamma2_key or f"{section}.gamma2"] = settings.get(f"{section}.gamma1") / (2.0 * photons)
        return out

    return derive
