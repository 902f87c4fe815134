"""Root Typer application, mounts sub-commands."""

from __future__ import annotations

import logging

import typer
from rich.console import Console
from rich.logging import RichHandler

from limitcycle_sync import __version__

app = typer.Typer(
    name="lcsync",
    help="limitcycle-sync - Synchronization and quantum phase diffusion of coupled limit-cycle oscillators.",
    no_args_is_help=True,
)


def configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False, rich_tracebacks=False)],
        force=True,
    )


def _version(value: bool) -> None:
    if value:
        typer.echo(f"limitcycle-sync {__version__}")
        raise typer.Exit()


@app.callback()
def root(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log solver progress at DEBUG level"),
    version: bool = typer.Option(False, "--version", callback=_version, is_eager=True, help="Show the version"),
) -> None:
    configure_logging(verbose)


def _register_commands() -> None:
    from limitcycle_sync.cli.commands.saddle_cmd import app as saddle_app
    from limitcycle_sync.cli.commands.simulate_cmd import app as simulate_app
    from limitcycle_sync.cli.commands.ensemble_cmd import app as ensemble_app
    from limitcycle_sync.cli.commands.fp_cmd import app as fp_app
    from limitcycle_sync.cli.commands.diffusion_cmd import app as diffusion_app
    from limitcycle_sync.cli.commands.scan_cmd import app as scan_app
    from limitcycle_sync.cli.commands.lindblad_cmd import app as lindblad_app
    from limitcycle_sync.cli.commands.reproduce_cmd import app as reproduce_app
    from limitcycle_sync.cli.commands.verify_cmd import app as verify_app

    app.add_typer(saddle_app, name="saddle", help="Solve the saddle-point (limit-cycle) equations")
    app.add_typer(simulate_app, name="simulate", help="Integrate one seeded Langevin trajectory")
    app.add_typer(ensemble_app, name="ensemble", help="Run a seeded trajectory ensemble")
    app.add_typer(fp_app, name="fp", help="Stationary phase distribution of the noisy Adler equation")
    app.add_typer(diffusion_app, name="diffusion", help="Effective phase-difference diffusion")
    app.add_typer(scan_app, name="scan", help="Detuning or frequency scans")
    app.add_typer(lindblad_app, name="lindblad", help="Lindblad master-equation oracle")
    app.add_typer(reproduce_app, name="reproduce", help="Emit the data behind a figure panel")
    app.add_typer(verify_app, name="verify", help="Re-run a manifest and compare output hashes")


_register_commands()


def main() -> None:
    app()
