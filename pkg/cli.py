"""CLI interface for the oamsim toolkit."""
import json
from pathlib import Path
from typing import Any, Dict, Optional

import typer
from rich.console import Console
from rich.panel import Panel
from rich.progress import Progress, SpinnerColumn, TextColumn
from rich.table import Table

from oamsim.core.exceptions import OamSimError, ReportError, ScenarioError
from oamsim.core.orchestrator import ScenarioOrchestrator
from oamsim.core.parameters import ExperimentConfig, apply_patch, load_config, serialize_config
from oamsim.models.report import RunReport, Scenario
from oamsim.reporting.report_generator import ReportGenerator
from oamsim.simulation.detection import export_clicks_csv
from oamsim.utils.logger import add_file_handler, set_level
from config import settings

app = typer.Typer(help="Heralded OAM single-photon source simulator.")
console = Console()

ConfigOption = typer.Option(None, "--config", "-c", help="Experiment config (TOML)")
SeedOption = typer.Option(0, "--seed", "-s", help="Run seed")
OutOption = typer.Option(None, "--out", "-o", help="Report path (suffix is replaced)")
FormatOption = typer.Option("json", "--format", "-f", help="json, or csv to add the histogram/table")
WorkersOption = typer.Option(None, "--workers", "-w", help="Worker processes")
PulsesOption = typer.Option(None, "--pulses", help="Override the simulated pulse count")
DebugOption = typer.Option(False, "--debug", help="Debug logging and per-projection output")


def _load(config_path: Optional[Path]) -> ExperimentConfig:
    return load_config(config_path) if config_path else ExperimentConfig()


def _fail(error: OamSimError):
    """Machine-readable error on stderr, exit with the category code."""
    typer.echo(json.dumps({"error": error.category, "message": str(error)}), err=True)
    raise typer.Exit(code=error.exit_code)


def _execute(
    scenario: Scenario,
    config_path: Optional[Path],
    out: Optional[Path],
    fmt: str,
    workers: Optional[int],
    debug: bool
) -> RunReport:
    if debug or settings.debug_mode:
        set_level("DEBUG")
    else:
        set_level(settings.log_level)

    try:
        if settings.log_file:
            try:
                add_file_handler(settings.log_file)
            except OSError as e:
                raise ReportError(f"cannot open log file {settings.log_file}: {e}") from e
        config = _load(config_path)
        orchestrator = ScenarioOrchestrator(
            config,
            workers=workers or settings.workers,
            block_pulses=settings.block_pulses,
            debug=debug or settings.debug_mode
        )
        with Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            console=console,
            transient=True
        ) as progress:
            progress.add_task(f"[cyan]Running {scenario.kind.value}...", total=None)
            report = orchestrator.run_scenario(scenario)

        generator = ReportGenerator()
        display_report(report, generator.summary(report))
        if out:
            for path in generator.emit_report(report, fmt, out):
                console.print(f"[green]✓[/green] Written: {path}")
        return report
    except OamSimError as e:
        _fail(e)


def _overrides(pulses: Optional[int], **extra: Any) -> Dict[str, Any]:
    overrides = {k: v for k, v in extra.items() if v is not None}
    if pulses is not None:
        overrides["pulses"] = pulses
    return overrides


@app.command()
def run(
    scenario: str = typer.Option("sww_only", "--scenario", help="sww_only or oam_run"),
    charge: Optional[int] = typer.Option(None, "--charge", "-l", help="OAM charge for oam_run"),
    config: Optional[Path] = ConfigOption,
    seed: int = SeedOption,
    out: Optional[Path] = OutOption,
    fmt: str = FormatOption,
    workers: Optional[int] = WorkersOption,
    pulses: Optional[int] = PulsesOption,
    clicks: Optional[Path] = typer.Option(None, "--clicks", help="Write the time-tagged clicks of both arms (CSV)"),
    debug: bool = DebugOption
):
    """Simulate a coincidence measurement (silicon wire only, or one OAM charge)."""
    if scenario not in ("sww_only", "oam_run"):
        _fail(ScenarioError(f"run supports sww_only and oam_run, got '{scenario}'"))
    try:
        job = Scenario(kind=scenario, charge=charge, seed=seed, overrides=_overrides(pulses))
    except OamSimError as e:
        _fail(e)
    report = _execute(job, config, out, fmt, workers, debug)

    if clicks:
        signal, idler = report.clicks
        try:
            # origin column (pair/dark) only in debug mode
            export_clicks_csv(signal, idler, clicks, debug=debug or settings.debug_mode)
        except OamSimError as e:
            _fail(e)
        console.print(f"[green]✓[/green] Clicks written: {clicks}")


@app.command()
def sweep(
    voltage: float = typer.Option(0.0, "--voltage", "-v", help="Heater voltage"),
    start: float = typer.Option(1540.0, "--start", help="Grid start (nm)"),
    stop: float = typer.Option(1560.0, "--stop", help="Grid stop (nm)"),
    step: float = typer.Option(0.001, "--step", help="Grid step (nm)"),
    config: Optional[Path] = ConfigOption,
    seed: int = SeedOption,
    out: Optional[Path] = OutOption,
    fmt: str = FormatOption,
    workers: Optional[int] = WorkersOption,
    debug: bool = DebugOption
):
    """Sample the bus transmission spectrum at a fixed heater voltage."""
    job = Scenario(kind="spectrum_sweep", seed=seed, overrides={"voltage_v": voltage, "grid": [start, stop, step]})
    _execute(job, config, out, fmt, workers, debug)


@app.command()
def tomography(
    charge: int = typer.Option(..., "--charge", "-l", help="OAM charge"),
    shots: int = typer.Option(1_000_000, "--shots", help="Photons per phase mask (0 for noiseless)"),
    config: Optional[Path] = ConfigOption,
    seed: int = SeedOption,
    out: Optional[Path] = OutOption,
    fmt: str = FormatOption,
    workers: Optional[int] = WorkersOption,
    debug: bool = DebugOption
):
    """Measure mode purity with the 15 phase masks."""
    try:
        job = Scenario(kind="tomography", charge=charge, seed=seed, overrides={"shots": shots or None})
    except OamSimError as e:
        _fail(e)
    _execute(job, config, out, fmt, workers, debug)


@app.command()
def calibrate(
    config: Optional[Path] = ConfigOption,
    seed: int = SeedOption,
    out: Optional[Path] = OutOption,
    workers: Optional[int] = WorkersOption,
    write_config: Optional[Path] = typer.Option(None, "--write-config", help="Save the calibrated config (TOML)"),
    debug: bool = DebugOption
):
    """Fit pair rate, dark counts and heater resistance to the published aggregates."""
    report = _execute(Scenario(kind="calibrate", seed=seed), config, out, "json", workers, debug)
    if write_config:
        calibrated = apply_patch(_load(config), report.calibration["patch"])
        try:
            write_config.write_text(serialize_config(calibrated), encoding="utf-8")
        except OSError as e:
            _fail(ReportError(f"cannot write {write_config}: {e}"))
        console.print(f"[green]✓[/green] Calibrated config saved to: {write_config}")


def display_report(report: RunReport, summary: Dict[str, Any]):
    """Display headline numbers in a table."""
    console.print(Panel.fit(
        f"[bold blue]oamsim[/bold blue] {report.scenario.kind.value}",
        border_style="blue"
    ))

    table = Table(show_header=True, header_style="bold magenta")
    table.add_column("Quantity", style="cyan")
    table.add_column("Value", justify="right")
    for key, value in summary.items():
        table.add_row(key, str(value))
    console.print(table)

    projections = report.details.get("projections")
    if projections:
        console.print("\n[bold]Circular projections:[/bold]")
        for hand, values in projections.items():
            console.print(f"  {hand}: l={values['charge']} CC={values['cc']}")


if __name__ == "__main__":
    app()
