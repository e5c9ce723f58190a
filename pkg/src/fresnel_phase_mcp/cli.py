#!/usr/bin/env python3
"""Command-line entry point: retrieve phase masks between two grayscale images."""

from __future__ import annotations

import os
from collections.abc import Iterator
from contextlib import contextmanager
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Annotated, Optional

import typer
from eliot import FileDestination, add_destinations, remove_destination, start_action

from fresnel_phase_mcp.errors import ConfigurationError, DivergenceError
from fresnel_phase_mcp.field_grid import OpticalSetup
from fresnel_phase_mcp.fresnel import optical_setup, setup_sampling_distance
from fresnel_phase_mcp.gsa import (
    RetrievalProblem,
    StrategyRow,
    compare_strategies,
    run_mgsa,
    sweep_constant,
    sweep_values,
)
from fresnel_phase_mcp.imaging import (
    export_phase,
    format_value,
    load_amplitude,
    save_amplitude,
    write_trace,
)
from fresnel_phase_mcp.padding import PaddingKind, PaddingStrategy
from fresnel_phase_mcp.presets import (
    DEFAULT_ITERATIONS,
    DEFAULT_SEED,
    DEFAULT_SWEEP_MAX,
    DEFAULT_SWEEP_MIN,
    DEFAULT_SWEEP_STEP,
    REFERENCE_DISTANCE,
    REFERENCE_PITCH,
    REFERENCE_WAVELENGTH,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGENCE = 3

DEFAULT_OUTPUT_DIR = os.getenv("FRESNEL_PHASE_OUTPUT_DIR", "fresnel_phase_output")
DEFAULT_WORKERS = int(os.getenv("FRESNEL_PHASE_WORKERS", "1"))


class StrategyChoice(str, Enum):
    ZERO = "zero"
    CONSTANT = "constant"
    VARIABLE = "variable"
    ALL = "all"


@dataclass(frozen=True)
class RunConfig:
    input_image: Path
    output_image: Path
    wavelength: float = REFERENCE_WAVELENGTH
    distance: float = REFERENCE_DISTANCE
    pitch: float = REFERENCE_PITCH
    strategy: StrategyChoice = StrategyChoice.ALL
    c_min: float = DEFAULT_SWEEP_MIN
    c_max: float = DEFAULT_SWEEP_MAX
    c_step: float = DEFAULT_SWEEP_STEP
    iterations: int = DEFAULT_ITERATIONS
    seed: int = DEFAULT_SEED
    outdir: Path = Path(DEFAULT_OUTPUT_DIR)
    intensity_input: bool = True
    workers: int = DEFAULT_WORKERS
    tolerance: Optional[float] = None
    correlate_intensity: bool = False

    def __post_init__(self) -> None:
        for path in (self.input_image, self.output_image):
            if not Path(path).is_file():
                raise ConfigurationError(f"image not found: {path}")
        if self.wavelength <= 0 or self.distance <= 0 or self.pitch <= 0:
            raise ConfigurationError("wavelength, distance and pitch must be positive")
        if self.iterations < 0:
            raise ConfigurationError(f"iterations must be >= 0 (got {self.iterations})")
        if self.workers < 1:
            raise ConfigurationError(f"workers must be >= 1 (got {self.workers})")
        if self.strategy in (StrategyChoice.CONSTANT, StrategyChoice.ALL):
            sweep_values(self.c_min, self.c_max, self.c_step)


def build_problem(config: RunConfig) -> RetrievalProblem:
    a1 = load_amplitude(config.input_image, config.intensity_input)
    a2 = load_amplitude(config.output_image, config.intensity_input)
    if a1.shape != a2.shape:
        raise ConfigurationError(f"image sizes differ: {a1.shape} vs {a2.shape}")
    setup = optical_setup(config.wavelength, config.distance, config.pitch, a1.shape[0])
    return RetrievalProblem(
        a1=a1,
        a2=a2,
        setup=setup,
        strategy=PaddingStrategy.variable(),
        iterations=config.iterations,
        seed=config.seed,
        tolerance=config.tolerance,
        correlate_intensity=config.correlate_intensity,
    )


def execute(config: RunConfig, problem: RetrievalProblem) -> list[StrategyRow]:
    sweep_args = (config.c_min, config.c_max, config.c_step)
    if config.strategy is StrategyChoice.ALL:
        return compare_strategies(problem, *sweep_args, workers=config.workers)
    if config.strategy is StrategyChoice.CONSTANT:
        sweep = sweep_constant(problem, *sweep_args, workers=config.workers)
        return [StrategyRow(PaddingKind.CONSTANT, sweep.best_c, sweep.best, sweep.total_iterations, sweep)]
    strategy = PaddingStrategy.zero() if config.strategy is StrategyChoice.ZERO else PaddingStrategy.variable()
    result = run_mgsa(problem.with_strategy(strategy))
    return [StrategyRow(strategy.kind, None, result, result.iterations)]


def write_outputs(row: StrategyRow, outdir: Path) -> list[Path]:
    """Write phase masks, reconstructions and the trace of one strategy into ``outdir/<strategy>``."""
    target = outdir / row.kind.value
    target.mkdir(parents=True, exist_ok=True)
    result = row.result
    written = [
        *export_phase(result.phi1, target / "phi1"),
        *export_phase(result.phi2, target / "phi2"),
        save_amplitude(result.recon_input, target / "recon_input.png"),
        save_amplitude(result.recon_output, target / "recon_output.png"),
        save_amplitude(result.back_final.amplitude, target / "recon_input_full.png"),
        save_amplitude(result.u2_final.amplitude, target / "recon_output_full.png"),
        write_trace(result.trace, target / "trace.csv"),
    ]
    if row.sweep is not None:
        sweep_path = target / "sweep.csv"
        lines = ["amplitude,corr_input"]
        lines += [f"{c:g},{format_value(score)}" for c, score in row.sweep.scores]
        sweep_path.write_text("\n".join(lines) + "\n")
        written.append(sweep_path)
    return written


def _cell(value: Optional[float]) -> str:
    return "n/a" if value is None else format_value(value)


def format_summary(setup: OpticalSetup, rows: list[StrategyRow]) -> str:
    lines = [
        f"wavelength_um    {setup.wavelength:g}",
        f"distance_um      {setup.distance:g}",
        f"pitch_um         {setup.pitch:g}",
        f"image_side       {setup.image_side}",
        f"domain_side      {setup.domain_side}",
        f"image_width_um   {setup.image_width:g}",
        f"domain_width_um  {setup.domain_width:g}",
        f"offset           {setup.offset}",
        f"sampling_z_um    {setup_sampling_distance(setup):.6f}",
        "",
        "strategy  padding  corr_input  corr_output  max_error_percent  iterations",
    ]
    for row in rows:
        padding = "-" if row.padding_amplitude is None else f"{row.padding_amplitude:g}"
        lines.append(
            f"{row.kind.value}  {padding}  {_cell(row.corr_input)}  {_cell(row.corr_output)}  "
            f"{format_value(row.result.final_max_error_percent)}  {row.total_iterations}"
        )
    return "\n".join(lines) + "\n"


def run(config: RunConfig) -> int:
    """Run the configured retrieval, write every output and return a process exit status."""
    with start_action(action_type="fresnel_phase:cli_run", strategy=config.strategy.value) as action:
        try:
            problem = build_problem(config)
            rows = execute(config, problem)
            config.outdir.mkdir(parents=True, exist_ok=True)
            for row in rows:
                write_outputs(row, config.outdir)
            summary = format_summary(problem.setup, rows)
            (config.outdir / "summary.txt").write_text(summary)
        except ConfigurationError as e:
            typer.echo(f"Configuration error: {e}", err=True)
            action.add_success_fields(exit_status=EXIT_CONFIG)
            return EXIT_CONFIG
        except DivergenceError as e:
            typer.echo(f"Numerical divergence: {e}", err=True)
            action.add_success_fields(exit_status=EXIT_DIVERGENCE)
            return EXIT_DIVERGENCE
        typer.echo(summary, nl=False)
        action.add_success_fields(exit_status=EXIT_OK)
        return EXIT_OK


@contextmanager
def log_destination(path: Optional[Path]) -> Iterator[None]:
    """Send eliot messages to ``path`` (JSON lines, appended) until the block exits."""
    if path is None:
        yield
        return
    with open(path, "ab") as f:
        destination = FileDestination(file=f)
        add_destinations(destination)
        try:
            yield
        finally:
            remove_destination(destination)


app = typer.Typer(help="Fresnel-domain phase retrieval with zero, constant and variable padding")


@app.command()
def retrieve(
    input_image: Annotated[Path, typer.Option("--input", help="Input-plane 8-bit grayscale image (PGM or PNG)")],
    output_image: Annotated[Path, typer.Option("--output", help="Output-plane 8-bit grayscale image (PGM or PNG)")],
    wavelength: Annotated[float, typer.Option(help="Wavelength in micrometres")] = REFERENCE_WAVELENGTH,
    distance: Annotated[float, typer.Option(help="Propagation distance in micrometres")] = REFERENCE_DISTANCE,
    pitch: Annotated[float, typer.Option(help="Pixel pitch in micrometres")] = REFERENCE_PITCH,
    strategy: Annotated[StrategyChoice, typer.Option(help="Padding strategy")] = StrategyChoice.ALL,
    cmin: Annotated[float, typer.Option("--cmin", help="Smallest constant padding amplitude")] = DEFAULT_SWEEP_MIN,
    cmax: Annotated[float, typer.Option("--cmax", help="Largest constant padding amplitude")] = DEFAULT_SWEEP_MAX,
    cstep: Annotated[float, typer.Option("--cstep", help="Constant padding sweep step")] = DEFAULT_SWEEP_STEP,
    iterations: Annotated[int, typer.Option(help="Iterations per retrieval")] = DEFAULT_ITERATIONS,
    seed: Annotated[int, typer.Option(help="Seed of the random start phase")] = DEFAULT_SEED,
    outdir: Annotated[Path, typer.Option(help="Output directory")] = Path(DEFAULT_OUTPUT_DIR),
    intensity_input: Annotated[
        bool,
        typer.Option("--intensity-input/--amplitude-input", help="Read pixels as intensity (sqrt applied) or amplitude"),
    ] = True,
    workers: Annotated[int, typer.Option(help="Threads for independent sweep members")] = DEFAULT_WORKERS,
    tolerance: Annotated[Optional[float], typer.Option(help="Stop early below this relative field change")] = None,
    correlate_intensity: Annotated[bool, typer.Option(help="Correlate intensities instead of amplitudes")] = False,
    log_file: Annotated[Optional[Path], typer.Option(help="Append eliot JSON log messages to this file")] = None,
):
    """Retrieve the phase masks transferring the input image into the output image."""
    try:
        config = RunConfig(
            input_image=input_image,
            output_image=output_image,
            wavelength=wavelength,
            distance=distance,
            pitch=pitch,
            strategy=strategy,
            c_min=cmin,
            c_max=cmax,
            c_step=cstep,
            iterations=iterations,
            seed=seed,
            outdir=outdir,
            intensity_input=intensity_input,
            workers=workers,
            tolerance=tolerance,
            correlate_intensity=correlate_intensity,
        )
    except ConfigurationError as e:
        typer.echo(f"Configuration error: {e}", err=True)
        raise typer.Exit(EXIT_CONFIG)
    with log_destination(log_file):
        status = run(config)
    if status != EXIT_OK:
        raise typer.Exit(status)


@app.command()
def sampling(
    wavelength: Annotated[float, typer.Option(help="Wavelength in micrometres")] = REFERENCE_WAVELENGTH,
    distance: Annotated[float, typer.Option(help="Propagation distance in micrometres")] = REFERENCE_DISTANCE,
    pitch: Annotated[float, typer.Option(help="Pixel pitch in micrometres")] = REFERENCE_PITCH,
    image_side: Annotated[int, typer.Option(help="Image side in pixels")] = 512,
):
    """Print the Fresnel computational domain for the given physics."""
    try:
        setup = optical_setup(wavelength, distance, pitch, image_side)
    except ConfigurationError as e:
        typer.echo(f"Configuration error: {e}", err=True)
        raise typer.Exit(EXIT_CONFIG)
    z_ft = setup_sampling_distance(setup)
    typer.echo(f"domain_side      {setup.domain_side}")
    typer.echo(f"domain_width_um  {setup.domain_width:g}")
    typer.echo(f"offset           {setup.offset}")
    typer.echo(f"sampling_z_um    {z_ft:.6f}")
    typer.echo(f"sampling_error   {abs(z_ft - distance) / distance:.3e}")


if __name__ == "__main__":
    app()
