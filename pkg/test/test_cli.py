"""Tests for the retrieval command line."""

import numpy as np
from PIL import Image
from typer.testing import CliRunner

from fresnel_phase_mcp import gsa
from fresnel_phase_mcp.cli import EXIT_CONFIG, EXIT_DIVERGENCE, RunConfig, StrategyChoice, app, run
from fresnel_phase_mcp.field_grid import FieldGrid
from fresnel_phase_mcp.imaging import read_phase, read_trace

runner = CliRunner()


def retrieve_args(input_path, output_path, outdir, *extra):
    return [
        "retrieve",
        "--input", str(input_path),
        "--output", str(output_path),
        "--wavelength", "0.5",
        "--distance", "64",
        "--pitch", "1",
        "--outdir", str(outdir),
        *extra,
    ]


def test_retrieve_all_strategies(image_files, tmp_path):
    outdir = tmp_path / "out"
    args = retrieve_args(*image_files, outdir, "--strategy", "all", "--cmin", "0.1", "--cmax", "0.3", "--iterations", "5")
    result = runner.invoke(app, args)
    assert result.exit_code == 0, result.output

    for kind in ("zero", "constant", "variable"):
        folder = outdir / kind
        assert read_phase(folder / "phi1.raw").shape == (32, 32)
        assert read_phase(folder / "phi2.raw").shape == (32, 32)
        for name in ("phi1.png", "phi2.png", "recon_input.png", "recon_output.png"):
            assert (folder / name).is_file()
        assert len(read_trace(folder / "trace.csv")) == 5
    assert (outdir / "constant" / "sweep.csv").read_text().startswith("amplitude,corr_input\n")

    summary = (outdir / "summary.txt").read_text()
    assert "domain_side      32" in summary
    last = read_trace(outdir / "variable" / "trace.csv")[-1]
    variable_line = next(line for line in summary.splitlines() if line.startswith("variable"))
    assert last["corr_input"] in variable_line.split()
    assert last["corr_output"] in variable_line.split()


def test_retrieve_is_reproducible(image_files, tmp_path):
    outputs = []
    for name in ("first", "second"):
        outdir = tmp_path / name
        args = retrieve_args(*image_files, outdir, "--strategy", "zero", "--iterations", "4", "--seed", "11")
        assert runner.invoke(app, args).exit_code == 0
        outputs.append(((outdir / "zero" / "trace.csv").read_bytes(), (outdir / "zero" / "phi1.raw").read_bytes()))
    assert outputs[0] == outputs[1]


def test_zero_iterations_write_header_only(image_files, tmp_path):
    outdir = tmp_path / "out"
    args = retrieve_args(*image_files, outdir, "--strategy", "variable", "--iterations", "0")
    assert runner.invoke(app, args).exit_code == 0
    assert (outdir / "variable" / "trace.csv").read_text() == "iteration,corr_input,corr_output\n"
    assert "n/a" in (outdir / "summary.txt").read_text()


def test_size_mismatch_is_config_error(image_files, tmp_path, write_gray):
    small = write_gray(tmp_path / "small.png", np.arange(64).reshape(8, 8))
    result = runner.invoke(app, retrieve_args(image_files[0], small, tmp_path / "out", "--strategy", "zero"))
    assert result.exit_code == EXIT_CONFIG


def test_missing_image_is_config_error(image_files, tmp_path):
    result = runner.invoke(app, retrieve_args(tmp_path / "nope.pgm", image_files[1], tmp_path / "out"))
    assert result.exit_code == EXIT_CONFIG


def test_domain_too_small_is_config_error(image_files, tmp_path):
    args = retrieve_args(*image_files, tmp_path / "out", "--strategy", "zero")
    args[args.index("--distance") + 1] = "16"
    assert runner.invoke(app, args).exit_code == EXIT_CONFIG


def test_empty_sweep_is_config_error(image_files, tmp_path):
    args = retrieve_args(*image_files, tmp_path / "out", "--strategy", "constant", "--cmin", "0.5", "--cmax", "0.2")
    assert runner.invoke(app, args).exit_code == EXIT_CONFIG


def test_divergence_exit_status(image_files, tmp_path, monkeypatch):
    def exploding(u1, kernel):
        return FieldGrid.wrap(np.full(u1.samples.shape, np.inf, dtype=complex), u1.pitch)

    monkeypatch.setattr(gsa, "frt", exploding)
    config = RunConfig(
        input_image=image_files[0],
        output_image=image_files[1],
        wavelength=0.5,
        distance=64.0,
        strategy=StrategyChoice.VARIABLE,
        iterations=3,
        outdir=tmp_path / "out",
    )
    assert run(config) == EXIT_DIVERGENCE


def test_sampling_command():
    result = runner.invoke(app, ["sampling"])
    assert result.exit_code == 0
    assert "domain_side      950" in result.output
    assert "offset           219" in result.output


def test_negative_iterations_rejected(image_files, tmp_path):
    args = retrieve_args(*image_files, tmp_path / "out", "--iterations", "-1")
    assert runner.invoke(app, args).exit_code == EXIT_CONFIG


def test_log_file_receives_run_and_is_released(image_files, tmp_path):
    log_path = tmp_path / "run.log"
    args = retrieve_args(
        *image_files, tmp_path / "out", "--strategy", "zero", "--iterations", "2", "--log-file", str(log_path)
    )
    assert runner.invoke(app, args).exit_code == 0
    logged = log_path.read_bytes()
    assert b"fresnel_phase:cli_run" in logged

    # later runs no longer write to the file
    config = RunConfig(
        input_image=image_files[0],
        output_image=image_files[1],
        wavelength=0.5,
        distance=64.0,
        strategy=StrategyChoice.ZERO,
        iterations=2,
        outdir=tmp_path / "again",
    )
    assert run(config) == 0
    assert log_path.read_bytes() == logged


def test_full_input_reconstruction_written(image_files, tmp_path):
    outdir = tmp_path / "out"
    args = retrieve_args(*image_files, outdir, "--strategy", "variable", "--iterations", "3")
    assert runner.invoke(app, args).exit_code == 0
    with Image.open(outdir / "variable" / "recon_input_full.png") as image:
        assert image.size == (32, 32)
