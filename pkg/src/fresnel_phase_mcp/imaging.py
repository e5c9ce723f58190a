"""Reading measured images and writing phase masks, reconstructions and traces."""

from __future__ import annotations

import csv
import struct
from pathlib import Path
from typing import Union

import numpy as np
from numpy.typing import NDArray
from PIL import Image, UnidentifiedImageError

from fresnel_phase_mcp.errors import ConfigurationError
from fresnel_phase_mcp.field_grid import RealArray
from fresnel_phase_mcp.gsa import ConvergenceTrace

PathLike = Union[str, Path]

PHASE_MAGIC = b"PHI1"
TRACE_HEADER = ("iteration", "corr_input", "corr_output")


def format_value(value: float) -> str:
    """Nine significant digits, shared by trace files and summaries."""
    return f"{value:.9g}"


def load_amplitude(path: PathLike, intensity: bool = True) -> RealArray:
    """Load a square 8-bit grayscale image (binary PGM or PNG) as amplitudes in ``[0, 1]``.

    With ``intensity`` the pixels are read as intensities and ``sqrt(pixel/255)``
    is returned, otherwise ``pixel/255``.
    """
    path = Path(path)
    try:
        with Image.open(path) as image:
            if image.mode != "L":
                raise ConfigurationError(f"{path} is not an 8-bit grayscale image (mode {image.mode})")
            pixels = np.asarray(image, dtype=np.float64)
    except (OSError, UnidentifiedImageError) as e:
        raise ConfigurationError(f"cannot read image {path}: {e}") from e
    if pixels.ndim != 2 or pixels.shape[0] != pixels.shape[1]:
        raise ConfigurationError(f"{path} is not square (shape {pixels.shape})")
    values = pixels / 255.0
    return np.sqrt(values) if intensity else values


def save_grayscale(pixels: NDArray[np.uint8], path: PathLike) -> Path:
    path = Path(path)
    try:
        Image.fromarray(np.ascontiguousarray(pixels, dtype=np.uint8)).save(path)
    except OSError as e:
        raise ConfigurationError(f"cannot write {path}: {e}") from e
    return path


def rescale_to_pixels(values: RealArray) -> NDArray[np.uint8]:
    """Map min..max of ``values`` linearly onto 0..255."""
    low = float(np.min(values))
    span = float(np.max(values)) - low
    if span == 0.0:
        return np.zeros(np.shape(values), dtype=np.uint8)
    return np.round(255.0 * (values - low) / span).astype(np.uint8)


def save_amplitude(amplitude: RealArray, path: PathLike) -> Path:
    return save_grayscale(rescale_to_pixels(amplitude), path)


def phase_to_pixels(phase: RealArray) -> NDArray[np.uint8]:
    """Map ``[-pi, pi)`` onto 0..255 by flooring, so a zero phase lands on 128."""
    scaled = np.floor((np.asarray(phase) + np.pi) / (2.0 * np.pi) * 256.0)
    return np.clip(scaled, 0, 255).astype(np.uint8)


def export_phase(phase: RealArray, path: PathLike) -> tuple[Path, Path]:
    """Write ``<path>.raw`` and a ``<path>.png`` visualization of a wrapped phase map.

    The raw file is ``PHI1``, a little-endian u32 side length, then row-major
    little-endian float32 samples.
    """
    phase = np.asarray(phase)
    if phase.ndim != 2 or phase.shape[0] != phase.shape[1]:
        raise ConfigurationError(f"phase map must be square (shape {phase.shape})")
    if phase.size and (phase.min() < -np.pi or phase.max() >= np.pi):
        raise ConfigurationError("phase map must be wrapped to [-pi, pi)")
    path = Path(path)
    raw_path = path.with_suffix(".raw")
    header = PHASE_MAGIC + struct.pack("<I", phase.shape[0])
    # values just below pi round up to float32(pi)
    samples = np.minimum(phase.astype("<f4"), np.nextafter(np.float32(np.pi), np.float32(0)))
    try:
        raw_path.write_bytes(header + samples.astype("<f4").tobytes(order="C"))
    except OSError as e:
        raise ConfigurationError(f"cannot write {raw_path}: {e}") from e
    png_path = save_grayscale(phase_to_pixels(phase), path.with_suffix(".png"))
    return raw_path, png_path


def read_phase(path: PathLike) -> NDArray[np.float32]:
    """Read a raw phase file written by :func:`export_phase`."""
    data = Path(path).read_bytes()
    if len(data) < 8 or data[:4] != PHASE_MAGIC:
        raise ConfigurationError(f"{path} is not a phase file")
    (side,) = struct.unpack("<I", data[4:8])
    if len(data) != 8 + 4 * side * side:
        raise ConfigurationError(f"{path} is truncated")
    return np.frombuffer(data, dtype="<f4", offset=8).reshape(side, side).astype(np.float32)


def write_trace(trace: ConvergenceTrace, path: PathLike) -> Path:
    path = Path(path)
    try:
        with open(path, "w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(TRACE_HEADER)
            for record in trace.records:
                writer.writerow(
                    (record.iteration, format_value(record.corr_input), format_value(record.corr_output))
                )
    except OSError as e:
        raise ConfigurationError(f"cannot write {path}: {e}") from e
    return path


def read_trace(path: PathLike) -> list[dict[str, str]]:
    with open(path, "r", newline="") as f:
        return list(csv.DictReader(f))
