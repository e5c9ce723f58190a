"""Shared fixtures: small optical setups and synthetic image files."""

from pathlib import Path

import numpy as np
import pytest
from PIL import Image

from fresnel_phase_mcp.presets import desk_setup, image_pair, self_consistent_pair


def write_gray(path: Path, pixels: np.ndarray) -> Path:
    """Write an 8-bit grayscale image; the suffix picks PNG or PGM."""
    Image.fromarray(np.asarray(pixels, dtype=np.uint8)).save(path)
    return path


def intensity_pixels(amplitude: np.ndarray) -> np.ndarray:
    return np.round(255.0 * np.asarray(amplitude) ** 2).astype(np.uint8)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def small_setup():
    """32 x 32 image in a 64 x 64 domain with an exact Fresnel sample count."""
    return desk_setup(32)


@pytest.fixture
def consistent_problem_data():
    """Self-consistent 64 x 64 pair inside a 128 x 128 domain."""
    setup = desk_setup(64)
    a1, a2, _ = self_consistent_pair(setup, seed=3)
    return setup, a1, a2


@pytest.fixture
def image_files(tmp_path):
    """A PGM input and a PNG output image, 16 x 16."""
    first, second = image_pair(16, seed=5)
    input_path = write_gray(tmp_path / "input.pgm", intensity_pixels(first))
    output_path = write_gray(tmp_path / "output.png", intensity_pixels(second))
    return input_path, output_path


@pytest.fixture(name="write_gray")
def write_gray_fixture():
    """The grayscale image writer, for tests that build their own files."""
    return write_gray
