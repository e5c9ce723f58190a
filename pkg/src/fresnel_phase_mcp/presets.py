# ==================== OPTICAL PRESETS AND SYNTHETIC TEST IMAGES ====================
# Parameters used for every simulation of the reference experiment, plus
# deterministic image generators standing in for measured intensity pairs.

from __future__ import annotations

import numpy as np

from fresnel_phase_mcp.field_grid import OpticalSetup, RealArray, crop, embed
from fresnel_phase_mcp.fresnel import build_kernel, frt, optical_setup

# HeNe wavelength, 1 um pixels, 1.5 mm propagation, 512 x 512 images -> N = 950
REFERENCE_WAVELENGTH = 0.633
REFERENCE_DISTANCE = 1500.0
REFERENCE_PITCH = 1.0
REFERENCE_IMAGE_SIDE = 512

DEFAULT_ITERATIONS = 100
DEFAULT_SEED = 0

# Constant-padding sweep [0.1, 1.0] in steps of 0.1
DEFAULT_SWEEP_MIN = 0.1
DEFAULT_SWEEP_MAX = 1.0
DEFAULT_SWEEP_STEP = 0.1

DESK_WAVELENGTH = 0.5
DESK_PITCH = 1.0


def reference_setup() -> OpticalSetup:
    return optical_setup(REFERENCE_WAVELENGTH, REFERENCE_DISTANCE, REFERENCE_PITCH, REFERENCE_IMAGE_SIDE)


def desk_setup(image_side: int, padding_factor: float = 2.0) -> OpticalSetup:
    """Small setup whose distance makes ``lambda*z/dx**2`` an exact even sample count.

    The domain is about ``padding_factor`` times wider than the image.
    """
    side = max(image_side, 2 * round(image_side * padding_factor / 2))
    distance = side * DESK_PITCH**2 / DESK_WAVELENGTH
    return optical_setup(DESK_WAVELENGTH, distance, DESK_PITCH, image_side)


def smooth_image(side: int, seed: int, blobs: int = 6, floor: float = 0.15) -> RealArray:
    """Sum of random Gaussian blobs over a floor, scaled to ``[floor, 1]``."""
    rng = np.random.default_rng(seed)
    y, x = np.mgrid[0:side, 0:side] / max(side - 1, 1)
    image = np.zeros((side, side))
    for _ in range(blobs):
        cx, cy = rng.uniform(0.1, 0.9, size=2)
        width = rng.uniform(0.05, 0.25)
        height = rng.uniform(0.3, 1.0)
        image += height * np.exp(-((x - cx) ** 2 + (y - cy) ** 2) / (2 * width**2))
    image -= image.min()
    return floor + (1.0 - floor) * image / image.max()


def pattern_image(side: int) -> RealArray:
    """Concentric rings crossed by vertical bars, scaled to ``[0.1, 1]``."""
    y, x = np.mgrid[0:side, 0:side] - (side - 1) / 2
    radius = np.hypot(x, y) / max(side, 1)
    rings = 0.5 + 0.5 * np.cos(2 * np.pi * 6 * radius)
    bars = (np.floor(8 * (x + side / 2) / side) % 2).astype(np.float64)
    image = 0.6 * rings + 0.4 * bars
    image -= image.min()
    return 0.1 + 0.9 * image / image.max()


def image_pair(side: int, seed: int = DEFAULT_SEED) -> tuple[RealArray, RealArray]:
    """Two unrelated amplitude images for an input/output retrieval."""
    first = smooth_image(side, seed)
    second = 0.5 * smooth_image(side, seed + 7919, blobs=9) + 0.5 * pattern_image(side)
    return first, second


def self_consistent_pair(setup: OpticalSetup, seed: int = DEFAULT_SEED) -> tuple[RealArray, RealArray, RealArray]:
    """Input amplitude, output amplitude and phase of a retrieval with a known exact solution.

    The output amplitude is the forward propagation of the zero-padded input with
    a uniform random phase. Both amplitudes share one scale factor so they lie in
    ``[0, 1]``; linearity keeps the pair consistent.
    """
    a1 = smooth_image(setup.image_side, seed)
    phase = np.random.default_rng(seed + 1).uniform(0.0, 2.0 * np.pi, size=a1.shape)
    u2 = frt(embed(a1 * np.exp(1j * phase), setup, 0.0), build_kernel(setup))
    a2 = np.abs(crop(u2, setup))
    scale = max(float(a1.max()), float(a2.max()))
    return a1 / scale, a2 / scale, phase
