"""Reconstruction-quality metrics, evaluated on the cropped image region."""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike

from fresnel_phase_mcp.errors import ConfigurationError


def _pair(a: ArrayLike, b: ArrayLike) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    if x.shape != y.shape:
        raise ConfigurationError(f"shape mismatch: {x.shape} vs {y.shape}")
    if x.size == 0:
        raise ConfigurationError("metrics need non-empty arrays")
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise ConfigurationError("metrics inputs contain NaN or Inf")
    return x, y


def correlation(a: ArrayLike, b: ArrayLike) -> float:
    """Pearson correlation coefficient over all samples (two-pass)."""
    x, y = _pair(a, b)
    # test the samples, not the variance: a rounded mean leaves residues
    if np.ptp(x) == 0.0 or np.ptp(y) == 0.0:
        raise ConfigurationError("correlation is undefined for a constant array")
    dx = x - x.mean()
    dy = y - y.mean()
    var_x = float(np.sum(dx * dx))
    var_y = float(np.sum(dy * dy))
    if var_x == 0.0 or var_y == 0.0:
        raise ConfigurationError("correlation is undefined for a constant array")
    return float(np.sum(dx * dy)) / float(np.sqrt(var_x * var_y))


def max_error_percent(reference: ArrayLike, estimate: ArrayLike) -> float:
    """``100 * max|reference - estimate| / max|reference|``."""
    x, y = _pair(reference, estimate)
    scale = float(np.max(np.abs(x)))
    if scale == 0.0:
        raise ConfigurationError("max_error_percent needs a non-zero reference")
    return 100.0 * float(np.max(np.abs(x - y))) / scale
