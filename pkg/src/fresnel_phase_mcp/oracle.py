"""Brute-force quadrature of the Fresnel integral for validating :mod:`fresnel_phase_mcp.fresnel`.

Coordinates, chirps and the prefactor come from the same kernel the FFT path
uses (see the convention in :mod:`fresnel_phase_mcp.fresnel`); what is checked
here is the FFT factorization and the centering shifts. Cost is O(N^4).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fresnel_phase_mcp.errors import ConfigurationError
from fresnel_phase_mcp.field_grid import ComplexArray, FieldGrid, OpticalSetup, axis
from fresnel_phase_mcp.fresnel import build_kernel, setup_sampling_distance

MAX_ORACLE_SIDE = 64


@dataclass(frozen=True)
class OracleConfig:
    setup: OpticalSetup

    def __post_init__(self) -> None:
        if self.setup.domain_side > MAX_ORACLE_SIDE:
            raise ConfigurationError(
                f"oracle is limited to N <= {MAX_ORACLE_SIDE} (got {self.setup.domain_side})"
            )


def _fourier_weights(setup: OpticalSetup) -> ComplexArray:
    """One-axis weights ``exp(-2*pi*i * f(m) * r(n))`` with ``f(m) = r(m) / (lambda * z_FT)``."""
    r = axis(setup)
    frequency = r / (setup.wavelength * setup_sampling_distance(setup))
    return np.exp(-2j * np.pi * np.outer(frequency, r))


def _double_sum(field: ComplexArray, weights: ComplexArray) -> ComplexArray:
    n = field.shape[0]
    out = np.empty((n, n), dtype=np.complex128)
    for row in range(n):
        # kernel[col, ny, nx] = w[row, ny] * w[col, nx]
        kernel = weights[row, np.newaxis, :, np.newaxis] * weights[:, np.newaxis, :]
        out[row] = np.einsum("kij,ij->k", kernel, field)
    return out


def _check(grid: FieldGrid, config: OracleConfig) -> None:
    if grid.side != config.setup.domain_side:
        raise ConfigurationError(
            f"field side {grid.side} does not match oracle side {config.setup.domain_side}"
        )


def direct_fresnel(u1: FieldGrid, config: OracleConfig) -> FieldGrid:
    """Forward Fresnel propagation by explicit summation over every input sample."""
    _check(u1, config)
    kernel = build_kernel(config.setup)
    weights = _fourier_weights(config.setup)
    summed = _double_sum(u1.samples * kernel.input_chirp, weights)
    return FieldGrid(kernel.prefactor * kernel.output_chirp * summed, config.setup.pitch)


def direct_inverse_fresnel(u2: FieldGrid, config: OracleConfig) -> FieldGrid:
    """Backward propagation by explicit summation with conjugate weights."""
    _check(u2, config)
    kernel = build_kernel(config.setup)
    weights = np.conj(_fourier_weights(config.setup)).T
    n = config.setup.domain_side
    summed = _double_sum(u2.samples * np.conj(kernel.output_chirp), weights) / n**2
    return FieldGrid(np.conj(kernel.input_chirp) * summed / kernel.prefactor, config.setup.pitch)
