"""Discrete Fresnel transform (FRT) and its inverse.

Discrete convention, shared with :mod:`fresnel_phase_mcp.oracle`:

    u2[m] = prefactor * exp(i*pi*r2(m)^2/(lambda*z))
            * sum_n u1[n] * exp(i*pi*r1(n)^2/(lambda*z)) * exp(-2*pi*i * f(m).r1(n))

with ``r(k) = (k - N//2) * dx`` on both planes and ``f(m) = r2(m) / (lambda * z_FT)``,
where ``z_FT = N * dx**2 / lambda`` is the sampling distance of the rounded sample
count. ``prefactor = exp(2*pi*i*z/lambda) * dx**2 / (i * lambda * z_FT)`` carries the
area element of the integral. With this choice the transform is unitary, so
Parseval holds exactly and :func:`ifrt` is the algebraic inverse of :func:`frt`.
When ``N == lambda*z/dx**2`` exactly, ``z_FT == z`` and the formula is the textbook
single-FFT Fresnel integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from eliot import log_message
from scipy import fft

from fresnel_phase_mcp.errors import ConfigurationError
from fresnel_phase_mcp.field_grid import ComplexArray, FieldGrid, OpticalSetup, axis


def required_samples(wavelength: float, distance: float, pitch: float, image_side: int) -> int:
    """Fresnel sample count ``lambda*z/dx**2`` rounded to the nearest even integer."""
    if wavelength <= 0 or distance <= 0 or pitch <= 0:
        raise ConfigurationError("wavelength, distance and pitch must be positive")
    if image_side < 1:
        raise ConfigurationError(f"image_side must be >= 1 (got {image_side})")
    exact = wavelength * distance / pitch**2
    samples = 2 * math.floor(exact / 2 + 0.5)
    if samples < image_side:
        raise ConfigurationError(
            f"image exceeds Fresnel computational domain: lambda*z/dx^2 = {exact:.4g} "
            f"samples < image side {image_side}"
        )
    return samples


def sampling_distance(p1: float, p2: float, samples: float, wavelength: float) -> float:
    """Distance ``z_FT = P1*P2/(N*lambda)`` at which forward and inverse FRT are both Nyquist sampled."""
    if p1 <= 0 or p2 <= 0 or samples <= 0 or wavelength <= 0:
        raise ConfigurationError("sampling_distance arguments must be positive")
    return p1 * p2 / (samples * wavelength)


def setup_sampling_distance(setup: OpticalSetup) -> float:
    return sampling_distance(setup.domain_width, setup.domain_width, setup.domain_side, setup.wavelength)


def optical_setup(wavelength: float, distance: float, pitch: float, image_side: int) -> OpticalSetup:
    """Derive the computational domain for the given physics and image size."""
    return OpticalSetup(
        wavelength=wavelength,
        distance=distance,
        pitch=pitch,
        image_side=image_side,
        domain_side=required_samples(wavelength, distance, pitch, image_side),
    )


@dataclass(frozen=True, eq=False)
class FresnelKernel:
    """Precomputed chirps and prefactor for one :class:`OpticalSetup`; reusable and read-only."""

    input_chirp: ComplexArray = field(repr=False)
    output_chirp: ComplexArray = field(repr=False)
    prefactor: complex
    setup: OpticalSetup

    @property
    def side(self) -> int:
        return self.setup.domain_side


def paraxial_margin(setup: OpticalSetup) -> float:
    """Ratio ``z**3 / (pi * rho_max**4 / (4*lambda))`` of the classic Fresnel sufficiency condition.

    Values well above 1 guarantee the quadratic approximation; the condition is
    conservative and most practical setups sit far below it.
    """
    rho_squared = 2.0 * setup.domain_width**2
    return setup.distance**3 / (math.pi * rho_squared**2 / (4.0 * setup.wavelength))


def build_kernel(setup: OpticalSetup) -> FresnelKernel:
    x = axis(setup)
    radius_squared = x[np.newaxis, :] ** 2 + x[:, np.newaxis] ** 2
    chirp = np.exp(1j * np.pi * radius_squared / (setup.wavelength * setup.distance))
    chirp.flags.writeable = False

    z_ft = setup_sampling_distance(setup)
    prefactor = (
        np.exp(2j * np.pi * setup.distance / setup.wavelength)
        * setup.pitch**2
        / (1j * setup.wavelength * z_ft)
    )

    margin = paraxial_margin(setup)
    if margin < 1.0:
        log_message(
            message_type="fresnel_phase:paraxial_warning",
            distance=setup.distance,
            margin=margin,
            note="propagation distance is below the sufficient Fresnel validity bound",
        )
    return FresnelKernel(
        input_chirp=chirp,
        output_chirp=chirp,
        prefactor=complex(prefactor),
        setup=setup,
    )


def _check_side(grid: FieldGrid, kernel: FresnelKernel) -> None:
    if grid.side != kernel.side:
        raise ConfigurationError(f"field side {grid.side} does not match kernel side {kernel.side}")


def frt(u1: FieldGrid, kernel: FresnelKernel) -> FieldGrid:
    """Propagate an input-plane field to the output plane."""
    _check_side(u1, kernel)
    spectrum = fft.fftshift(fft.fft2(fft.ifftshift(u1.samples * kernel.input_chirp), norm="ortho"))
    # the ortho DFT carries 1/N, the prefactor carries the remaining N
    u2 = (kernel.prefactor * kernel.side) * kernel.output_chirp * spectrum
    return FieldGrid.wrap(u2, kernel.setup.pitch)


def ifrt(u2: FieldGrid, kernel: FresnelKernel) -> FieldGrid:
    """Back-propagate an output-plane field to the input plane; exact inverse of :func:`frt`."""
    _check_side(u2, kernel)
    spectrum = fft.fftshift(
        fft.ifft2(fft.ifftshift(u2.samples * np.conj(kernel.output_chirp)), norm="ortho")
    )
    u1 = np.conj(kernel.input_chirp) * spectrum / (kernel.prefactor * kernel.side)
    return FieldGrid.wrap(u1, kernel.setup.pitch)
