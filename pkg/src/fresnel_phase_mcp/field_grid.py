"""Complex field lattices and the geometry of the Fresnel computational domain.

A retrieval works on an N x N computational domain of width ``P = N * pitch``.
The measured image (n x n, width ``p = n * pitch``) sits inside it at a fixed
offset; everything outside that block is the padding zone. Index ``N // 2``
is the optical axis on both planes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

from fresnel_phase_mcp.errors import ConfigurationError

ComplexArray = NDArray[np.complex128]
RealArray = NDArray[np.float64]


@dataclass(frozen=True)
class OpticalSetup:
    """Physical parameters of one propagation, lengths in micrometres.

    Use :func:`fresnel_phase_mcp.fresnel.optical_setup` to derive
    ``domain_side`` from the physics instead of passing it by hand.
    """

    wavelength: float
    distance: float
    pitch: float
    image_side: int
    domain_side: int

    def __post_init__(self) -> None:
        if self.wavelength <= 0 or self.distance <= 0 or self.pitch <= 0:
            raise ConfigurationError(
                f"wavelength, distance and pitch must be positive "
                f"(got {self.wavelength}, {self.distance}, {self.pitch})"
            )
        if self.image_side < 1:
            raise ConfigurationError(f"image_side must be >= 1 (got {self.image_side})")
        if self.domain_side < self.image_side:
            raise ConfigurationError(
                f"domain_side {self.domain_side} is smaller than image_side {self.image_side}"
            )
        if abs(self.domain_side - self.fresnel_samples) > 1:
            raise ConfigurationError(
                f"domain_side {self.domain_side} does not match the Fresnel sample count "
                f"lambda*z/dx^2 = {self.fresnel_samples:.4f}"
            )

    @property
    def fresnel_samples(self) -> float:
        """Unrounded sample count ``lambda * z / dx**2``."""
        return self.wavelength * self.distance / self.pitch**2

    @property
    def offset(self) -> int:
        return (self.domain_side - self.image_side) // 2

    @property
    def domain_width(self) -> float:
        """Computational width P in micrometres."""
        return self.domain_side * self.pitch

    @property
    def image_width(self) -> float:
        """Real image width p in micrometres."""
        return self.image_side * self.pitch

    @property
    def image_region(self) -> tuple[slice, slice]:
        start = self.offset
        stop = start + self.image_side
        return slice(start, stop), slice(start, stop)


@dataclass(frozen=True, eq=False)
class FieldGrid:
    """Square lattice of complex field samples with a physical pitch (um).

    The sample array is copied on construction and made read-only.
    """

    samples: ComplexArray = field(repr=False)
    pitch: float

    def __post_init__(self) -> None:
        samples = np.array(self.samples, dtype=np.complex128, copy=True)
        if samples.ndim != 2 or samples.shape[0] != samples.shape[1] or samples.shape[0] < 1:
            raise ConfigurationError(f"field samples must be a non-empty square array, got shape {samples.shape}")
        if self.pitch <= 0:
            raise ConfigurationError(f"pitch must be positive (got {self.pitch})")
        if not np.isfinite(samples).all():
            raise ConfigurationError("field samples contain NaN or Inf")
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)

    @classmethod
    def wrap(cls, samples: ComplexArray, pitch: float) -> FieldGrid:
        """Build a grid from an array the caller owns and will not mutate, skipping validation.

        Used on the hot path of the retrieval loop, which checks finiteness itself.
        """
        grid = object.__new__(cls)
        samples.flags.writeable = False
        object.__setattr__(grid, "samples", samples)
        object.__setattr__(grid, "pitch", pitch)
        return grid

    @property
    def side(self) -> int:
        return int(self.samples.shape[0])

    @property
    def amplitude(self) -> RealArray:
        return np.abs(self.samples)

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.samples).all())


def as_amplitude(image: ArrayLike, name: str = "image") -> RealArray:
    """Validate a square, finite, real amplitude array and return it as float64."""
    array = np.asarray(image, dtype=np.float64)
    if array.ndim != 2 or array.shape[0] != array.shape[1] or array.shape[0] < 1:
        raise ConfigurationError(f"{name} must be a non-empty square array, got shape {array.shape}")
    if not np.isfinite(array).all():
        raise ConfigurationError(f"{name} contains NaN or Inf")
    return array


def coordinate(index: int, setup: OpticalSetup) -> float:
    """Physical position (um) of lattice ``index``; index ``N // 2`` is zero."""
    n = setup.domain_side
    if not 0 <= index < n:
        raise ConfigurationError(f"index {index} outside [0, {n})")
    return (index - n // 2) * setup.pitch


def axis(setup: OpticalSetup) -> RealArray:
    """All lattice positions along one axis, as :func:`coordinate` computes them."""
    n = setup.domain_side
    return (np.arange(n) - n // 2) * setup.pitch


def embed(image: ArrayLike, setup: OpticalSetup, fill: complex = 0.0) -> FieldGrid:
    """Place ``image`` in the computational domain and set the padding zone to ``fill``."""
    image = np.asarray(image)
    if not np.iscomplexobj(image):
        image = as_amplitude(image)
    if image.shape != (setup.image_side, setup.image_side):
        raise ConfigurationError(
            f"image shape {image.shape} does not match image_side {setup.image_side}"
        )
    if not np.isfinite(image).all():
        raise ConfigurationError("image contains NaN or Inf")
    samples = np.full((setup.domain_side, setup.domain_side), fill, dtype=np.complex128)
    samples[setup.image_region] = image
    return FieldGrid.wrap(samples, setup.pitch)


def crop(grid: FieldGrid | ArrayLike, setup: OpticalSetup) -> NDArray[np.generic]:
    """Return a copy of the image-region block of a domain-sized grid or array."""
    samples = grid.samples if isinstance(grid, FieldGrid) else np.asarray(grid)
    if samples.shape != (setup.domain_side, setup.domain_side):
        raise ConfigurationError(
            f"grid shape {samples.shape} does not match domain_side {setup.domain_side}"
        )
    return samples[setup.image_region].copy()
