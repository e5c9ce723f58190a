"""Padding strategies: how the amplitude constraint treats the zone outside the measured image."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike

from fresnel_phase_mcp.errors import ConfigurationError
from fresnel_phase_mcp.field_grid import ComplexArray, FieldGrid, OpticalSetup, as_amplitude, embed


class PaddingKind(str, Enum):
    ZERO = "zero"
    CONSTANT = "constant"
    VARIABLE = "variable"


@dataclass(frozen=True)
class PaddingStrategy:
    """Which amplitude the padding zone receives at every constraint step.

    * zero: padding samples are forced to ``0``.
    * constant: padding amplitude is forced to ``amplitude``, phase kept.
    * variable: padding samples are left as the propagation produced them.
    """

    kind: PaddingKind
    amplitude: Optional[float] = None

    def __post_init__(self) -> None:
        if self.kind is PaddingKind.CONSTANT:
            if self.amplitude is None or not self.amplitude > 0:
                raise ConfigurationError(f"constant padding needs a positive amplitude (got {self.amplitude})")
        elif self.amplitude is not None:
            raise ConfigurationError(f"{self.kind.value} padding takes no amplitude")

    @classmethod
    def zero(cls) -> PaddingStrategy:
        return cls(PaddingKind.ZERO)

    @classmethod
    def constant(cls, amplitude: float) -> PaddingStrategy:
        return cls(PaddingKind.CONSTANT, float(amplitude))

    @classmethod
    def variable(cls) -> PaddingStrategy:
        return cls(PaddingKind.VARIABLE)

    @classmethod
    def parse(cls, text: str) -> PaddingStrategy:
        """Parse ``zero``, ``variable`` or ``constant:<amplitude>``."""
        name, _, value = text.strip().lower().partition(":")
        try:
            kind = PaddingKind(name)
        except ValueError:
            raise ConfigurationError(f"unknown padding strategy {text!r}") from None
        if kind is PaddingKind.CONSTANT:
            if not value:
                raise ConfigurationError("constant padding must be written as constant:<amplitude>")
            try:
                return cls.constant(float(value))
            except ValueError:
                raise ConfigurationError(f"invalid padding amplitude {value!r}") from None
        if value:
            raise ConfigurationError(f"{kind.value} padding takes no amplitude")
        return cls(kind)

    @property
    def label(self) -> str:
        if self.kind is PaddingKind.CONSTANT:
            return f"constant:{self.amplitude:g}"
        return self.kind.value

    @property
    def start_fill(self) -> float:
        """Padding amplitude of the first input-plane field."""
        return self.amplitude if self.kind is PaddingKind.CONSTANT else 0.0


def phase_of(samples: ComplexArray) -> ComplexArray:
    """Unit phasors ``exp(i*arg(u))``, with ``arg(0) = 0``."""
    phase = np.angle(samples)
    phase[samples == 0] = 0.0
    return np.exp(1j * phase)


def _measured(measured: ArrayLike, setup: OpticalSetup) -> np.ndarray:
    amplitude = as_amplitude(measured, "measured amplitude")
    if amplitude.shape != (setup.image_side, setup.image_side):
        raise ConfigurationError(
            f"measured amplitude shape {amplitude.shape} does not match image_side {setup.image_side}"
        )
    if (amplitude < 0).any():
        raise ConfigurationError("measured amplitudes must be non-negative")
    return amplitude


def apply_constraint(
    u: FieldGrid,
    measured: ArrayLike,
    setup: OpticalSetup,
    strategy: PaddingStrategy,
) -> FieldGrid:
    """Replace the amplitude of ``u`` by ``measured`` in the image region and treat the padding per ``strategy``.

    The phase of ``u`` is kept wherever the result is non-zero.
    """
    if u.side != setup.domain_side:
        raise ConfigurationError(f"field side {u.side} does not match domain_side {setup.domain_side}")
    amplitude = _measured(measured, setup)
    region = setup.image_region

    if strategy.kind is PaddingKind.VARIABLE:
        out = np.array(u.samples, copy=True)
    elif strategy.kind is PaddingKind.CONSTANT:
        out = strategy.amplitude * phase_of(u.samples)
    else:
        out = np.zeros_like(u.samples)
    out[region] = amplitude * phase_of(u.samples[region])
    return FieldGrid.wrap(out, u.pitch)


def initial_field(
    a1: ArrayLike,
    setup: OpticalSetup,
    strategy: PaddingStrategy,
    seed: int,
) -> FieldGrid:
    """Start field of a retrieval.

    Zero and constant padding start from a uniform random phase on the whole
    domain, drawn from ``numpy.random.default_rng(seed)``. Variable padding
    starts from the bare input amplitude with zero phase and zero padding.
    """
    amplitude = _measured(a1, setup)
    start = embed(amplitude, setup, strategy.start_fill)
    if strategy.kind is PaddingKind.VARIABLE:
        return start
    rng = np.random.default_rng(seed)
    phase = rng.uniform(0.0, 2.0 * np.pi, size=start.samples.shape)
    return FieldGrid.wrap(start.samples * np.exp(1j * phase), setup.pitch)
