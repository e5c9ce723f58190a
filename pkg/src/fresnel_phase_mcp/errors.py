"""Exceptions raised by the phase retrieval library."""


class FresnelPhaseError(Exception):
    """Base class for every error raised by fresnel_phase_mcp."""


class ConfigurationError(FresnelPhaseError, ValueError):
    """Invalid shapes, parameters or input files."""


class DivergenceError(FresnelPhaseError, ArithmeticError):
    """A propagated field contains NaN or Inf samples."""

    def __init__(self, iteration: int, plane: str):
        self.iteration = iteration
        self.plane = plane
        super().__init__(
            f"Non-finite samples in the {plane} plane at iteration {iteration}; the retrieval diverged"
        )
