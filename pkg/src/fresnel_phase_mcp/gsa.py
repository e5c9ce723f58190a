"""Modified Gerchberg-Saxton retrieval in the Fresnel domain.

One iteration:

1. ``u2 = frt(u1)``; the output correlation is measured on ``|u2|``.
2. the output amplitude constraint is applied per padding strategy.
3. ``u1 = ifrt(u2)``; the input correlation is measured on ``|u1|``. This is the
   input image recomputed from the measured output amplitude and the
   retrieved output phase.
4. the input amplitude constraint is applied per padding strategy.

The loop runs a fixed number of iterations unless a relative-change tolerance
is given.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional

import numpy as np
from eliot import log_message, start_action
from numpy.typing import ArrayLike

from fresnel_phase_mcp.errors import ConfigurationError, DivergenceError
from fresnel_phase_mcp.field_grid import FieldGrid, OpticalSetup, RealArray, as_amplitude, crop
from fresnel_phase_mcp.fresnel import FresnelKernel, build_kernel, frt, ifrt
from fresnel_phase_mcp.metrics import correlation, max_error_percent
from fresnel_phase_mcp.padding import PaddingKind, PaddingStrategy, apply_constraint, initial_field

DEFAULT_ITERATIONS = 100

Tick = Callable[[], None]


def wrap_phase(samples: np.ndarray) -> RealArray:
    """Phase of complex samples wrapped to ``[-pi, pi)``, with ``arg(0) = 0``."""
    phase = np.angle(samples)
    phase[samples == 0] = 0.0
    phase[phase >= np.pi] = -np.pi
    return phase


def _frozen_amplitude(image: ArrayLike, name: str, setup: OpticalSetup) -> RealArray:
    amplitude = np.array(as_amplitude(image, name), copy=True)
    if amplitude.shape != (setup.image_side, setup.image_side):
        raise ConfigurationError(
            f"{name} shape {amplitude.shape} does not match image_side {setup.image_side}"
        )
    if amplitude.min() < 0.0 or amplitude.max() > 1.0:
        raise ConfigurationError(f"{name} must lie in [0, 1]")
    if amplitude.min() == amplitude.max():
        raise ConfigurationError(f"{name} is constant; correlations would be undefined")
    amplitude.flags.writeable = False
    return amplitude


@dataclass(frozen=True, eq=False)
class RetrievalProblem:
    """Measured amplitudes of both planes plus everything needed to run one retrieval."""

    a1: RealArray = field(repr=False)
    a2: RealArray = field(repr=False)
    setup: OpticalSetup
    strategy: PaddingStrategy
    iterations: int = DEFAULT_ITERATIONS
    seed: int = 0
    tolerance: Optional[float] = None
    correlate_intensity: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "a1", _frozen_amplitude(self.a1, "input amplitude", self.setup))
        object.__setattr__(self, "a2", _frozen_amplitude(self.a2, "output amplitude", self.setup))
        if self.iterations < 0:
            raise ConfigurationError(f"iterations must be >= 0 (got {self.iterations})")
        if self.tolerance is not None and not self.tolerance > 0:
            raise ConfigurationError(f"tolerance must be positive (got {self.tolerance})")

    def with_strategy(self, strategy: PaddingStrategy) -> RetrievalProblem:
        return replace(self, strategy=strategy)


class ConvergenceRecord(NamedTuple):
    iteration: int
    corr_input: float
    corr_output: float


@dataclass(frozen=True)
class ConvergenceTrace:
    records: tuple[ConvergenceRecord, ...] = ()

    def __post_init__(self) -> None:
        iterations = [record.iteration for record in self.records]
        if any(b <= a for a, b in zip(iterations, iterations[1:])):
            raise ConfigurationError("trace iterations must be strictly increasing")

    def __len__(self) -> int:
        return len(self.records)

    @property
    def last(self) -> Optional[ConvergenceRecord]:
        return self.records[-1] if self.records else None

    def at(self, iteration: int) -> ConvergenceRecord:
        for record in self.records:
            if record.iteration == iteration:
                return record
        raise KeyError(iteration)

    @property
    def corr_input(self) -> RealArray:
        return np.array([record.corr_input for record in self.records], dtype=np.float64)

    @property
    def corr_output(self) -> RealArray:
        return np.array([record.corr_output for record in self.records], dtype=np.float64)


@dataclass(frozen=True, eq=False)
class RetrievalResult:
    """Outcome of :func:`run_mgsa`.

    ``u1_final`` is the input field after the last input constraint, so its
    image region carries the measured amplitude. ``back_final`` is the last
    back-propagated input field, before that constraint. ``u2_final`` is the
    last forward-propagated output field, before its constraint. ``phi1``/``phi2``
    are the phases of the last back- and forward-propagated fields.
    ``recon_input``/``recon_output`` are their cropped amplitudes.
    """

    strategy: PaddingStrategy
    phi1: RealArray = field(repr=False)
    phi2: RealArray = field(repr=False)
    u1_final: FieldGrid = field(repr=False)
    back_final: FieldGrid = field(repr=False)
    u2_final: FieldGrid = field(repr=False)
    recon_input: RealArray = field(repr=False)
    recon_output: RealArray = field(repr=False)
    trace: ConvergenceTrace
    final_max_error_percent: float

    @property
    def iterations(self) -> int:
        return len(self.trace)

    @property
    def final_corr_input(self) -> Optional[float]:
        last = self.trace.last
        return last.corr_input if last else None

    @property
    def final_corr_output(self) -> Optional[float]:
        last = self.trace.last
        return last.corr_output if last else None


def _ensure_finite(grid: FieldGrid, iteration: int, plane: str) -> None:
    if not grid.is_finite():
        raise DivergenceError(iteration, plane)


def _score(reconstruction: RealArray, target: RealArray, intensity: bool) -> float:
    if intensity:
        return correlation(reconstruction**2, target**2)
    return correlation(reconstruction, target)


def run_mgsa(
    problem: RetrievalProblem,
    kernel: Optional[FresnelKernel] = None,
    tick: Optional[Tick] = None,
) -> RetrievalResult:
    """Run the modified Gerchberg-Saxton loop on ``problem``.

    ``kernel`` may be shared between jobs on the same setup. ``tick`` is called
    once per completed iteration.
    """
    setup = problem.setup
    if kernel is None:
        kernel = build_kernel(setup)
    elif kernel.setup != setup:
        raise ConfigurationError("kernel was built for a different optical setup")

    strategy = problem.strategy
    with start_action(
        action_type="fresnel_phase:run_mgsa",
        strategy=strategy.label,
        iterations=problem.iterations,
        seed=problem.seed,
        domain_side=setup.domain_side,
        image_side=setup.image_side,
    ) as action:
        u1 = initial_field(problem.a1, setup, strategy, problem.seed)
        u2: Optional[FieldGrid] = None
        back = u1
        records: list[ConvergenceRecord] = []

        for iteration in range(1, problem.iterations + 1):
            u2 = frt(u1, kernel)
            _ensure_finite(u2, iteration, "output")
            corr_output = _score(np.abs(crop(u2, setup)), problem.a2, problem.correlate_intensity)

            back = ifrt(apply_constraint(u2, problem.a2, setup, strategy), kernel)
            _ensure_finite(back, iteration, "input")
            corr_input = _score(np.abs(crop(back, setup)), problem.a1, problem.correlate_intensity)

            updated = apply_constraint(back, problem.a1, setup, strategy)
            records.append(ConvergenceRecord(iteration, corr_input, corr_output))
            log_message(
                message_type="fresnel_phase:iteration",
                iteration=iteration,
                corr_input=corr_input,
                corr_output=corr_output,
            )
            if tick is not None:
                tick()

            if problem.tolerance is not None:
                change = float(np.linalg.norm(updated.samples - u1.samples) / np.linalg.norm(u1.samples))
                u1 = updated
                if change < problem.tolerance:
                    log_message(message_type="fresnel_phase:converged", iteration=iteration, change=change)
                    break
            else:
                u1 = updated

        if u2 is None:
            u2 = frt(u1, kernel)
            _ensure_finite(u2, 0, "output")
        recon_input = np.abs(crop(back, setup))
        result = RetrievalResult(
            strategy=strategy,
            phi1=wrap_phase(back.samples),
            phi2=wrap_phase(u2.samples),
            u1_final=u1,
            back_final=back,
            u2_final=u2,
            recon_input=recon_input,
            recon_output=np.abs(crop(u2, setup)),
            trace=ConvergenceTrace(tuple(records)),
            final_max_error_percent=max_error_percent(problem.a1, recon_input),
        )
        action.add_success_fields(
            completed=result.iterations,
            corr_input=result.final_corr_input,
            corr_output=result.final_corr_output,
        )
        return result


@dataclass(frozen=True, eq=False)
class SweepResult:
    best_c: float
    best: RetrievalResult
    scores: list[tuple[float, float]]
    total_iterations: int


def sweep_values(c_min: float, c_max: float, step: float) -> list[float]:
    """Padding amplitudes ``c_min, c_min + step, ..., <= c_max``."""
    if not (c_min > 0 and step > 0 and c_min <= c_max):
        raise ConfigurationError(
            f"empty sweep: need 0 < c_min <= c_max and step > 0 (got {c_min}, {c_max}, {step})"
        )
    count = math.floor((c_max - c_min) / step + 1e-9) + 1
    return [round(c_min + k * step, 12) for k in range(count)]


def _final_score(result: RetrievalResult) -> float:
    value = result.final_corr_input
    return -math.inf if value is None else value


def _run_all(
    problems: Sequence[RetrievalProblem],
    kernel: FresnelKernel,
    workers: int,
    tick: Optional[Tick],
) -> list[RetrievalResult]:
    if workers <= 1 or len(problems) <= 1:
        return [run_mgsa(p, kernel, tick) for p in problems]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda p: run_mgsa(p, kernel, tick), problems))


def sweep_constant(
    problem: RetrievalProblem,
    c_min: float = 0.1,
    c_max: float = 1.0,
    step: float = 0.1,
    workers: int = 1,
    kernel: Optional[FresnelKernel] = None,
    tick: Optional[Tick] = None,
) -> SweepResult:
    """Run one constant-padding retrieval per amplitude and keep the best input correlation.

    Every member uses the seed of ``problem``; ties go to the smaller amplitude.
    """
    values = sweep_values(c_min, c_max, step)
    if kernel is None:
        kernel = build_kernel(problem.setup)
    with start_action(
        action_type="fresnel_phase:sweep_constant", c_min=c_min, c_max=c_max, step=step, runs=len(values)
    ):
        members = [problem.with_strategy(PaddingStrategy.constant(c)) for c in values]
        results = _run_all(members, kernel, workers, tick)

        best_index = 0
        for index, result in enumerate(results):
            if _final_score(result) > _final_score(results[best_index]):
                best_index = index
        scores = [(c, _final_score(result)) for c, result in zip(values, results)]
        for c, score in scores:
            log_message(message_type="fresnel_phase:sweep_member", amplitude=c, corr_input=score)
        return SweepResult(
            best_c=values[best_index],
            best=results[best_index],
            scores=scores,
            total_iterations=sum(result.iterations for result in results),
        )


@dataclass(frozen=True, eq=False)
class StrategyRow:
    """One row of the strategy comparison table."""

    kind: PaddingKind
    padding_amplitude: Optional[float]
    result: RetrievalResult
    total_iterations: int
    sweep: Optional[SweepResult] = None

    @property
    def corr_input(self) -> Optional[float]:
        return self.result.final_corr_input

    @property
    def corr_output(self) -> Optional[float]:
        return self.result.final_corr_output


def compare_strategies(
    problem: RetrievalProblem,
    c_min: float = 0.1,
    c_max: float = 1.0,
    step: float = 0.1,
    workers: int = 1,
    tick: Optional[Tick] = None,
) -> list[StrategyRow]:
    """Zero padding, the best constant padding of a sweep, and variable padding on one problem."""
    kernel = build_kernel(problem.setup)
    with start_action(action_type="fresnel_phase:compare_strategies"):
        zero = run_mgsa(problem.with_strategy(PaddingStrategy.zero()), kernel, tick)
        sweep = sweep_constant(problem, c_min, c_max, step, workers=workers, kernel=kernel, tick=tick)
        variable = run_mgsa(problem.with_strategy(PaddingStrategy.variable()), kernel, tick)
    return [
        StrategyRow(PaddingKind.ZERO, None, zero, zero.iterations),
        StrategyRow(PaddingKind.CONSTANT, sweep.best_c, sweep.best, sweep.total_iterations, sweep),
        StrategyRow(PaddingKind.VARIABLE, None, variable, variable.iterations),
    ]
