from typing import Any, Callable, Optional, TypeVar
from pathlib import Path

import asyncio
from fastmcp import Context

from fresnel_phase_mcp.cli import format_summary, write_outputs
from fresnel_phase_mcp.errors import FresnelPhaseError
from fresnel_phase_mcp.fresnel import optical_setup, setup_sampling_distance
from fresnel_phase_mcp.gsa import (
    RetrievalProblem,
    StrategyRow,
    Tick,
    compare_strategies,
    run_mgsa,
    sweep_constant,
    sweep_values,
)
from fresnel_phase_mcp.imaging import load_amplitude
from fresnel_phase_mcp.padding import PaddingKind, PaddingStrategy
from fresnel_phase_mcp.presets import (
    DEFAULT_ITERATIONS,
    DEFAULT_SEED,
    DEFAULT_SWEEP_MAX,
    DEFAULT_SWEEP_MIN,
    DEFAULT_SWEEP_STEP,
    REFERENCE_DISTANCE,
    REFERENCE_PITCH,
    REFERENCE_WAVELENGTH,
    desk_setup,
    self_consistent_pair,
)
from fresnel_phase_mcp.shared_lock import get_retrieval_lock

T = TypeVar("T")


def _row_summary(row: StrategyRow) -> dict[str, Any]:
    return {
        "strategy": row.kind.value,
        "padding_amplitude": row.padding_amplitude,
        "corr_input": row.corr_input,
        "corr_output": row.corr_output,
        "max_error_percent": row.result.final_max_error_percent,
        "total_iterations": row.total_iterations,
    }


class RetrievalTools:
    def __init__(self, output_dir: Path, workers: int = 1):
        """Initialize RetrievalTools.

        Args:
            output_dir: Directory receiving one sub-directory per named run
            workers: Threads used for independent sweep members
        """
        self.output_dir = output_dir
        self.workers = workers

    async def compute_sampling(
        self,
        wavelength: float = REFERENCE_WAVELENGTH,
        distance: float = REFERENCE_DISTANCE,
        pitch: float = REFERENCE_PITCH,
        image_side: int = 512,
    ) -> dict[str, Any]:
        """Compute the Fresnel computational domain for a wavelength, distance and pixel pitch.

        The sample count N = lambda*z/dx^2 (rounded to even) is fixed by the physics;
        when N exceeds the image side the image is surrounded by a padding zone.

        Args:
            wavelength: Wavelength in micrometres (default: 0.633)
            distance: Propagation distance in micrometres (default: 1500)
            pitch: Pixel pitch in micrometres (default: 1)
            image_side: Image side in pixels (default: 512)

        Returns:
            dict: Domain side N, widths, image offset and sampling distance

        Example:
            Input: wavelength=0.633, distance=1500, pitch=1, image_side=512
            Output: {"status": "completed", "domain_side": 950, "offset": 219, ...}
        """
        try:
            setup = optical_setup(wavelength, distance, pitch, image_side)
        except FresnelPhaseError as e:
            return {"status": "error", "error": str(e)}
        z_ft = setup_sampling_distance(setup)
        return {
            "status": "completed",
            "domain_side": setup.domain_side,
            "domain_width_um": setup.domain_width,
            "image_width_um": setup.image_width,
            "offset": setup.offset,
            "sampling_distance_um": z_ft,
            "relative_sampling_error": abs(z_ft - distance) / distance,
        }

    async def retrieve_phase(
        self,
        input_image_path: str,
        output_image_path: str,
        strategy: str = "variable",
        padding_amplitude: Optional[float] = None,
        iterations: int = DEFAULT_ITERATIONS,
        seed: int = DEFAULT_SEED,
        wavelength: float = REFERENCE_WAVELENGTH,
        distance: float = REFERENCE_DISTANCE,
        pitch: float = REFERENCE_PITCH,
        intensity_input: bool = True,
        run_name: str = "retrieval",
        ctx: Context = None,
    ) -> dict[str, Any]:
        """Retrieve the phase masks that transfer one grayscale image into another by Fresnel propagation.

        Long-running task: roughly 10 seconds per 100 iterations at 512x512 on a desktop CPU;
        a constant-padding sweep runs ten retrievals.

        Args:
            input_image_path: 8-bit grayscale input-plane image (PGM or PNG, square)
            output_image_path: 8-bit grayscale output-plane image of the same size
            strategy: "zero", "constant" or "variable" (default: "variable")
            padding_amplitude: Fixed amplitude for "constant"; when omitted the 0.1..1.0 sweep picks it
            iterations: Iterations per retrieval (default: 100)
            seed: Seed of the random start phase (default: 0)
            wavelength: Wavelength in micrometres (default: 0.633)
            distance: Propagation distance in micrometres (default: 1500)
            pitch: Pixel pitch in micrometres (default: 1)
            intensity_input: Read pixels as intensities (default: True)
            run_name: Name of the output sub-directory (default: "retrieval")

        Returns:
            dict: Final correlations, written files and status
        """
        try:
            problem = self._problem(
                input_image_path, output_image_path, iterations, seed, wavelength, distance, pitch, intensity_input
            )
            kind = PaddingKind(strategy.strip().lower())
        except (FresnelPhaseError, ValueError) as e:
            return {"status": "error", "error": str(e)}

        sweeping = kind is PaddingKind.CONSTANT and padding_amplitude is None
        runs = len(sweep_values(DEFAULT_SWEEP_MIN, DEFAULT_SWEEP_MAX, DEFAULT_SWEEP_STEP)) if sweeping else 1

        def job(tick: Tick) -> StrategyRow:
            if sweeping:
                sweep = sweep_constant(problem, workers=self.workers, tick=tick)
                return StrategyRow(kind, sweep.best_c, sweep.best, sweep.total_iterations, sweep)
            if kind is PaddingKind.CONSTANT:
                chosen = PaddingStrategy.constant(padding_amplitude)
            else:
                chosen = PaddingStrategy(kind)
            result = run_mgsa(problem.with_strategy(chosen), tick=tick)
            return StrategyRow(kind, padding_amplitude, result, result.iterations)

        return await self._run_and_report(job, [problem], iterations * runs, run_name, ctx)

    async def compare_padding_strategies(
        self,
        input_image_path: str,
        output_image_path: str,
        iterations: int = DEFAULT_ITERATIONS,
        seed: int = DEFAULT_SEED,
        c_min: float = DEFAULT_SWEEP_MIN,
        c_max: float = DEFAULT_SWEEP_MAX,
        c_step: float = DEFAULT_SWEEP_STEP,
        wavelength: float = REFERENCE_WAVELENGTH,
        distance: float = REFERENCE_DISTANCE,
        pitch: float = REFERENCE_PITCH,
        intensity_input: bool = True,
        run_name: str = "comparison",
        ctx: Context = None,
    ) -> dict[str, Any]:
        """Compare zero padding, the best constant padding of a sweep, and variable padding.

        Long-running task: twelve retrievals with the default sweep.

        Args:
            input_image_path: 8-bit grayscale input-plane image (PGM or PNG, square)
            output_image_path: 8-bit grayscale output-plane image of the same size
            iterations: Iterations per retrieval (default: 100)
            seed: Seed of the random start phase (default: 0)
            c_min: Smallest constant padding amplitude (default: 0.1)
            c_max: Largest constant padding amplitude (default: 1.0)
            c_step: Sweep step (default: 0.1)
            wavelength: Wavelength in micrometres (default: 0.633)
            distance: Propagation distance in micrometres (default: 1500)
            pitch: Pixel pitch in micrometres (default: 1)
            intensity_input: Read pixels as intensities (default: True)
            run_name: Name of the output sub-directory (default: "comparison")

        Returns:
            dict: One row per strategy with final correlations, plus the summary table
        """
        try:
            problem = self._problem(
                input_image_path, output_image_path, iterations, seed, wavelength, distance, pitch, intensity_input
            )
            runs = len(sweep_values(c_min, c_max, c_step)) + 2
        except FresnelPhaseError as e:
            return {"status": "error", "error": str(e)}

        def job(tick: Tick) -> list[StrategyRow]:
            return compare_strategies(problem, c_min, c_max, c_step, workers=self.workers, tick=tick)

        return await self._run_and_report(job, [problem], iterations * runs, run_name, ctx)

    async def retrieve_synthetic_example(
        self,
        image_side: int = 64,
        strategy: str = "variable",
        iterations: int = DEFAULT_ITERATIONS,
        seed: int = DEFAULT_SEED,
        ctx: Context = None,
    ) -> dict[str, Any]:
        """Run a retrieval on a synthetic problem with a known exact solution.

        The output amplitude is computed by propagating a synthetic input image with
        a random phase, on a small setup with a domain twice the image width.

        Args:
            image_side: Image side in pixels (default: 64)
            strategy: "zero", "constant:<amplitude>" or "variable" (default: "variable")
            iterations: Iterations (default: 100)
            seed: Seed for the synthetic images and the start phase (default: 0)

        Returns:
            dict: Final correlations and maximal input error in percent
        """
        try:
            setup = desk_setup(image_side)
            a1, a2, _ = self_consistent_pair(setup, seed)
            chosen = PaddingStrategy.parse(strategy)
            problem = RetrievalProblem(a1, a2, setup, chosen, iterations, seed)
        except FresnelPhaseError as e:
            return {"status": "error", "error": str(e)}

        def job(tick: Tick) -> StrategyRow:
            result = run_mgsa(problem, tick=tick)
            return StrategyRow(chosen.kind, chosen.amplitude, result, result.iterations)

        return await self._run_and_report(job, [problem], iterations, None, ctx)

    def _problem(
        self,
        input_image_path: str,
        output_image_path: str,
        iterations: int,
        seed: int,
        wavelength: float,
        distance: float,
        pitch: float,
        intensity_input: bool,
    ) -> RetrievalProblem:
        a1 = load_amplitude(input_image_path, intensity_input)
        a2 = load_amplitude(output_image_path, intensity_input)
        setup = optical_setup(wavelength, distance, pitch, a1.shape[0])
        return RetrievalProblem(a1, a2, setup, PaddingStrategy.variable(), iterations, seed)

    async def _run_and_report(
        self,
        job: Callable[[Tick], Any],
        problems: list[RetrievalProblem],
        total_steps: int,
        run_name: Optional[str],
        ctx: Context = None,
    ) -> dict[str, Any]:
        """Run a retrieval job under the shared lock and turn its rows into an LLM-friendly dict."""
        try:
            output = await self._run_locked(job, total_steps, ctx)
        except FresnelPhaseError as e:
            return {"status": "error", "error": str(e)}
        except Exception as e:
            return {"status": "error", "error": f"Retrieval failed: {e}"}

        rows: list[StrategyRow] = output if isinstance(output, list) else [output]
        response: dict[str, Any] = {"status": "completed", "rows": [_row_summary(row) for row in rows]}
        if len(rows) == 1:
            response.update(response["rows"][0])
        if run_name is not None:
            target = self.output_dir / run_name
            try:
                target.mkdir(parents=True, exist_ok=True)
                files = [str(path) for row in rows for path in write_outputs(row, target)]
                summary = format_summary(problems[0].setup, rows)
                (target / "summary.txt").write_text(summary)
            except (FresnelPhaseError, OSError) as e:
                return {"status": "error", "error": f"Failed to write outputs: {e}"}
            response.update({"output_dir": str(target), "files": files, "summary": summary})
        return response

    async def _run_locked(self, job: Callable[[Tick], T], total_steps: int, ctx: Context = None) -> T:
        lock = get_retrieval_lock()

        # Wait for the lock with periodic progress updates
        wait_interval = 2.0
        while lock.locked():
            if ctx:
                await ctx.report_progress(progress=0, total=total_steps)
            try:
                await asyncio.wait_for(lock.acquire(), timeout=wait_interval)
                break
            except asyncio.TimeoutError:
                continue
        else:
            await lock.acquire()

        try:
            done = [0]

            def tick() -> None:
                done[0] += 1

            task = asyncio.ensure_future(asyncio.to_thread(job, tick))
            while not task.done():
                await asyncio.wait({task}, timeout=wait_interval)
                if ctx:
                    await ctx.report_progress(progress=min(done[0], total_steps), total=total_steps)
            return task.result()
        finally:
            # Always release the lock
            lock.release()
