"""Iterative FPM phase retrieval by sequential amplitude replacement."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np
from tqdm import tqdm

from ..core.geometry import LedIndex, SystemSpec
from ..core.optics import ComplexField2D, Pupil, fft2c, ifft2c, make_pupil
from ..evaluation.metrics import amplitude_phase_crosstalk
from ..exceptions import ConfigError, DataInconsistencyError, NumericalError
from ..imaging.forward import pad_spectrum, subspectrum_window
from ..imaging.stack import CaptureStack
from .results import ReconResult, wrap_phase

logger = logging.getLogger(__name__)

CENTER_LED = LedIndex(0, 0)
PLAN_ORDER = "plan"


class InitMode(str, Enum):
    """How the high-resolution spectrum estimate starts."""

    UPSAMPLED_CENTRAL = "upsampled-central"
    ONES = "ones"


@dataclass(frozen=True)
class ReconConfig:
    """Reconstruction settings."""

    iterations: int = 20
    """Sweep budget"""

    init_mode: InitMode = InitMode.UPSAMPLED_CENTRAL

    convergence_tolerance: float = 1e-4
    """Stop early when the relative residual change falls below this (0 disables)"""

    order: str = PLAN_ORDER
    """Sweep order; frames are visited in plan (spiral) order"""

    def __post_init__(self) -> None:
        if int(self.iterations) != self.iterations or self.iterations < 1:
            raise ConfigError(
                f"reconstruction.iterations must be an integer >= 1, got {self.iterations}"
            )
        if not self.convergence_tolerance >= 0:
            raise ConfigError(
                "reconstruction.convergence_tolerance must be >= 0, "
                f"got {self.convergence_tolerance}"
            )
        if self.order != PLAN_ORDER:
            raise ConfigError(f"reconstruction.order must be '{PLAN_ORDER}', got {self.order!r}")
        if not isinstance(self.init_mode, InitMode):
            try:
                object.__setattr__(self, "init_mode", InitMode(self.init_mode))
            except ValueError as e:
                choices = ", ".join(m.value for m in InitMode)
                raise ConfigError(
                    f"reconstruction.init_mode: invalid value {self.init_mode!r} "
                    f"(expected one of {choices})"
                ) from e

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "iterations": self.iterations,
            "init_mode": self.init_mode.value,
            "convergence_tolerance": self.convergence_tolerance,
            "order": self.order,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ReconConfig:
        """Create from dictionary, falling back to defaults for missing keys."""
        try:
            return cls(
                iterations=int(data.get("iterations", 20)),
                init_mode=data.get("init_mode", InitMode.UPSAMPLED_CENTRAL.value),
                convergence_tolerance=float(data.get("convergence_tolerance", 1e-4)),
                order=str(data.get("order", PLAN_ORDER)),
            )
        except (TypeError, ValueError) as e:
            raise ConfigError(f"reconstruction: {e}") from e


@dataclass
class ReconState:
    """Mutable solver state, owned by a single reconstruction."""

    spectrum: ComplexField2D
    """High-resolution spectrum estimate, updated in place"""

    pupil: Pupil
    """Objective pupil on the camera frequency grid"""

    factor: int
    """High-resolution size over camera size"""

    iteration: int = 0
    residual_trace: list[float] = field(default_factory=list)


def init_spectrum(stack: CaptureStack, config: ReconConfig) -> ReconState:
    """Initial high-resolution spectrum.

    ``upsampled-central`` zero-pads the spectrum of the central frame's square root onto
    the high-resolution grid; ``ones`` is a constant real spectrum with the same energy.
    Either way the energy is ``factor² · Σ I_central`` (the mean frame energy is used in
    ``ones`` mode when there is no central frame).

    Raises:
        DataInconsistencyError: If the stack is empty or lacks the central frame in
            upsampled-central mode
    """
    if len(stack) == 0:
        raise DataInconsistencyError("Cannot reconstruct from an empty stack")

    factor = stack.upsampling
    n = stack.plan.grid.size
    pupil = make_pupil(stack.system.cutoff_frequency, stack.system.camera_grid)
    has_center = stack.has(CENTER_LED)

    if config.init_mode is InitMode.UPSAMPLED_CENTRAL:
        if not has_center:
            raise DataInconsistencyError(
                "upsampled-central initialization needs the central LED (0, 0) frame"
            )
        amplitude = np.sqrt(stack.frame(CENTER_LED))
        samples = pad_spectrum(fft2c(amplitude.astype(np.complex128)), n) * factor
    else:
        if has_center:
            energy = float(np.sum(stack.frame(CENTER_LED)))
        else:
            energy = float(np.mean([np.sum(f) for f in stack.frames]))
        modulus = factor * np.sqrt(energy) / n
        samples = np.full((n, n), modulus, dtype=np.complex128)

    logger.debug("Initialized %d-px spectrum (%s)", n, config.init_mode.value)
    return ReconState(
        spectrum=ComplexField2D(samples, stack.plan.grid.frequency_step),
        pupil=pupil,
        factor=factor,
    )


def fpm_iterate(state: ReconState, stack: CaptureStack) -> ReconState:
    """One sequential sweep over the stack in plan order.

    Each frame's pupil-masked sub-spectrum is taken to the camera plane, its modulus is
    replaced by the measured amplitude, and the result is written back inside the pupil
    support only. The residual ``Σ mean((|g|² − I)²)`` is measured before each update.
    The state is updated in place and returned.

    Raises:
        DataInconsistencyError: If the state and stack grids differ
    """
    samples = state.spectrum.samples
    n = samples.shape[0]
    m = state.pupil.grid.size
    if n != stack.plan.grid.size or m != stack.system.camera_pixels:
        raise DataInconsistencyError(
            f"Solver state ({n} px spectrum, {m} px pupil) does not match the stack "
            f"({stack.plan.grid.size} px, {stack.system.camera_pixels} px camera)"
        )

    support = state.pupil.support
    mask = state.pupil.mask
    factor = state.factor
    residual = 0.0

    for entry, frame in zip(stack.plan, stack.frames):
        rows, cols = subspectrum_window(n, m, entry.shift)
        sub = samples[rows, cols]
        estimate = ifft2c(sub * mask) / factor
        residual += float(np.mean((np.abs(estimate) ** 2 - frame) ** 2))

        replaced = np.sqrt(frame) * np.exp(1j * np.angle(estimate))
        updated = fft2c(replaced) * factor
        samples[rows, cols] = np.where(support, updated, sub)

    state.iteration += 1
    state.residual_trace.append(residual)
    logger.debug("Sweep %d: residual %.6e", state.iteration, residual)
    return state


def _check_system(stack: CaptureStack, system: SystemSpec) -> None:
    if stack.system.to_dict() != system.to_dict():
        raise DataInconsistencyError(
            f"Stack was taken with {stack.system.to_dict()}, "
            f"reconstruction requested for {system.to_dict()}"
        )


def reconstruct(
    stack: CaptureStack,
    system: SystemSpec,
    config: ReconConfig,
    progress: bool = False,
) -> ReconResult:
    """Recover the high-resolution complex field from a capture stack.

    Sweeps until the iteration budget is spent or the relative residual change drops
    below ``config.convergence_tolerance``.

    Raises:
        DataInconsistencyError: If the stack and system disagree
        NumericalError: If the estimate becomes non-finite
    """
    _check_system(stack, system)
    state = init_spectrum(stack, config)
    converged = False

    sweeps = tqdm(
        range(config.iterations), desc="Reconstructing", unit="sweep", disable=not progress
    )
    for _ in sweeps:
        fpm_iterate(state, stack)
        trace = state.residual_trace
        if not np.isfinite(trace[-1]):
            raise NumericalError(f"Residual became non-finite at sweep {state.iteration}")
        if len(trace) >= 2 and config.convergence_tolerance > 0:
            change = abs(trace[-1] - trace[-2]) / max(trace[-2], np.finfo(float).tiny)
            if change < config.convergence_tolerance:
                converged = True
                break

    field_estimate = ifft2c(state.spectrum.samples)
    if not np.all(np.isfinite(field_estimate)):
        raise NumericalError("Reconstructed field contains non-finite values")

    amplitude = np.abs(field_estimate)
    phase = wrap_phase(np.angle(field_estimate))
    logger.info(
        "Reconstructed %s stack: %d frames, %d sweeps, residual %.4e -> %.4e%s",
        stack.plan.mode.value,
        len(stack),
        state.iteration,
        state.residual_trace[0],
        state.residual_trace[-1],
        " (converged)" if converged else "",
    )

    return ReconResult(
        amplitude=amplitude,
        phase=phase,
        residual_trace=tuple(state.residual_trace),
        metadata={
            "config": config.to_dict(),
            "plan_mode": stack.plan.mode.value,
            "frame_count": len(stack),
            "upsampling": state.factor,
            "iterations_run": state.iteration,
            "converged": converged,
            "crosstalk": amplitude_phase_crosstalk(amplitude, phase),
        },
    )
