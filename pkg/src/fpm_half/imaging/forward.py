"""FPM capture-chain simulation.

One frame is formed by cutting a camera-sized window out of the object spectrum at the
illumination's spectral shift, masking it with the objective pupil, and taking the squared
modulus of its inverse transform. The window for shift ``s`` is centered at ``+s``, which
corresponds to an illumination tilt of ``exp(-j2π(u0·x + v0·y))`` on the object.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from tqdm import tqdm

from ..core.geometry import IlluminationPlan, LedIndex, SpectralShift, SystemSpec, symmetric_partner
from ..core.manifest import Provenance
from ..core.optics import Pupil, fft2c, ifft2c, make_pupil
from ..evaluation.metrics import LineProfile, line_profile, rmse_gray
from ..exceptions import ConfigError, DataInconsistencyError, GeometryError, NumericalError
from .objects import ComplexObject
from .stack import CaptureStack

logger = logging.getLogger(__name__)

ShiftLike = SpectralShift | tuple[int, int]


def _shift_px(shift: ShiftLike) -> tuple[int, int]:
    if isinstance(shift, SpectralShift):
        return shift.u_px, shift.v_px
    return int(shift[0]), int(shift[1])


def upsampling_factor(object_size: int, system: SystemSpec) -> int:
    """Integer ratio of the object grid to the camera grid.

    Raises:
        GeometryError: If the object grid is not a whole multiple of the camera grid
    """
    n = system.camera_pixels
    if object_size < n or object_size % n != 0:
        raise GeometryError(
            f"Object grid of {object_size} px is not an integer multiple of the {n}-px camera"
        )
    return object_size // n


def subspectrum_window(
    spectrum_size: int, window_size: int, shift: ShiftLike
) -> tuple[slice, slice]:
    """Row and column slices of the camera-sized window centered at ``center + shift``.

    Raises:
        GeometryError: If the window extends past the spectrum
    """
    u, v = _shift_px(shift)
    c = spectrum_size // 2
    top = c - window_size // 2 + v
    left = c - window_size // 2 + u
    limit = spectrum_size - window_size
    if top < 0 or left < 0 or top > limit or left > limit:
        raise GeometryError(
            f"Sub-spectrum window for shift ({u}, {v}) leaves the {spectrum_size}-px spectrum"
        )
    return slice(top, top + window_size), slice(left, left + window_size)


def check_plan_fits(plan: IlluminationPlan, window_size: int) -> None:
    """Raise GeometryError unless every entry's window lies inside the plan grid."""
    for entry in plan:
        subspectrum_window(plan.grid.size, window_size, entry.shift)


def low_resolution_field(
    spectrum: np.ndarray, shift: ShiftLike, pupil: Pupil, factor: int
) -> np.ndarray:
    """Camera-plane complex field for one illumination.

    The ``1 / factor`` scale keeps a uniform unit object imaging to unit intensity.
    """
    rows, cols = subspectrum_window(spectrum.shape[0], pupil.grid.size, shift)
    return ifft2c(spectrum[rows, cols] * pupil.mask) / factor


def pad_spectrum(spectrum: np.ndarray, size: int) -> np.ndarray:
    """Zero-pad a centered spectrum to ``size`` × ``size``, keeping zero frequency centered."""
    m = spectrum.shape[0]
    padded = np.zeros((size, size), dtype=np.complex128)
    start = size // 2 - m // 2
    padded[start : start + m, start : start + m] = spectrum
    return padded


def upsample_frame(frame: np.ndarray, factor: int) -> np.ndarray:
    """Band-limited interpolation of a camera frame onto a grid ``factor`` times finer."""
    m = frame.shape[0]
    padded = pad_spectrum(fft2c(np.asarray(frame, dtype=np.complex128)), m * factor)
    return np.real(ifft2c(padded)) * factor


def simulate_frame(
    obj: ComplexObject, system: SystemSpec, shift: ShiftLike, pupil: Pupil
) -> np.ndarray:
    """Intensity image captured under one illumination.

    Args:
        obj: Object on a grid that is an integer multiple of the camera grid
        system: Microscope parameters
        shift: Spectral shift (rounded pixels are used)
        pupil: Objective pupil on the camera frequency grid

    Returns:
        Camera-resolution intensity

    Raises:
        GeometryError: If the grids do not nest or the window leaves the spectrum
    """
    factor = upsampling_factor(obj.size, system)
    spectrum = fft2c(obj.field.samples)
    field = low_resolution_field(spectrum, shift, pupil, factor)
    return np.abs(field) ** 2


def simulate_stack(
    obj: ComplexObject,
    system: SystemSpec,
    plan: IlluminationPlan,
    workers: int = 1,
    progress: bool = False,
) -> CaptureStack:
    """One frame per plan entry, in plan order.

    The object spectrum is computed once; frames are then formed concurrently on
    ``workers`` threads.

    Raises:
        GeometryError: If any window leaves the spectrum
        NumericalError: If the object produces non-finite intensities
    """
    if workers < 1:
        raise ConfigError(f"workers must be >= 1, got {workers}")
    factor = upsampling_factor(obj.size, system)
    if plan.grid.size != obj.size:
        raise DataInconsistencyError(
            f"Plan grid of {plan.grid.size} px does not match the {obj.size}-px object"
        )

    pupil = make_pupil(system.cutoff_frequency, system.camera_grid)
    spectrum = fft2c(obj.field.samples)
    if not np.all(np.isfinite(spectrum)):
        raise NumericalError("Object field contains non-finite values")

    def frame_for(entry_index: int) -> np.ndarray:
        field = low_resolution_field(spectrum, plan.entries[entry_index].shift, pupil, factor)
        return np.abs(field) ** 2

    with ThreadPoolExecutor(max_workers=workers) as executor:
        frames = list(
            tqdm(
                executor.map(frame_for, range(len(plan))),
                total=len(plan),
                desc="Simulating",
                unit="frame",
                disable=not progress,
            )
        )

    logger.info("Simulated %d frames (%s, %dx upsampling)", len(frames), plan.mode.value, factor)
    return CaptureStack(tuple(frames), plan, system, Provenance.SIMULATED)


@dataclass(frozen=True, eq=False)
class PairDifference:
    """Comparison of the frames of one point-symmetric LED pair."""

    led: LedIndex
    partner: LedIndex
    rmse: float
    """Gray-level RMSE under the joint [0, 255] map"""

    profile_a: LineProfile
    profile_b: LineProfile


def symmetric_pair_difference(stack: CaptureStack, led: LedIndex) -> PairDifference:
    """RMSE and center-row profiles of the frames at ``led`` and its point reflection.

    Raises:
        DataInconsistencyError: If either frame is missing (e.g. a half stack)
    """
    led = LedIndex(*led)
    partner = symmetric_partner(led)
    for needed in (led, partner):
        if not stack.has(needed):
            raise DataInconsistencyError(
                f"Stack ({stack.plan.mode.value}) has no frame for LED ({needed.i}, {needed.j})"
            )

    frame_a = stack.frame(led)
    frame_b = stack.frame(partner)
    result = PairDifference(
        led=led,
        partner=partner,
        rmse=rmse_gray(frame_a, frame_b),
        profile_a=line_profile(frame_a),
        profile_b=line_profile(frame_b),
    )
    logger.debug("Pair (%d, %d): RMSE %.6f", led.i, led.j, result.rmse)
    return result


def add_noise(stack: CaptureStack, sigma: float, seed: int = 0) -> CaptureStack:
    """Additive Gaussian noise of standard deviation ``sigma × stack max``, clamped at 0.

    Raises:
        ConfigError: If sigma is negative
    """
    if sigma < 0:
        raise ConfigError(f"noise.sigma_fraction must be >= 0, got {sigma}")
    if sigma == 0:
        return CaptureStack(stack.frames, stack.plan, stack.system, stack.provenance)

    rng = np.random.default_rng(seed)
    std = sigma * stack.max_intensity
    frames = tuple(
        np.maximum(frame + rng.normal(0.0, std, frame.shape), 0.0) for frame in stack.frames
    )
    logger.info("Added Gaussian noise, std %.4g (%.3g of max)", std, sigma)
    return CaptureStack(frames, stack.plan, stack.system, stack.provenance)
