"""Command bodies: config-driven simulation, reconstruction, and comparison pipelines.

Each ``run_*`` function validates the whole config before writing anything, raises
:class:`~fpm_half.exceptions.FpmError` subclasses on failure, and returns a summary for the
CLI to print.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .config import PipelineConfig
from .core.geometry import IlluminationPlan, PlanMode, led_angle_degrees, make_plan, synthesized_na
from .evaluation.metrics import (
    LineProfile,
    joint_line_profiles,
    line_profile,
    michelson_contrast,
    modulation_depth,
    normalized_cross_correlation,
    rmse_gray,
    to_gray,
)
from .evaluation.reports import write_profiles, write_table
from .exceptions import DataInconsistencyError, MetricError
from .imaging.forward import add_noise, check_plan_fits, simulate_stack, symmetric_pair_difference
from .imaging.objects import (
    ComplexObject,
    ObjectKind,
    bar_groups,
    make_object,
    standard_test_object,
)
from .imaging.pgm import load_grayscale, save_grayscale
from .imaging.stack import CaptureStack, crop_stack, export_stack, import_stack
from .reconstruction.results import (
    ReconResult,
    export_result,
    global_phase_align,
    remove_phase_mean,
)
from .reconstruction.solver import reconstruct

logger = logging.getLogger(__name__)

STACK_DIR = "stack"
RECONSTRUCTION_DIR = "reconstruction"


@dataclass
class SimulateSummary:
    stack_dir: Path
    frame_count: int
    mode: str
    acquisition_time_s: float
    synthesized_na: float


@dataclass
class ReconstructSummary:
    result_dir: Path
    frame_count: int
    iterations: int
    final_residual: float


@dataclass
class PairRow:
    kind: str
    led: tuple[int, int]
    angle_deg: tuple[float, float]
    rmse_gray: float


@dataclass
class ChannelComparison:
    channel: str
    rmse_gray: float
    ncc: float


@dataclass
class GroupContrast:
    label: str
    period_px: int
    contrast_full: float
    contrast_half: float
    modulation_full: float
    modulation_half: float


@dataclass
class FullVsHalfSummary:
    kind: str
    compared_channel: str
    frames_full: int
    frames_half: int
    channels: list[ChannelComparison] = field(default_factory=list)
    contrast: list[GroupContrast] = field(default_factory=list)

    def channel(self, name: str) -> ChannelComparison:
        return next(c for c in self.channels if c.channel == name)


def compared_channel(kind: ObjectKind | str) -> str:
    """Phase-only objects are compared on phase; the others on amplitude."""
    return "phase" if ObjectKind.parse(kind) is ObjectKind.PHASE_ONLY else "amplitude"


def build_object(config: PipelineConfig, kind: ObjectKind | str | None = None) -> ComplexObject:
    """Object from the configured images, or the standard bar target when none are set.

    With images, ``kind`` decides which channels are used: amplitude-only ignores the phase
    image, phase-only ignores the amplitude image.
    """
    object_kind = ObjectKind.parse(kind if kind is not None else config.object.kind)
    settings = config.object
    pitch = config.object_grid.pitch_um

    if settings.amplitude_path is None and settings.phase_path is None:
        return standard_test_object(
            object_kind, settings.size_px, settings.phase_range_rad, config.seed, pitch
        )

    amp = phase = None
    if settings.amplitude_path is not None and object_kind is not ObjectKind.PHASE_ONLY:
        amp = load_grayscale(settings.amplitude_path)
    if settings.phase_path is not None and object_kind is not ObjectKind.AMPLITUDE_ONLY:
        phase = load_grayscale(settings.phase_path)
    for image in (amp, phase):
        if image is not None and image.shape != (settings.size_px, settings.size_px):
            raise DataInconsistencyError(
                f"Object image is {image.shape[1]}x{image.shape[0]}, "
                f"object.size_px is {settings.size_px}"
            )
    return make_object(amp, phase, settings.phase_range_rad, pitch, settings.size_px)


def build_plan(
    config: PipelineConfig, mode: PlanMode | str | None = None
) -> IlluminationPlan:
    """Plan on the config's object grid, checked against the spectrum bounds."""
    plan = make_plan(
        config.led_array,
        mode if mode is not None else config.plan.mode,
        config.system,
        config.object_grid,
        flip=config.plan.flip,
    )
    check_plan_fits(plan, config.system.camera_pixels)
    return plan


def _simulate(
    config: PipelineConfig, obj: ComplexObject, plan: IlluminationPlan, progress: bool
) -> CaptureStack:
    stack = simulate_stack(obj, config.system, plan, workers=config.workers, progress=progress)
    if config.noise.sigma_fraction > 0:
        stack = add_noise(stack, config.noise.sigma_fraction, seed=config.seed)
    return stack


def run_simulate(config: PipelineConfig, progress: bool = False) -> SimulateSummary:
    """Simulate a capture stack and write it with the ground-truth object."""
    config.validate()
    plan = build_plan(config)
    obj = build_object(config)
    stack = _simulate(config, obj, plan, progress)

    out = config.output_dir
    export_stack(stack, out / STACK_DIR)
    save_grayscale(out / "object_amplitude.pgm", obj.amplitude)
    phase_range = config.object.phase_range_rad
    phase = obj.phase / phase_range if phase_range > 0 else np.zeros_like(obj.phase)
    save_grayscale(out / "object_phase.pgm", phase)

    full_count = config.led_array.led_count
    acquisition = plan.acquisition_time_s(config.exposure_ms)
    logger.info(
        "Acquisition estimate %.1f s for %d frames (%.0f%% of a full %d-frame capture)",
        acquisition,
        len(plan),
        100.0 * len(plan) / full_count,
        full_count,
    )
    return SimulateSummary(
        stack_dir=out / STACK_DIR,
        frame_count=len(stack),
        mode=plan.mode.value,
        acquisition_time_s=acquisition,
        synthesized_na=synthesized_na(config.led_array, config.system),
    )


def check_stack_matches(stack: CaptureStack, config: PipelineConfig) -> None:
    """Raise DataInconsistencyError unless the stack was taken with the configured setup."""
    if stack.system.to_dict() != config.system.to_dict():
        raise DataInconsistencyError(
            f"Stack system {stack.system.to_dict()} does not match config {config.system.to_dict()}"
        )
    if stack.plan.array != config.led_array:
        raise DataInconsistencyError(
            f"Stack LED array {stack.plan.array.to_dict()} does not match config "
            f"{config.led_array.to_dict()}"
        )
    if stack.plan.grid != config.object_grid:
        raise DataInconsistencyError(
            f"Stack grid {stack.plan.grid.to_dict()} does not match config object grid "
            f"{config.object_grid.to_dict()}"
        )


def run_reconstruct(
    config: PipelineConfig,
    stack_dir: Path,
    roi: tuple[int, int, int] | None = None,
    progress: bool = False,
) -> ReconstructSummary:
    """Reconstruct an exported stack, optionally restricted to a square ROI."""
    config.validate(plan_modes=())
    stack = import_stack(stack_dir)
    check_stack_matches(stack, config)
    if roi is not None:
        stack = crop_stack(stack, *roi)

    result = reconstruct(stack, stack.system, config.reconstruction, progress=progress)
    result_dir = config.output_dir / RECONSTRUCTION_DIR
    export_result(result, result_dir)
    return ReconstructSummary(
        result_dir=result_dir,
        frame_count=len(stack),
        iterations=result.iterations,
        final_residual=result.residual_trace[-1],
    )


def run_compare_symmetric(config: PipelineConfig, progress: bool = False) -> list[PairRow]:
    """RMSE and center-row profiles of each requested symmetric pair, for every object kind."""
    config.validate([PlanMode.FULL])
    plan = build_plan(config, PlanMode.FULL)
    out = config.output_dir

    rows: list[PairRow] = []
    for kind in ObjectKind:
        stack = _simulate(config, build_object(config, kind), plan, progress)
        profiles = {}
        for led in config.symmetric_pairs:
            diff = symmetric_pair_difference(stack, led)
            rows.append(
                PairRow(
                    kind=kind.value,
                    led=(led.i, led.j),
                    angle_deg=led_angle_degrees(config.led_array, led),
                    rmse_gray=diff.rmse,
                )
            )
            profiles[f"led_{led.i}_{led.j}_gray"] = diff.profile_a
            profiles[f"led_{diff.partner.i}_{diff.partner.j}_gray"] = diff.profile_b
        write_profiles(out / f"profiles_{kind.value}.csv", profiles)

    write_table(
        out / "symmetric_pairs.csv",
        ["kind", "i", "j", "partner_i", "partner_j", "angle_x_deg", "angle_y_deg", "rmse_gray"],
        (
            {
                "kind": row.kind,
                "i": row.led[0],
                "j": row.led[1],
                "partner_i": -row.led[0],
                "partner_j": -row.led[1],
                "angle_x_deg": row.angle_deg[0],
                "angle_y_deg": row.angle_deg[1],
                "rmse_gray": row.rmse_gray,
            }
            for row in rows
        ),
    )
    return rows


def _channel_image(result: ReconResult, channel: str) -> np.ndarray:
    return result.phase if channel == "phase" else result.amplitude


def _modulation(profile: LineProfile, period_px: int, window: slice) -> float:
    try:
        return modulation_depth(profile, period_px, window)
    except MetricError:
        return 0.0


def _group_contrast(full: np.ndarray, half: np.ndarray, size: int) -> list[GroupContrast]:
    gray_full, gray_half = to_gray(full, half)
    rows = []
    for group in bar_groups(size):
        axis, index = group.profile_line
        window = group.profile_window
        profile_full = line_profile(gray_full, axis, index, normalize=False)
        profile_half = line_profile(gray_half, axis, index, normalize=False)
        rows.append(
            GroupContrast(
                label=group.label,
                period_px=group.period_px,
                contrast_full=michelson_contrast(profile_full, window),
                contrast_half=michelson_contrast(profile_half, window),
                modulation_full=_modulation(profile_full, group.period_px, window),
                modulation_half=_modulation(profile_half, group.period_px, window),
            )
        )
    return rows


def run_full_vs_half(config: PipelineConfig, progress: bool = False) -> FullVsHalfSummary:
    """Reconstruct from the full stack and from its half subset, then compare.

    The half plan uses the configured mode, or half-rows when the config asks for full.
    The half stack is cut from the full capture, and both reconstructions run concurrently.
    """
    half_mode = PlanMode.parse(config.plan.mode)
    if half_mode is PlanMode.FULL:
        half_mode = PlanMode.HALF_ROWS
    config.validate([PlanMode.FULL, half_mode])

    full_plan = build_plan(config, PlanMode.FULL)
    half_plan = build_plan(config, half_mode)
    kind = ObjectKind.parse(config.object.kind)
    full_stack = _simulate(config, build_object(config), full_plan, progress)
    half_stack = full_stack.select(half_plan)

    with ThreadPoolExecutor(max_workers=2) as executor:
        futures = [
            executor.submit(reconstruct, stack, config.system, config.reconstruction)
            for stack in (full_stack, half_stack)
        ]
        full, half = (f.result() for f in futures)
    full = remove_phase_mean(full)
    half = global_phase_align(half, full)

    out = config.output_dir
    export_result(full, out / "full")
    export_result(half, out / "half")

    channel = compared_channel(kind)
    summary = FullVsHalfSummary(
        kind=kind.value,
        compared_channel=channel,
        frames_full=len(full_stack),
        frames_half=len(half_stack),
    )

    profiles: dict[str, Any] = {}
    for name in ("amplitude", "phase"):
        a = _channel_image(full, name)
        b = _channel_image(half, name)
        summary.channels.append(
            ChannelComparison(name, rmse_gray(a, b), normalized_cross_correlation(a, b))
        )
        pa, pb = joint_line_profiles(a, b)
        profiles[f"{name}_full_gray_joint"] = pa
        profiles[f"{name}_half_gray_joint"] = pb
    write_profiles(out / "profiles.csv", profiles)

    write_table(
        out / "comparison.csv",
        ["channel", "rmse_gray", "ncc"],
        ({"channel": c.channel, "rmse_gray": c.rmse_gray, "ncc": c.ncc} for c in summary.channels),
    )

    summary.contrast = _group_contrast(
        _channel_image(full, channel), _channel_image(half, channel), config.object.size_px
    )
    write_table(
        out / "contrast.csv",
        [
            "group",
            "period_px",
            "michelson_full",
            "michelson_half",
            "modulation_full",
            "modulation_half",
        ],
        (
            {
                "group": g.label,
                "period_px": g.period_px,
                "michelson_full": g.contrast_full,
                "michelson_half": g.contrast_half,
                "modulation_full": g.modulation_full,
                "modulation_half": g.modulation_half,
            }
            for g in summary.contrast
        ),
    )

    report = {
        "kind": kind.value,
        "compared_channel": channel,
        "half_mode": half_mode.value,
        "frames_full": len(full_stack),
        "frames_half": len(half_stack),
        "acquisition_time_full_s": full_plan.acquisition_time_s(config.exposure_ms),
        "acquisition_time_half_s": half_plan.acquisition_time_s(config.exposure_ms),
        "crosstalk_full": full.metadata["crosstalk"],
        "crosstalk_half": half.metadata["crosstalk"],
        "phase_offset_half": half.metadata["phase_offset"],
    }
    (out / "summary.json").write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    logger.info(
        "Full vs half (%s): %d vs %d frames, %s NCC %.4f",
        kind.value,
        len(full_stack),
        len(half_stack),
        channel,
        summary.channel(channel).ncc,
    )
    return summary


def run_metrics(
    image_a: Path, image_b: Path, out: Path | None = None, row: int | None = None
) -> dict[str, float]:
    """Compare two grayscale images; optionally write metrics.csv and profiles.csv."""
    a = load_grayscale(image_a)
    b = load_grayscale(image_b)
    results = {
        "rmse_gray": rmse_gray(a, b),
        "ncc": normalized_cross_correlation(a, b),
    }
    profile_a = line_profile(a, "row", row)
    profile_b = line_profile(b, "row", row)
    results["contrast_a"] = michelson_contrast(line_profile(a, "row", row, normalize=False))
    results["contrast_b"] = michelson_contrast(line_profile(b, "row", row, normalize=False))

    if out is not None:
        write_table(
            out / "metrics.csv",
            ["metric", "value"],
            ({"metric": k, "value": v} for k, v in results.items()),
        )
        joint_a, joint_b = joint_line_profiles(a, b, "row", row)
        write_profiles(
            out / "profiles.csv",
            {
                "a_gray": profile_a,
                "b_gray": profile_b,
                "a_gray_joint": joint_a,
                "b_gray_joint": joint_b,
            },
        )
    return results
