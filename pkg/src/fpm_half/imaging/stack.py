"""Capture stacks: per-LED intensity frames bound to their illumination plan."""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from ..core.geometry import IlluminationPlan, LedIndex, PlanEntry, SystemSpec, spectral_shift
from ..core.manifest import FORMAT_VERSION, FrameRecord, Provenance, StackManifest
from ..core.optics import Grid
from ..exceptions import DataInconsistencyError, GeometryError, NumericalError
from .pgm import MAXVAL_16BIT, quantize, read_pgm, write_pgm

logger = logging.getLogger(__name__)

FRAME_NAME = "frame_{:04d}.pgm"


@dataclass(frozen=True, eq=False)
class CaptureStack:
    """Low-resolution intensity frames; frame k was taken under plan entry k."""

    frames: tuple[np.ndarray, ...]
    plan: IlluminationPlan
    system: SystemSpec
    provenance: Provenance = Provenance.SIMULATED

    def __post_init__(self) -> None:
        frames = tuple(np.asarray(f, dtype=np.float64) for f in self.frames)
        object.__setattr__(self, "frames", frames)

        if len(frames) != len(self.plan):
            raise DataInconsistencyError(
                f"Stack has {len(frames)} frames for a {len(self.plan)}-entry plan"
            )

        n = self.system.camera_pixels
        if self.plan.grid.size % n != 0:
            raise DataInconsistencyError(
                f"Plan grid of {self.plan.grid.size} px is not a multiple of the "
                f"{n}-px camera"
            )
        if not np.isclose(self.plan.grid.frequency_step, self.system.camera_grid.frequency_step):
            raise DataInconsistencyError(
                "Plan grid does not cover the camera field of view "
                f"({self.plan.grid.field_of_view_um:.3f} um vs "
                f"{self.system.camera_grid.field_of_view_um:.3f} um)"
            )

        for k, frame in enumerate(frames):
            if frame.shape != (n, n):
                raise DataInconsistencyError(
                    f"Frame {k} has shape {frame.shape}, expected ({n}, {n})"
                )
            if not np.all(np.isfinite(frame)):
                raise NumericalError(f"Frame {k} contains non-finite values")
            if frame.min() < 0:
                raise DataInconsistencyError(f"Frame {k} has negative intensity")

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def upsampling(self) -> int:
        """High-resolution grid size over camera size."""
        return self.plan.grid.size // self.system.camera_pixels

    @property
    def max_intensity(self) -> float:
        return max(float(f.max()) for f in self.frames)

    def has(self, led: LedIndex) -> bool:
        return led in self.plan

    def frame(self, led: LedIndex) -> np.ndarray:
        """Frame taken under one LED.

        Raises:
            DataInconsistencyError: If the LED is not in the stack
        """
        return self.frames[self.plan.index_of(led)]

    def select(self, plan: IlluminationPlan) -> CaptureStack:
        """Frames of a sub-plan, in the sub-plan's order.

        Raises:
            DataInconsistencyError: If the grids differ or an LED was not captured
        """
        if plan.grid != self.plan.grid:
            raise DataInconsistencyError(
                f"Sub-plan grid {plan.grid} differs from stack grid {self.plan.grid}"
            )
        frames = tuple(self.frame(entry.led) for entry in plan)
        logger.info("Selected %d of %d frames (%s)", len(frames), len(self), plan.mode.value)
        return CaptureStack(frames, plan, self.system, self.provenance)


def crop_stack(stack: CaptureStack, top: int, left: int, size: int) -> CaptureStack:
    """Cut the same square region from every frame.

    The plan is rebuilt for the smaller field of view: illumination sines are kept and the
    spectral shifts are recomputed on the new, coarser frequency grid.

    Raises:
        GeometryError: If the region leaves the frames
    """
    n = stack.system.camera_pixels
    if size < 1 or top < 0 or left < 0 or top + size > n or left + size > n:
        raise GeometryError(
            f"ROI top={top} left={left} size={size} does not fit the {n}-px frames"
        )

    factor = stack.upsampling
    system = replace(stack.system, camera_pixels=size)
    grid = Grid(size * factor, stack.plan.grid.pitch_um)
    entries = tuple(
        PlanEntry(
            led=entry.led,
            sin_tx=entry.sin_tx,
            sin_ty=entry.sin_ty,
            shift=spectral_shift((entry.sin_tx, entry.sin_ty), system.wavelength_um, grid),
            bright_field=entry.bright_field,
        )
        for entry in stack.plan
    )
    plan = replace(stack.plan, grid=grid, entries=entries)
    frames = tuple(f[top : top + size, left : left + size] for f in stack.frames)
    logger.info("Cropped stack to %d px ROI at (%d, %d)", size, top, left)
    return CaptureStack(frames, plan, system, stack.provenance)


def export_stack(stack: CaptureStack, directory: Path) -> StackManifest:
    """Write frames as 16-bit PGMs, each scaled by its own maximum, plus manifest.json."""
    directory.mkdir(parents=True, exist_ok=True)
    records = []
    for k, frame in enumerate(stack.frames):
        name = FRAME_NAME.format(k)
        peak = float(frame.max())
        write_pgm(directory / name, quantize(frame, peak, MAXVAL_16BIT), MAXVAL_16BIT)
        records.append(FrameRecord(file=name, max_intensity=peak))

    manifest = StackManifest(
        format_version=FORMAT_VERSION,
        provenance=stack.provenance,
        system=stack.system,
        plan=stack.plan,
        frames=records,
    )
    manifest.save(directory)
    logger.info("Exported %d frames to %s", len(records), directory)
    return manifest


def import_stack(directory: Path) -> CaptureStack:
    """Read a stack written by :func:`export_stack` or prepared by hand in the same layout.

    Raises:
        DataInconsistencyError: If the manifest is missing, malformed, or disagrees with
            the frame files
    """
    manifest = StackManifest.load(directory)
    if len(manifest.frames) != len(manifest.plan):
        raise DataInconsistencyError(
            f"Manifest lists {len(manifest.frames)} frames for a "
            f"{len(manifest.plan)}-entry plan"
        )

    frames = []
    for record in manifest.frames:
        pixels, maxval = read_pgm(directory / record.file)
        frames.append(pixels.astype(np.float64) / maxval * record.max_intensity)

    logger.info("Imported %d frames from %s", len(frames), directory)
    return CaptureStack(tuple(frames), manifest.plan, manifest.system, manifest.provenance)
