"""Complex test objects built from grayscale images or a procedural bar-target generator."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import ndimage

from ..core.optics import ComplexField2D
from ..exceptions import ConfigError, DataInconsistencyError

logger = logging.getLogger(__name__)

BAR_PERIODS_PX = (16, 11, 8, 6, 4)
BAR_CONTRAST = 0.35
BACKGROUND_LEVEL = 0.5
UNDULATION_AMPLITUDE = 0.05
TEXTURE_STD = 0.03
MIN_OBJECT_SIZE = 32

UNIFORM = "uniform"


class ObjectKind(str, Enum):
    """Which channels of the object carry structure."""

    AMPLITUDE_ONLY = "amplitude-only"
    PHASE_ONLY = "phase-only"
    COMPLEX = "complex"

    @classmethod
    def parse(cls, value: ObjectKind | str) -> ObjectKind:
        """Parse a kind string, raising ConfigError on unknown values."""
        if isinstance(value, ObjectKind):
            return value
        try:
            return cls(value)
        except ValueError as e:
            choices = ", ".join(k.value for k in cls)
            raise ConfigError(
                f"object.kind: invalid value {value!r} (expected one of {choices})"
            ) from e


class BarOrientation(str, Enum):
    VERTICAL = "vertical"
    HORIZONTAL = "horizontal"


@dataclass(frozen=True)
class BarGroup:
    """Placement of one three-bar group in the standard test object."""

    period_px: int
    orientation: BarOrientation
    rows: slice
    cols: slice

    @property
    def profile_line(self) -> tuple[str, int]:
        """(axis, index) of the line crossing the bars through the middle of the group."""
        if self.orientation is BarOrientation.VERTICAL:
            return "row", self.center_row
        return "column", self.center_col

    @property
    def profile_window(self) -> slice:
        """Span of the group along its profile line."""
        return self.cols if self.orientation is BarOrientation.VERTICAL else self.rows

    @property
    def center_row(self) -> int:
        return (self.rows.start + self.rows.stop) // 2

    @property
    def center_col(self) -> int:
        return (self.cols.start + self.cols.stop) // 2

    @property
    def label(self) -> str:
        return f"{self.orientation.value}-{self.period_px}px"

    def profile(self, image: np.ndarray) -> np.ndarray:
        """Samples across the bars through the middle of the group."""
        if self.orientation is BarOrientation.VERTICAL:
            return np.asarray(image[self.center_row, self.cols])
        return np.asarray(image[self.rows, self.center_col])


@dataclass(frozen=True, eq=False)
class ComplexObject:
    """Thin sample ``A·exp(jφ)`` on the high-resolution grid."""

    field: ComplexField2D
    amplitude_source: str
    """'uniform', 'image', or a generator tag"""

    phase_source: str
    phase_range: float
    """Upper end of the phase interval in radians"""

    @property
    def amplitude(self) -> np.ndarray:
        return np.abs(self.field.samples)

    @property
    def phase(self) -> np.ndarray:
        return np.angle(self.field.samples)

    @property
    def size(self) -> int:
        return self.field.width


def rescale_amplitude(image: np.ndarray) -> np.ndarray:
    """Scale a grayscale image into [0, 1].

    Non-negative images are divided by their maximum so the zero level is kept; images with
    negative samples are min-max rescaled. A constant image maps to 1.
    """
    image = np.asarray(image, dtype=np.float64)
    lo = float(image.min())
    hi = float(image.max())
    if hi == lo:
        return np.ones_like(image)
    if lo < 0:
        return (image - lo) / (hi - lo)
    return image / hi


def rescale_phase(image: np.ndarray, phase_range: float) -> np.ndarray:
    """Map an image's minimum to 0 and its maximum to ``phase_range``. Constant maps to 0."""
    image = np.asarray(image, dtype=np.float64)
    lo = float(image.min())
    hi = float(image.max())
    if hi == lo:
        return np.zeros_like(image)
    return (image - lo) / (hi - lo) * phase_range


def make_object(
    amp_image: np.ndarray | None,
    phase_image: np.ndarray | None,
    phase_range: float,
    pitch_um: float = 1.0,
    size: int | None = None,
) -> ComplexObject:
    """Combine amplitude and phase images into ``A·exp(jφ)``.

    Args:
        amp_image: Grayscale amplitude source, or None for uniform amplitude 1
        phase_image: Grayscale phase source, or None for uniform phase 0
        phase_range: Phase interval upper end in radians
        pitch_um: Sample pitch of the high-resolution grid
        size: Side length, required only when both sources are uniform

    Returns:
        Object with amplitude in [0, 1] and phase in [0, phase_range]

    Raises:
        ConfigError: If phase_range is negative or no size can be determined
        DataInconsistencyError: If the two images differ in shape
    """
    if phase_range < 0:
        raise ConfigError(f"object.phase_range_rad must be >= 0, got {phase_range}")

    shapes = {np.shape(img) for img in (amp_image, phase_image) if img is not None}
    if len(shapes) > 1:
        raise DataInconsistencyError(
            f"Amplitude and phase images differ in shape: {sorted(shapes)}"
        )
    if shapes:
        shape = shapes.pop()
    elif size is not None:
        shape = (size, size)
    else:
        raise ConfigError("object.size_px is required when both sources are uniform")

    amplitude = np.ones(shape) if amp_image is None else rescale_amplitude(amp_image)
    phase = np.zeros(shape) if phase_image is None else rescale_phase(phase_image, phase_range)

    return ComplexObject(
        field=ComplexField2D(amplitude * np.exp(1j * phase), pitch_um),
        amplitude_source=UNIFORM if amp_image is None else "image",
        phase_source=UNIFORM if phase_image is None else "image",
        phase_range=phase_range,
    )


def bar_groups(size: int) -> list[BarGroup]:
    """Layout of the bar groups in a ``size`` × ``size`` standard object.

    Vertical-bar groups sit in a band centered on row ``size // 4``; horizontal-bar groups of
    the same periods occupy the same columns in a band centered on row ``3 * size // 4``.
    Groups that do not fit inside the margin are left out.
    """
    margin = size // 16
    groups: list[BarGroup] = []
    x = margin
    for period in BAR_PERIODS_PX:
        extent = 3 * period
        if x + extent > size - margin:
            continue
        cols = slice(x, x + extent)
        for orientation, row_center in (
            (BarOrientation.VERTICAL, size // 4),
            (BarOrientation.HORIZONTAL, 3 * size // 4),
        ):
            top = row_center - extent // 2
            if top < 0 or top + extent > size:
                continue
            groups.append(BarGroup(period, orientation, slice(top, top + extent), cols))
        x += extent + period
    return groups


def _bar_pattern(size: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    yy, xx = np.indices((size, size), dtype=np.float64)

    background = BACKGROUND_LEVEL + UNDULATION_AMPLITUDE * (
        np.sin(2 * np.pi * xx / size) * np.cos(2 * np.pi * yy / size)
    )
    texture = ndimage.gaussian_filter(rng.standard_normal((size, size)), size / 32, mode="wrap")
    spread = float(texture.std())
    if spread > 0:
        background += TEXTURE_STD * texture / spread

    pattern = background.copy()
    for group in bar_groups(size):
        rows, cols = group.rows, group.cols
        if group.orientation is BarOrientation.VERTICAL:
            offset = xx[rows, cols] - cols.start
        else:
            offset = yy[rows, cols] - rows.start
        bar = np.where(np.mod(offset, group.period_px) < group.period_px / 2, 1.0, -1.0)
        pattern[rows, cols] = background[rows, cols] + BAR_CONTRAST * bar

    return np.clip(pattern, 0.0, 1.0)


def standard_test_object(
    kind: ObjectKind | str,
    size: int,
    phase_range: float,
    seed: int = 0,
    pitch_um: float = 1.0,
) -> ComplexObject:
    """Deterministic bar-target object.

    The pattern is a set of three-bar groups at decreasing periods over a smooth background
    (a periodic low-frequency undulation plus seeded, smoothed texture). Bars sit symmetric
    about the local background so each group has the same mean as its surroundings.

    Args:
        kind: amplitude-only, phase-only, or complex
        size: Side length in pixels (>= 32)
        phase_range: Phase interval upper end in radians
        seed: Texture seed
        pitch_um: Sample pitch of the high-resolution grid

    Returns:
        The object; the complex kind uses a transposed, reseeded pattern for its phase
    """
    object_kind = ObjectKind.parse(kind)
    if size < MIN_OBJECT_SIZE:
        raise ConfigError(f"object.size_px must be >= {MIN_OBJECT_SIZE}, got {size}")

    pattern = _bar_pattern(size, seed)
    tag = f"bars(seed={seed})"

    if object_kind is ObjectKind.AMPLITUDE_ONLY:
        obj = make_object(pattern, None, phase_range, pitch_um)
        amplitude_source, phase_source = tag, UNIFORM
    elif object_kind is ObjectKind.PHASE_ONLY:
        obj = make_object(None, pattern, phase_range, pitch_um)
        amplitude_source, phase_source = UNIFORM, tag
    else:
        phase_pattern = _bar_pattern(size, seed + 1).T
        obj = make_object(pattern, phase_pattern, phase_range, pitch_um)
        amplitude_source, phase_source = tag, f"bars(seed={seed + 1}).T"

    logger.debug("Built %s standard object, %d px", object_kind.value, size)
    return ComplexObject(
        field=obj.field,
        amplitude_source=amplitude_source,
        phase_source=phase_source,
        phase_range=phase_range,
    )
