"""Image comparison metrics on an 8-bit gray scale.

Images are compared after an affine map onto [0, 255]. RMSE and the comparison CSVs use a
joint map over both images; single-image line profiles use the image's own range.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..exceptions import DataInconsistencyError, MetricError, NumericalError

GRAY_MAX = 255.0
RANGE_EPS = 1e-12


class ProfileAxis(str, Enum):
    ROW = "row"
    COLUMN = "column"


@dataclass(frozen=True, eq=False)
class LineProfile:
    """Gray values along one row or column of an image."""

    axis: ProfileAxis
    """row: a horizontal line at ``index``; column: a vertical line at ``index``"""

    index: int
    values: np.ndarray
    positions: np.ndarray
    """Pixel positions along the line"""

    def __len__(self) -> int:
        return int(self.values.size)


def _as_image(image: np.ndarray, name: str) -> np.ndarray:
    array = np.asarray(image, dtype=np.float64)
    if not np.all(np.isfinite(array)):
        raise NumericalError(f"Image {name} contains non-finite values")
    return array


def _check_shapes(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DataInconsistencyError(f"Image shapes differ: {a.shape} vs {b.shape}")


def _gray_map(images: tuple[np.ndarray, ...]) -> tuple[float, float] | None:
    """Offset and scale onto [0, 255], or None when the joint range is degenerate."""
    lo = min(float(img.min()) for img in images)
    hi = max(float(img.max()) for img in images)
    scale = max(abs(lo), abs(hi))
    if scale == 0 or hi - lo <= RANGE_EPS * scale:
        return None
    return lo, GRAY_MAX / (hi - lo)


def to_gray(*images: np.ndarray) -> tuple[np.ndarray, ...]:
    """Map images onto [0, 255] with one shared affine map.

    A degenerate joint range (all samples equal) maps everything to 0.
    """
    arrays = tuple(_as_image(img, str(k)) for k, img in enumerate(images))
    mapping = _gray_map(arrays)
    if mapping is None:
        return tuple(np.zeros_like(a) for a in arrays)
    lo, gain = mapping
    return tuple((a - lo) * gain for a in arrays)


def rmse_gray(a: np.ndarray, b: np.ndarray) -> float:
    """Root-mean-square difference after a joint [0, 255] map.

    Raises:
        DataInconsistencyError: If the shapes differ
        NumericalError: If either image has non-finite samples
    """
    a = _as_image(a, "a")
    b = _as_image(b, "b")
    _check_shapes(a, b)
    ga, gb = to_gray(a, b)
    return float(np.sqrt(np.mean((ga - gb) ** 2)))


def _line(image: np.ndarray, axis: ProfileAxis | str, index: int | None) -> tuple[ProfileAxis, int]:
    profile_axis = ProfileAxis(axis)
    extent = image.shape[0] if profile_axis is ProfileAxis.ROW else image.shape[1]
    if index is None:
        index = extent // 2
    if not 0 <= index < extent:
        raise DataInconsistencyError(
            f"{profile_axis.value} index {index} outside image extent {extent}"
        )
    return profile_axis, index


def _take(image: np.ndarray, axis: ProfileAxis, index: int) -> np.ndarray:
    return image[index, :] if axis is ProfileAxis.ROW else image[:, index]


def line_profile(
    image: np.ndarray,
    axis: ProfileAxis | str = ProfileAxis.ROW,
    index: int | None = None,
    normalize: bool = True,
) -> LineProfile:
    """Extract one row or column.

    Args:
        image: 2-D image
        axis: row or column
        index: Row or column number; the center line when None
        normalize: Map through the image's own [min, max] onto [0, 255]

    Returns:
        The profile

    Raises:
        DataInconsistencyError: If the index is out of range
    """
    image = _as_image(image, "image")
    profile_axis, index = _line(image, axis, index)
    if normalize:
        (image,) = to_gray(image)
    values = np.array(_take(image, profile_axis, index))
    return LineProfile(profile_axis, index, values, np.arange(values.size))


def joint_line_profiles(
    a: np.ndarray,
    b: np.ndarray,
    axis: ProfileAxis | str = ProfileAxis.ROW,
    index: int | None = None,
) -> tuple[LineProfile, LineProfile]:
    """Profiles of two images through one shared [0, 255] map."""
    a = _as_image(a, "a")
    b = _as_image(b, "b")
    _check_shapes(a, b)
    profile_axis, index = _line(a, axis, index)
    ga, gb = to_gray(a, b)
    positions = np.arange(_take(ga, profile_axis, index).size)
    return (
        LineProfile(profile_axis, index, np.array(_take(ga, profile_axis, index)), positions),
        LineProfile(profile_axis, index, np.array(_take(gb, profile_axis, index)), positions),
    )


def normalized_cross_correlation(a: np.ndarray, b: np.ndarray) -> float:
    """Pearson correlation over all pixels.

    One constant image gives 0.

    Raises:
        DataInconsistencyError: If the shapes differ
        MetricError: If both images are constant
    """
    a = _as_image(a, "a")
    b = _as_image(b, "b")
    _check_shapes(a, b)
    da = a - a.mean()
    db = b - b.mean()
    na = float(np.sqrt(np.sum(da * da)))
    nb = float(np.sqrt(np.sum(db * db)))
    if na == 0 and nb == 0:
        raise MetricError("Cross-correlation is undefined for two constant images")
    if na == 0 or nb == 0:
        return 0.0
    return float(np.clip(np.sum(da * db) / (na * nb), -1.0, 1.0))


def _window_values(profile: LineProfile | np.ndarray, window: slice | None) -> np.ndarray:
    values = profile.values if isinstance(profile, LineProfile) else np.asarray(profile)
    values = np.asarray(values, dtype=np.float64)
    if window is not None:
        if window.start is not None and not 0 <= window.start < values.size:
            raise DataInconsistencyError(f"Window {window} outside profile of {values.size}")
        if window.stop is not None and not 0 < window.stop <= values.size:
            raise DataInconsistencyError(f"Window {window} outside profile of {values.size}")
        values = values[window]
    if values.size == 0:
        raise DataInconsistencyError("Empty profile window")
    return values


def michelson_contrast(profile: LineProfile | np.ndarray, window: slice | None = None) -> float:
    """``(max - min) / (max + min)`` over a window; 0 for a constant window.

    Raises:
        MetricError: If max + min is zero for a non-constant window
    """
    values = _window_values(profile, window)
    hi = float(values.max())
    lo = float(values.min())
    if hi == lo:
        return 0.0
    if hi + lo == 0:
        raise MetricError("Michelson contrast is undefined when max + min = 0")
    return (hi - lo) / (hi + lo)


def modulation_depth(
    profile: LineProfile | np.ndarray, period_px: float, window: slice | None = None
) -> float:
    """Amplitude of the fundamental at ``period_px`` relative to the window mean.

    A lock-in estimate: ``2 |Σ v·exp(-j2πx/p)| / N`` divided by ``mean(v)``. A pure
    sinusoid ``m·(1 + d·cos)`` gives ``d`` when the window spans whole periods.

    Raises:
        MetricError: If the window mean is zero
    """
    if not period_px > 0:
        raise MetricError(f"Period must be positive, got {period_px}")
    values = _window_values(profile, window)
    mean = float(values.mean())
    if mean == 0:
        raise MetricError("Modulation depth is undefined for a zero-mean window")
    x = np.arange(values.size)
    fundamental = 2.0 * abs(np.sum(values * np.exp(-2j * np.pi * x / period_px))) / values.size
    return float(fundamental / abs(mean))


def amplitude_phase_crosstalk(amplitude: np.ndarray, phase: np.ndarray) -> float:
    """Pearson correlation between amplitude and phase maps; 0 when either is constant."""
    try:
        return normalized_cross_correlation(amplitude, phase)
    except MetricError:
        return 0.0
