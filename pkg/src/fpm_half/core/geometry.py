"""LED-array geometry: illumination angles, spectral shifts, and illumination plans."""

from __future__ import annotations

import logging
import math
from collections.abc import Iterator
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, NamedTuple

from ..exceptions import ConfigError, DataInconsistencyError, GeometryError
from .optics import Grid

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SystemSpec:
    """Microscope and camera parameters."""

    objective_na: float = 0.1
    """Objective numerical aperture"""

    magnification: float = 4.0
    """Objective magnification"""

    wavelength_um: float = 0.63
    """Illumination wavelength in micrometers"""

    camera_pitch_um: float = 6.5
    """Camera pixel pitch in micrometers"""

    camera_pixels: int = 128
    """Camera pixels per side"""

    focal_length_mm: float = 45.0
    """Objective focal length (informational only)"""

    def __post_init__(self) -> None:
        if not 0 < self.objective_na < 1:
            raise ConfigError(f"system.objective_na must be in (0, 1), got {self.objective_na}")
        if not self.magnification > 0:
            raise ConfigError(f"system.magnification must be positive, got {self.magnification}")
        if not self.wavelength_um > 0:
            raise ConfigError(f"system.wavelength_um must be positive, got {self.wavelength_um}")
        if not self.camera_pitch_um > 0:
            raise ConfigError(
                f"system.camera_pitch_um must be positive, got {self.camera_pitch_um}"
            )
        if int(self.camera_pixels) != self.camera_pixels or self.camera_pixels < 1:
            raise ConfigError(
                f"system.camera_pixels must be a positive integer, got {self.camera_pixels}"
            )

    @property
    def object_pitch_um(self) -> float:
        """Camera pixel pitch referred to the object plane."""
        return self.camera_pitch_um / self.magnification

    @property
    def cutoff_frequency(self) -> float:
        """Coherent cutoff NA/λ in cycles per micrometer."""
        return self.objective_na / self.wavelength_um

    @property
    def camera_grid(self) -> Grid:
        return Grid(self.camera_pixels, self.object_pitch_um)

    def object_grid(self, upsampling: int) -> Grid:
        """High-resolution grid covering the camera field of view."""
        return self.camera_grid.scaled(upsampling)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary with unit-suffixed keys."""
        return {
            "objective_na": self.objective_na,
            "magnification": self.magnification,
            "wavelength_um": self.wavelength_um,
            "camera_pitch_um": self.camera_pitch_um,
            "camera_pixels": self.camera_pixels,
            "focal_length_mm": self.focal_length_mm,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> SystemSpec:
        """Create from dictionary, falling back to defaults for missing keys."""
        defaults = cls.__dataclass_fields__
        try:
            return cls(
                objective_na=float(data.get("objective_na", defaults["objective_na"].default)),
                magnification=float(data.get("magnification", defaults["magnification"].default)),
                wavelength_um=float(data.get("wavelength_um", defaults["wavelength_um"].default)),
                camera_pitch_um=float(
                    data.get("camera_pitch_um", defaults["camera_pitch_um"].default)
                ),
                camera_pixels=int(data.get("camera_pixels", defaults["camera_pixels"].default)),
                focal_length_mm=float(
                    data.get("focal_length_mm", defaults["focal_length_mm"].default)
                ),
            )
        except (TypeError, ValueError) as e:
            raise ConfigError(f"system: {e}") from e


@dataclass(frozen=True)
class LedArraySpec:
    """Square planar LED array centered on the optical axis."""

    side_count: int = 15
    """LEDs per side (odd, so one LED sits on axis)"""

    led_pitch_mm: float = 4.0
    """Spacing between adjacent LEDs"""

    distance_mm: float = 110.0
    """Distance from the array plane to the sample"""

    def __post_init__(self) -> None:
        if int(self.side_count) != self.side_count or self.side_count < 1:
            raise ConfigError(
                f"led_array.side_count must be a positive integer, got {self.side_count}"
            )
        if self.side_count % 2 == 0:
            raise ConfigError(f"led_array.side_count must be odd, got {self.side_count}")
        if not self.led_pitch_mm > 0:
            raise ConfigError(f"led_array.led_pitch_mm must be positive, got {self.led_pitch_mm}")
        if not self.distance_mm > 0:
            raise ConfigError(f"led_array.distance_mm must be positive, got {self.distance_mm}")

    @property
    def half_extent(self) -> int:
        """Largest row or column offset from the central LED."""
        return (self.side_count - 1) // 2

    @property
    def led_count(self) -> int:
        return self.side_count * self.side_count

    def contains(self, led: LedIndex) -> bool:
        h = self.half_extent
        return abs(led.i) <= h and abs(led.j) <= h

    def indices(self) -> list[LedIndex]:
        """All LED indices, row-major from the top-left corner."""
        h = self.half_extent
        return [LedIndex(i, j) for i in range(-h, h + 1) for j in range(-h, h + 1)]

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary with unit-suffixed keys."""
        return {
            "side_count": self.side_count,
            "led_pitch_mm": self.led_pitch_mm,
            "distance_mm": self.distance_mm,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> LedArraySpec:
        """Create from dictionary, falling back to defaults for missing keys."""
        try:
            return cls(
                side_count=int(data.get("side_count", 15)),
                led_pitch_mm=float(data.get("led_pitch_mm", 4.0)),
                distance_mm=float(data.get("distance_mm", 110.0)),
            )
        except (TypeError, ValueError) as e:
            raise ConfigError(f"led_array: {e}") from e


class LedIndex(NamedTuple):
    """LED position as (row, column) offsets from the central LED."""

    i: int
    j: int


class PlanMode(str, Enum):
    """Which LEDs an illumination plan lights."""

    FULL = "full"
    HALF_ROWS = "half-rows"
    MINIMAL_COVER = "minimal-cover"

    @classmethod
    def parse(cls, value: PlanMode | str) -> PlanMode:
        """Parse a mode string, raising ConfigError on unknown values."""
        if isinstance(value, PlanMode):
            return value
        try:
            return cls(value)
        except ValueError as e:
            choices = ", ".join(m.value for m in cls)
            raise ConfigError(
                f"plan.mode: invalid value {value!r} (expected one of {choices})"
            ) from e


@dataclass(frozen=True)
class SpectralShift:
    """Spectrum displacement caused by one illumination angle."""

    u: float
    """Continuous shift along columns, in frequency samples"""

    v: float
    """Continuous shift along rows, in frequency samples"""

    u_px: int
    """Rounded column shift"""

    v_px: int
    """Rounded row shift"""


@dataclass(frozen=True)
class PlanEntry:
    """One illuminated LED with its direction sines and spectral shift."""

    led: LedIndex
    sin_tx: float
    sin_ty: float
    shift: SpectralShift
    bright_field: bool
    """True when the illumination frequency falls inside the objective pupil"""

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "i": self.led.i,
            "j": self.led.j,
            "sin_tx": self.sin_tx,
            "sin_ty": self.sin_ty,
            "shift_u": self.shift.u,
            "shift_v": self.shift.v,
            "shift_px_u": self.shift.u_px,
            "shift_px_v": self.shift.v_px,
            "bright_field": self.bright_field,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> PlanEntry:
        """Create from dictionary."""
        return cls(
            led=LedIndex(int(data["i"]), int(data["j"])),
            sin_tx=float(data["sin_tx"]),
            sin_ty=float(data["sin_ty"]),
            shift=SpectralShift(
                u=float(data["shift_u"]),
                v=float(data["shift_v"]),
                u_px=int(data["shift_px_u"]),
                v_px=int(data["shift_px_v"]),
            ),
            bright_field=bool(data["bright_field"]),
        )


@dataclass(frozen=True)
class IlluminationPlan:
    """Ordered LED entries for one acquisition, center first, spiralling outward."""

    array: LedArraySpec
    mode: PlanMode
    grid: Grid
    """High-resolution grid the shifts are expressed on"""

    entries: tuple[PlanEntry, ...]
    flip: bool = False
    """True when the mirrored half-plane was selected"""

    _lookup: dict[LedIndex, int] = field(
        default_factory=dict, init=False, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        lookup = {entry.led: k for k, entry in enumerate(self.entries)}
        if len(lookup) != len(self.entries):
            raise GeometryError("Illumination plan entries must be unique by LED index")
        object.__setattr__(self, "_lookup", lookup)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[PlanEntry]:
        return iter(self.entries)

    def __contains__(self, led: object) -> bool:
        return led in self._lookup

    def leds(self) -> list[LedIndex]:
        return [entry.led for entry in self.entries]

    def index_of(self, led: LedIndex) -> int:
        """Position of an LED in the plan.

        Raises:
            DataInconsistencyError: If the LED is not part of the plan
        """
        try:
            return self._lookup[LedIndex(*led)]
        except KeyError as e:
            raise DataInconsistencyError(
                f"LED ({led[0]}, {led[1]}) is not in the {self.mode.value} plan"
            ) from e

    def entry(self, led: LedIndex) -> PlanEntry:
        return self.entries[self.index_of(led)]

    def covers_array(self) -> bool:
        """Whether the entries plus their point reflections cover the whole array."""
        covered = set(self._lookup)
        covered |= {symmetric_partner(led) for led in covered}
        return covered == set(self.array.indices())

    def acquisition_time_s(self, exposure_ms: float) -> float:
        """Capture time at a fixed per-frame exposure."""
        return len(self.entries) * exposure_ms / 1000.0

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary for the JSON manifest."""
        return {
            "array": self.array.to_dict(),
            "mode": self.mode.value,
            "flip": self.flip,
            "grid": self.grid.to_dict(),
            "entries": [entry.to_dict() for entry in self.entries],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> IlluminationPlan:
        """Create from dictionary."""
        return cls(
            array=LedArraySpec.from_dict(data["array"]),
            mode=PlanMode.parse(data["mode"]),
            grid=Grid.from_dict(data["grid"]),
            entries=tuple(PlanEntry.from_dict(e) for e in data["entries"]),
            flip=bool(data.get("flip", False)),
        )


def _check_bounds(array: LedArraySpec, led: LedIndex) -> None:
    if not array.contains(led):
        raise GeometryError(
            f"LED ({led.i}, {led.j}) is outside the {array.side_count}x{array.side_count} array"
        )


def led_angle(array: LedArraySpec, led: LedIndex) -> tuple[float, float]:
    """Direction sines of the illumination from one LED.

    Uses the full 3-D unit vector: ``sinθx = x / sqrt(x² + y² + d²)``, with ``x`` along
    columns (``j``) and ``y`` along rows (``i``).

    Args:
        array: LED array geometry
        led: LED offsets from the center

    Returns:
        (sinθx, sinθy)

    Raises:
        GeometryError: If the LED is outside the array
    """
    _check_bounds(array, led)
    x = led.j * array.led_pitch_mm
    y = led.i * array.led_pitch_mm
    r = math.sqrt(x * x + y * y + array.distance_mm**2)
    return x / r, y / r


def led_angle_degrees(array: LedArraySpec, led: LedIndex) -> tuple[float, float]:
    """Per-axis projected illumination angles ``atan(x/d)``, ``atan(y/d)`` in degrees."""
    _check_bounds(array, led)
    x = led.j * array.led_pitch_mm
    y = led.i * array.led_pitch_mm
    return (
        math.degrees(math.atan2(x, array.distance_mm)),
        math.degrees(math.atan2(y, array.distance_mm)),
    )


def spectral_shift(angle: tuple[float, float], wavelength_um: float, grid: Grid) -> SpectralShift:
    """Convert direction sines into a spectrum displacement on ``grid``.

    Args:
        angle: (sinθx, sinθy)
        wavelength_um: Illumination wavelength
        grid: High-resolution grid

    Returns:
        Continuous and nearest-integer shifts in frequency samples

    Raises:
        GeometryError: If the rounded shift leaves the grid
    """
    step = grid.frequency_step
    u = angle[0] / wavelength_um / step
    v = angle[1] / wavelength_um / step
    u_px = int(round(u))
    v_px = int(round(v))
    limit = grid.size // 2
    if abs(u_px) > limit or abs(v_px) > limit:
        raise GeometryError(
            f"Spectral shift ({u_px}, {v_px}) px exceeds the {grid.size}-px grid (limit {limit})"
        )
    return SpectralShift(u=u, v=v, u_px=u_px, v_px=v_px)


def synthesized_na(array: LedArraySpec, system: SystemSpec) -> float:
    """Objective NA plus the largest illumination direction sine (a corner LED)."""
    corner = array.half_extent * array.led_pitch_mm
    radial = math.hypot(corner, corner)
    return system.objective_na + radial / math.sqrt(radial**2 + array.distance_mm**2)


def symmetric_partner(led: LedIndex) -> LedIndex:
    """Point reflection through the central LED."""
    return LedIndex(-led.i, -led.j)


def spiral_order(side_count: int) -> list[LedIndex]:
    """Square spiral from the central LED outward, one full ring at a time."""
    half = (side_count - 1) // 2
    order: list[LedIndex] = []
    x, y = 0, 0
    dx, dy = 0, -1
    for _ in range(side_count * side_count):
        if -half <= x <= half and -half <= y <= half:
            order.append(LedIndex(y, x))
        if x == y or (x < 0 and x == -y) or (x > 0 and x == 1 - y):
            dx, dy = -dy, dx
        x, y = x + dx, y + dy
    return order


def _selected(led: LedIndex, mode: PlanMode, flip: bool) -> bool:
    if mode is PlanMode.FULL:
        return True
    if mode is PlanMode.HALF_ROWS:
        return led.i <= 0 if flip else led.i >= 0
    partner = symmetric_partner(led)
    if led == partner:
        return True
    return led > partner if flip else led < partner


def make_plan(
    array: LedArraySpec,
    mode: PlanMode | str,
    system: SystemSpec,
    grid: Grid,
    flip: bool = False,
) -> IlluminationPlan:
    """Build an illumination plan.

    ``full`` lights every LED; ``half-rows`` keeps rows ``i >= 0`` (``i <= 0`` with
    ``flip``) at full width; ``minimal-cover`` keeps the center plus one member of each
    symmetric pair.

    Args:
        array: LED array geometry
        mode: Plan mode or its string value
        system: Microscope parameters
        grid: High-resolution grid for the spectral shifts
        flip: Select the mirrored half-plane

    Returns:
        Plan in spiral order

    Raises:
        ConfigError: If the mode is unknown
        GeometryError: If a shift leaves the grid
    """
    plan_mode = PlanMode.parse(mode)
    entries = []
    for led in spiral_order(array.side_count):
        if not _selected(led, plan_mode, flip):
            continue
        sines = led_angle(array, led)
        entries.append(
            PlanEntry(
                led=led,
                sin_tx=sines[0],
                sin_ty=sines[1],
                shift=spectral_shift(sines, system.wavelength_um, grid),
                bright_field=math.hypot(*sines) <= system.objective_na,
            )
        )

    logger.info(
        "Plan %s: %d of %d LEDs (%d bright-field)",
        plan_mode.value,
        len(entries),
        array.led_count,
        sum(e.bright_field for e in entries),
    )
    return IlluminationPlan(
        array=array, mode=plan_mode, grid=grid, entries=tuple(entries), flip=flip
    )
