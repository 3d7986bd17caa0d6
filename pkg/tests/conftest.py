"""Shared pytest fixtures for fpm-half tests."""

from __future__ import annotations

import json
import math
import shutil
import tempfile
from collections.abc import Generator
from pathlib import Path
from typing import Any

import pytest

from fpm_half.core.geometry import IlluminationPlan, LedArraySpec, PlanMode, SystemSpec, make_plan
from fpm_half.core.optics import Grid
from fpm_half.imaging.forward import simulate_stack
from fpm_half.imaging.objects import ComplexObject, ObjectKind, standard_test_object
from fpm_half.imaging.stack import CaptureStack

SMALL_FACTOR = 4
PHASE_RANGE = math.pi / 2
REFERENCE_FILE = Path(__file__).parent / "fixtures" / "reference_values.json"


class ReferenceValues:
    """Numbers frozen from an earlier run of the same deterministic computation.

    A key missing from the file is recorded and the test is skipped; once present, later
    runs must reproduce the value to within ``rel``. Delete a key to re-record it.
    """

    def __init__(self, path: Path) -> None:
        self.path = path
        self.values: dict[str, float] = (
            json.loads(path.read_text(encoding="utf-8")) if path.exists() else {}
        )

    def check(self, key: str, value: float, rel: float = 0.01) -> None:
        if key not in self.values:
            self.values[key] = float(value)
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self.path.write_text(
                json.dumps(self.values, indent=2, sort_keys=True) + "\n", encoding="utf-8"
            )
            pytest.skip(f"Recorded reference {key} = {value:.6g}")
        assert value == pytest.approx(self.values[key], rel=rel), key


@pytest.fixture
def temp_dir() -> Generator[Path, None, None]:
    """Create a temporary directory for tests.

    Yields:
        Path to temporary directory (cleaned up after test)
    """
    temp_path = Path(tempfile.mkdtemp(prefix="fpm_half_test_"))
    try:
        yield temp_path
    finally:
        shutil.rmtree(temp_path, ignore_errors=True)


@pytest.fixture(scope="session")
def reference_values() -> ReferenceValues:
    """Frozen reference numbers from tests/fixtures/reference_values.json."""
    return ReferenceValues(REFERENCE_FILE)


@pytest.fixture(scope="session")
def small_system() -> SystemSpec:
    """Default optics with a 64-px camera.

    Returns:
        System whose 256-px object grid holds every 15x15 shift
    """
    return SystemSpec(camera_pixels=64)


@pytest.fixture(scope="session")
def led_array() -> LedArraySpec:
    """Default 15x15 array at 4 mm pitch, 110 mm from the sample."""
    return LedArraySpec()


@pytest.fixture(scope="session")
def small_grid(small_system: SystemSpec) -> Grid:
    """256-px object grid of the small system."""
    return small_system.object_grid(SMALL_FACTOR)


@pytest.fixture(scope="session")
def full_plan(
    led_array: LedArraySpec, small_system: SystemSpec, small_grid: Grid
) -> IlluminationPlan:
    """All 225 LEDs in spiral order."""
    return make_plan(led_array, PlanMode.FULL, small_system, small_grid)


@pytest.fixture(scope="session")
def half_plan(
    led_array: LedArraySpec, small_system: SystemSpec, small_grid: Grid
) -> IlluminationPlan:
    """Rows i >= 0 at full width."""
    return make_plan(led_array, PlanMode.HALF_ROWS, small_system, small_grid)


@pytest.fixture(scope="session")
def objects(small_grid: Grid) -> dict[ObjectKind, ComplexObject]:
    """Standard bar-target object of each kind on the small grid.

    Returns:
        Mapping from object kind to object
    """
    return {
        kind: standard_test_object(kind, small_grid.size, PHASE_RANGE, 0, small_grid.pitch_um)
        for kind in ObjectKind
    }


@pytest.fixture(scope="session")
def full_stacks(
    objects: dict[ObjectKind, ComplexObject],
    small_system: SystemSpec,
    full_plan: IlluminationPlan,
) -> dict[ObjectKind, CaptureStack]:
    """Noise-free full stacks of every object kind, simulated once per session."""
    return {
        kind: simulate_stack(obj, small_system, full_plan, workers=2)
        for kind, obj in objects.items()
    }


@pytest.fixture
def sample_config(temp_dir: Path) -> dict[str, Any]:
    """Small pipeline config: 32-px camera, 128-px object, a few sweeps.

    Args:
        temp_dir: Temporary directory fixture

    Returns:
        Config mapping with output_dir inside temp_dir
    """
    return {
        "system": {
            "objective_na": 0.1,
            "magnification": 4,
            "wavelength_um": 0.63,
            "camera_pitch_um": 6.5,
            "camera_pixels": 32,
        },
        "led_array": {"side_count": 15, "led_pitch_mm": 4.0, "distance_mm": 110.0},
        "object": {"kind": "amplitude-only", "size_px": 128},
        "plan": {"mode": "full"},
        "reconstruction": {"iterations": 3},
        "symmetric_pairs": [[1, 1], [2, 2]],
        "output_dir": str(temp_dir / "out"),
        "seed": 0,
    }


@pytest.fixture
def config_file(temp_dir: Path, sample_config: dict[str, Any]) -> Path:
    """Write the sample config as JSON.

    Args:
        temp_dir: Temporary directory fixture
        sample_config: Config mapping

    Returns:
        Path to config.json
    """
    path = temp_dir / "config.json"
    path.write_text(json.dumps(sample_config, indent=2))
    return path
