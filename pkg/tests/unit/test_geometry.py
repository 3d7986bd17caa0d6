"""Tests for LED geometry and illumination plans."""

from __future__ import annotations

import math

import pytest

from fpm_half.core.geometry import (
    IlluminationPlan,
    LedArraySpec,
    LedIndex,
    PlanMode,
    SystemSpec,
    led_angle,
    led_angle_degrees,
    make_plan,
    spectral_shift,
    spiral_order,
    symmetric_partner,
    synthesized_na,
)
from fpm_half.core.optics import Grid
from fpm_half.exceptions import ConfigError, DataInconsistencyError, GeometryError


@pytest.fixture
def system() -> SystemSpec:
    """Default 128-px system."""
    return SystemSpec()


@pytest.fixture
def grid(system: SystemSpec) -> Grid:
    """512-px object grid."""
    return system.object_grid(4)


class TestSystemSpec:
    """Tests for SystemSpec."""

    def test_derived_quantities(self, system: SystemSpec) -> None:
        """Object-side pitch and cutoff follow from the defaults."""
        assert system.object_pitch_um == pytest.approx(1.625)
        assert system.cutoff_frequency == pytest.approx(0.1 / 0.63)
        assert system.camera_grid == Grid(128, 1.625)
        assert system.object_grid(4) == Grid(512, 0.40625)

    @pytest.mark.parametrize(
        "overrides",
        [
            {"objective_na": 0.0},
            {"objective_na": 1.2},
            {"magnification": -4.0},
            {"wavelength_um": 0.0},
            {"camera_pitch_um": 0.0},
            {"camera_pixels": 0},
        ],
    )
    def test_invalid_values(self, overrides: dict[str, float]) -> None:
        """Out-of-range optics are config errors."""
        with pytest.raises(ConfigError):
            SystemSpec(**overrides)

    def test_from_dict_defaults(self) -> None:
        """Missing keys fall back to defaults."""
        system = SystemSpec.from_dict({"camera_pixels": 64})
        assert system.camera_pixels == 64
        assert system.objective_na == 0.1

    def test_from_dict_bad_type(self) -> None:
        """Unparseable values name the section."""
        with pytest.raises(ConfigError, match="system"):
            SystemSpec.from_dict({"wavelength_um": "red"})


class TestLedArraySpec:
    """Tests for LedArraySpec."""

    def test_even_side_count_rejected(self) -> None:
        """An even array has no central LED."""
        with pytest.raises(ConfigError, match="odd"):
            LedArraySpec(side_count=14)

    def test_indices_row_major(self) -> None:
        """Indices run row-major from the top-left corner."""
        indices = LedArraySpec(side_count=3).indices()
        assert indices[0] == LedIndex(-1, -1)
        assert indices[1] == LedIndex(-1, 0)
        assert indices[-1] == LedIndex(1, 1)
        assert len(indices) == 9

    def test_contains(self) -> None:
        """Bounds are inclusive of the edge rows."""
        array = LedArraySpec()
        assert array.contains(LedIndex(7, -7))
        assert not array.contains(LedIndex(8, 0))


class TestAngles:
    """Tests for illumination angles and spectral shifts."""

    def test_projected_angles(self) -> None:
        """Two and four pitches off axis at 110 mm."""
        array = LedArraySpec()
        assert led_angle_degrees(array, LedIndex(0, 2))[0] == pytest.approx(4.16, abs=0.01)
        assert led_angle_degrees(array, LedIndex(0, 4))[0] == pytest.approx(8.28, abs=0.01)
        assert led_angle_degrees(array, LedIndex(2, 0))[1] == pytest.approx(4.16, abs=0.01)

    def test_center_is_on_axis(self) -> None:
        """The central LED illuminates at normal incidence."""
        assert led_angle(LedArraySpec(), LedIndex(0, 0)) == (0.0, 0.0)

    def test_sines_use_three_dimensional_distance(self) -> None:
        """sinθx divides by the full LED-to-sample distance."""
        sin_x, sin_y = led_angle(LedArraySpec(), LedIndex(1, 1))
        expected = 4.0 / math.sqrt(16 + 16 + 110**2)
        assert sin_x == pytest.approx(expected)
        assert sin_y == pytest.approx(expected)

    def test_columns_are_x(self) -> None:
        """j moves the illumination along x, i along y."""
        sin_x, sin_y = led_angle(LedArraySpec(), LedIndex(0, 3))
        assert sin_x > 0
        assert sin_y == 0.0

    def test_outside_array(self) -> None:
        """LEDs beyond the array are geometry errors."""
        with pytest.raises(GeometryError):
            led_angle(LedArraySpec(), LedIndex(0, 8))

    def test_shift_in_samples(self, grid: Grid) -> None:
        """sin 0.0727 at 0.63 um on the 512-px grid moves the spectrum about 24 samples."""
        shift = spectral_shift((0.0727, 0.0), 0.63, grid)
        assert shift.u == pytest.approx(24.0, abs=0.05)
        assert shift.u_px == 24
        assert shift.v_px == 0

    def test_shift_rounds_to_nearest(self, grid: Grid) -> None:
        """Rounded shifts are within half a sample of the continuous shift."""
        sines = led_angle(LedArraySpec(), LedIndex(3, -5))
        shift = spectral_shift(sines, 0.63, grid)
        assert abs(shift.u - shift.u_px) <= 0.5
        assert abs(shift.v - shift.v_px) <= 0.5

    def test_shift_out_of_grid(self) -> None:
        """A shift larger than half the grid is rejected."""
        with pytest.raises(GeometryError):
            spectral_shift((0.3, 0.0), 0.63, Grid(32, 1.625))

    def test_synthesized_na(self, system: SystemSpec) -> None:
        """Objective NA plus the corner illumination sine."""
        assert synthesized_na(LedArraySpec(15, 4.0, 108.0), system) == pytest.approx(
            0.444, abs=1e-3
        )
        assert synthesized_na(LedArraySpec(17, 4.0, 113.5), system) == pytest.approx(
            0.4704, abs=1e-3
        )

    def test_symmetric_partner(self) -> None:
        """Point reflection through the center."""
        assert symmetric_partner(LedIndex(2, -3)) == LedIndex(-2, 3)
        assert symmetric_partner(LedIndex(0, 0)) == LedIndex(0, 0)


class TestSpiralOrder:
    """Tests for the acquisition order."""

    def test_visits_every_led_once(self) -> None:
        """The spiral is a permutation of the array."""
        order = spiral_order(15)
        assert len(order) == 225
        assert set(order) == set(LedArraySpec().indices())

    def test_starts_at_center_and_grows(self) -> None:
        """Rings are completed from the center outward."""
        order = spiral_order(15)
        assert order[0] == LedIndex(0, 0)
        rings = [max(abs(led.i), abs(led.j)) for led in order]
        assert rings == sorted(rings)
        assert set(order[1:9]) == {
            LedIndex(i, j) for i in (-1, 0, 1) for j in (-1, 0, 1) if (i, j) != (0, 0)
        }


class TestMakePlan:
    """Tests for illumination plans."""

    @pytest.mark.parametrize(
        ("side", "mode", "count"),
        [
            (15, PlanMode.FULL, 225),
            (15, PlanMode.HALF_ROWS, 120),
            (15, PlanMode.MINIMAL_COVER, 113),
            (17, PlanMode.FULL, 289),
            (17, PlanMode.HALF_ROWS, 153),
            (17, PlanMode.MINIMAL_COVER, 145),
        ],
    )
    def test_plan_sizes(
        self, system: SystemSpec, grid: Grid, side: int, mode: PlanMode, count: int
    ) -> None:
        """Frame counts for each mode and array size."""
        array = LedArraySpec(side_count=side, distance_mm=113.5 if side == 17 else 110.0)
        assert len(make_plan(array, mode, system, grid)) == count

    @pytest.mark.parametrize("mode", list(PlanMode))
    def test_half_plans_cover_array_by_reflection(
        self, system: SystemSpec, grid: Grid, mode: PlanMode
    ) -> None:
        """Every plan plus its point reflections reaches every LED."""
        plan = make_plan(LedArraySpec(), mode, system, grid)
        assert plan.covers_array()
        assert plan.entries[0].led == LedIndex(0, 0)

    def test_half_rows_selection(self, system: SystemSpec, grid: Grid) -> None:
        """half-rows keeps i >= 0, or i <= 0 when flipped."""
        plan = make_plan(LedArraySpec(), "half-rows", system, grid)
        assert all(led.i >= 0 for led in plan.leds())
        flipped = make_plan(LedArraySpec(), "half-rows", system, grid, flip=True)
        assert all(led.i <= 0 for led in flipped.leds())
        assert flipped.flip

    def test_minimal_cover_has_one_of_each_pair(self, system: SystemSpec, grid: Grid) -> None:
        """No LED appears together with its reflection, except the center."""
        leds = set(make_plan(LedArraySpec(), "minimal-cover", system, grid).leds())
        for led in leds - {LedIndex(0, 0)}:
            assert symmetric_partner(led) not in leds

    def test_reflected_shifts_are_negated(self, system: SystemSpec, grid: Grid) -> None:
        """Point-symmetric LEDs move the spectrum in opposite directions."""
        plan = make_plan(LedArraySpec(), PlanMode.FULL, system, grid)
        for led in (LedIndex(1, 1), LedIndex(2, -3), LedIndex(7, 7)):
            a = plan.entry(led).shift
            b = plan.entry(symmetric_partner(led)).shift
            assert (a.u_px, a.v_px) == (-b.u_px, -b.v_px)

    def test_bright_field_count(self, system: SystemSpec, grid: Grid) -> None:
        """21 LEDs fall inside the 0.1 NA pupil at 110 mm."""
        plan = make_plan(LedArraySpec(), PlanMode.FULL, system, grid)
        assert sum(entry.bright_field for entry in plan) == 21
        assert plan.entry(LedIndex(0, 0)).bright_field
        assert not plan.entry(LedIndex(2, 2)).bright_field

    def test_acquisition_time(self, system: SystemSpec, grid: Grid) -> None:
        """Capture time scales with the frame count."""
        full = make_plan(LedArraySpec(), PlanMode.FULL, system, grid)
        half = make_plan(LedArraySpec(), PlanMode.HALF_ROWS, system, grid)
        assert full.acquisition_time_s(600) == pytest.approx(135.0)
        assert half.acquisition_time_s(600) == pytest.approx(72.0)

    def test_unknown_mode(self, system: SystemSpec, grid: Grid) -> None:
        """An unknown mode string is a config error naming the field."""
        with pytest.raises(ConfigError, match="plan.mode"):
            make_plan(LedArraySpec(), "quarter", system, grid)

    def test_lookup(self, system: SystemSpec, grid: Grid) -> None:
        """Entries are found by LED; missing LEDs raise."""
        plan = make_plan(LedArraySpec(), PlanMode.HALF_ROWS, system, grid)
        assert LedIndex(3, 2) in plan
        assert plan.entries[plan.index_of(LedIndex(3, 2))].led == LedIndex(3, 2)
        with pytest.raises(DataInconsistencyError):
            plan.index_of(LedIndex(-3, 2))

    def test_duplicate_entries_rejected(self, system: SystemSpec, grid: Grid) -> None:
        """A plan cannot light the same LED twice."""
        plan = make_plan(LedArraySpec(side_count=3), PlanMode.FULL, system, grid)
        with pytest.raises(GeometryError):
            IlluminationPlan(plan.array, plan.mode, plan.grid, plan.entries + plan.entries[:1])

    def test_dict_round_trip(self, system: SystemSpec, grid: Grid) -> None:
        """Plans survive serialization with order and shifts intact."""
        plan = make_plan(LedArraySpec(), PlanMode.MINIMAL_COVER, system, grid, flip=True)
        restored = IlluminationPlan.from_dict(plan.to_dict())
        assert restored.leds() == plan.leds()
        assert restored.entries == plan.entries
        assert restored.mode is PlanMode.MINIMAL_COVER
        assert restored.flip
