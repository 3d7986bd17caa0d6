"""Tests for image comparison metrics."""

from __future__ import annotations

import numpy as np
import pytest

from fpm_half.evaluation.metrics import (
    ProfileAxis,
    amplitude_phase_crosstalk,
    joint_line_profiles,
    line_profile,
    michelson_contrast,
    modulation_depth,
    normalized_cross_correlation,
    rmse_gray,
    to_gray,
)
from fpm_half.exceptions import DataInconsistencyError, MetricError, NumericalError


class TestGrayMap:
    """Tests for the joint [0, 255] map."""

    def test_joint_map(self) -> None:
        """Both images share one affine map."""
        a, b = to_gray(np.array([0.0, 1.0]), np.array([2.0, 3.0]))
        np.testing.assert_allclose(a, [0.0, 85.0])
        np.testing.assert_allclose(b, [170.0, 255.0])

    def test_degenerate_range(self) -> None:
        """Constant inputs map to zeros."""
        (a,) = to_gray(np.full((3, 3), 4.2))
        assert not a.any()


class TestRmseGray:
    """Tests for rmse_gray."""

    def test_identical(self) -> None:
        """Identical images have zero RMSE."""
        image = np.random.default_rng(0).random((8, 8))
        assert rmse_gray(image, image) == 0.0

    def test_swapped_extremes(self) -> None:
        """Opposite extremes are a full gray range apart."""
        assert rmse_gray(np.array([[0.0, 1.0]]), np.array([[1.0, 0.0]])) == pytest.approx(255.0)

    def test_scale_invariant(self) -> None:
        """Scaling both images by the same factor leaves the RMSE unchanged."""
        rng = np.random.default_rng(1)
        a, b = rng.random((8, 8)), rng.random((8, 8))
        assert rmse_gray(3 * a, 3 * b) == pytest.approx(rmse_gray(a, b))

    def test_shape_mismatch(self) -> None:
        """Images must have the same shape."""
        with pytest.raises(DataInconsistencyError):
            rmse_gray(np.zeros((4, 4)), np.zeros((4, 5)))

    def test_non_finite(self) -> None:
        """NaN samples are a numerical error."""
        with pytest.raises(NumericalError):
            rmse_gray(np.array([[np.nan]]), np.array([[0.0]]))


class TestLineProfile:
    """Tests for line profiles."""

    def test_center_row_by_default(self) -> None:
        """The default profile is the center row, normalized to its image."""
        image = np.arange(16.0).reshape(4, 4)
        profile = line_profile(image)
        assert profile.axis is ProfileAxis.ROW
        assert profile.index == 2
        np.testing.assert_allclose(profile.values, np.array([8, 9, 10, 11]) * 17.0)
        np.testing.assert_array_equal(profile.positions, [0, 1, 2, 3])

    def test_column_without_normalization(self) -> None:
        """Columns can be taken raw."""
        image = np.arange(16.0).reshape(4, 4)
        profile = line_profile(image, "column", 1, normalize=False)
        np.testing.assert_array_equal(profile.values, [1, 5, 9, 13])
        assert len(profile) == 4

    def test_index_out_of_range(self) -> None:
        """Rows beyond the image are rejected."""
        with pytest.raises(DataInconsistencyError):
            line_profile(np.zeros((4, 4)), "row", 4)

    def test_joint_profiles(self) -> None:
        """Joint profiles use the range of both images."""
        a = np.zeros((4, 4))
        b = np.full((4, 4), 2.0)
        b[0, 0] = 0.0
        pa, pb = joint_line_profiles(a, b, "row", 0)
        np.testing.assert_allclose(pa.values, 0.0)
        np.testing.assert_allclose(pb.values, [0.0, 255.0, 255.0, 255.0])


class TestCorrelation:
    """Tests for normalized cross-correlation."""

    def test_identical_and_affine(self) -> None:
        """NCC ignores offset and positive gain."""
        image = np.random.default_rng(2).random((16, 16))
        assert normalized_cross_correlation(image, image) == pytest.approx(1.0)
        assert normalized_cross_correlation(image, 2 * image + 3) == pytest.approx(1.0)
        assert normalized_cross_correlation(image, -image) == pytest.approx(-1.0)

    def test_one_constant(self) -> None:
        """A constant image correlates with nothing."""
        image = np.random.default_rng(3).random((4, 4))
        assert normalized_cross_correlation(image, np.ones((4, 4))) == 0.0

    def test_both_constant(self) -> None:
        """Two constant images have no defined correlation."""
        with pytest.raises(MetricError):
            normalized_cross_correlation(np.ones((4, 4)), np.zeros((4, 4)))

    def test_crosstalk(self) -> None:
        """Crosstalk is the amplitude-phase correlation, 0 for constant phase."""
        amplitude = np.random.default_rng(4).random((8, 8))
        assert amplitude_phase_crosstalk(amplitude, np.zeros((8, 8))) == 0.0
        assert amplitude_phase_crosstalk(amplitude, amplitude) == pytest.approx(1.0)
        assert amplitude_phase_crosstalk(np.ones((8, 8)), np.zeros((8, 8))) == 0.0


class TestContrast:
    """Tests for Michelson contrast and modulation depth."""

    def test_michelson(self) -> None:
        """(max - min) / (max + min)."""
        assert michelson_contrast(np.array([1.0, 3.0, 2.0])) == pytest.approx(0.5)

    def test_michelson_window(self) -> None:
        """Only the window is considered."""
        values = np.array([0.0, 2.0, 2.0, 4.0, 100.0])
        assert michelson_contrast(values, slice(1, 4)) == pytest.approx(1 / 3)

    def test_michelson_constant(self) -> None:
        """A flat profile has zero contrast."""
        assert michelson_contrast(np.full(5, 7.0)) == 0.0

    def test_michelson_undefined(self) -> None:
        """max + min = 0 with a non-constant profile is undefined."""
        with pytest.raises(MetricError):
            michelson_contrast(np.array([-1.0, 1.0]))

    def test_window_outside_profile(self) -> None:
        """Windows must lie inside the profile."""
        with pytest.raises(DataInconsistencyError):
            michelson_contrast(np.ones(4), slice(2, 9))

    @pytest.mark.parametrize("depth", [0.0, 0.25, 0.9])
    def test_modulation_of_sinusoid(self, depth: float) -> None:
        """A sinusoid over whole periods gives its depth back."""
        x = np.arange(64)
        values = 5.0 * (1 + depth * np.cos(2 * np.pi * x / 8 + 0.3))
        assert modulation_depth(values, 8) == pytest.approx(depth, abs=1e-12)

    def test_modulation_ignores_other_periods(self) -> None:
        """A component at a different period contributes nothing over whole periods."""
        x = np.arange(48)
        values = 1.0 + 0.5 * np.cos(2 * np.pi * x / 16)
        assert modulation_depth(values, 6) == pytest.approx(0.0, abs=1e-12)

    def test_modulation_of_profile_window(self) -> None:
        """Profiles and windows are accepted."""
        image = np.ones((4, 40))
        image[2, 8:32] += 0.5 * np.cos(2 * np.pi * np.arange(24) / 6)
        profile = line_profile(image, "row", 2, normalize=False)
        assert modulation_depth(profile, 6, slice(8, 32)) == pytest.approx(0.5)

    def test_modulation_zero_mean(self) -> None:
        """A zero-mean window has no relative modulation."""
        with pytest.raises(MetricError):
            modulation_depth(np.zeros(8), 4)

    def test_modulation_bad_period(self) -> None:
        """The period must be positive."""
        with pytest.raises(MetricError):
            modulation_depth(np.ones(8), 0)
