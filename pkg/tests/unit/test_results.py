"""Tests for reconstruction results."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np
import pytest

from fpm_half.exceptions import DataInconsistencyError, NumericalError
from fpm_half.imaging.pgm import read_pgm
from fpm_half.reconstruction.results import (
    ReconResult,
    export_result,
    global_phase_align,
    phase_offset,
    remove_phase_mean,
    wrap_phase,
)


def make_result(phase: np.ndarray, amplitude: np.ndarray | None = None) -> ReconResult:
    amp = np.ones_like(phase) if amplitude is None else amplitude
    return ReconResult(amp, phase, (3.0, 2.0, 1.5), {"plan_mode": "full"})


class TestWrapPhase:
    """Tests for wrap_phase."""

    def test_interval(self) -> None:
        """Results lie in (-π, π]."""
        wrapped = wrap_phase(np.array([-np.pi, np.pi, 3 * np.pi, -0.5, 7.0]))
        assert np.all(wrapped > -np.pi)
        assert np.all(wrapped <= np.pi)
        assert wrapped[0] == pytest.approx(np.pi)
        assert wrapped[3] == pytest.approx(-0.5)
        assert wrapped[4] == pytest.approx(7.0 - 2 * np.pi)


class TestReconResult:
    """Tests for ReconResult."""

    def test_field_and_iterations(self) -> None:
        """The complex field recombines amplitude and phase."""
        result = make_result(np.full((2, 2), np.pi / 2), np.full((2, 2), 2.0))
        np.testing.assert_allclose(result.field, 2j, atol=1e-15)
        assert result.iterations == 3

    def test_shape_mismatch(self) -> None:
        """Amplitude and phase share one grid."""
        with pytest.raises(DataInconsistencyError):
            ReconResult(np.ones((2, 2)), np.zeros((2, 3)), ())

    def test_negative_amplitude(self) -> None:
        """Amplitudes are moduli."""
        with pytest.raises(DataInconsistencyError):
            ReconResult(-np.ones((2, 2)), np.zeros((2, 2)), ())

    def test_non_finite(self) -> None:
        """NaNs are a numerical failure."""
        with pytest.raises(NumericalError):
            ReconResult(np.full((2, 2), np.nan), np.zeros((2, 2)), ())


class TestPhaseAlignment:
    """Tests for global phase alignment."""

    def test_offset(self) -> None:
        """A constant offset is recovered."""
        reference = np.random.default_rng(0).uniform(-1, 1, (8, 8))
        assert phase_offset(reference + 0.7, reference) == pytest.approx(0.7)

    def test_offset_across_wrap(self) -> None:
        """The circular mean handles offsets that cross ±π."""
        reference = np.full((4, 4), 3.0)
        shifted = wrap_phase(reference + 0.5)
        assert phase_offset(shifted, reference) == pytest.approx(0.5)

    def test_align(self) -> None:
        """Aligned phase matches the reference; the offset goes into metadata."""
        reference = make_result(np.random.default_rng(1).uniform(-1, 1, (8, 8)))
        shifted = make_result(wrap_phase(reference.phase - 0.4))
        aligned = global_phase_align(shifted, reference)
        np.testing.assert_allclose(aligned.phase, reference.phase, atol=1e-12)
        assert aligned.metadata["phase_offset"] == pytest.approx(-0.4)
        assert aligned.metadata["plan_mode"] == "full"
        np.testing.assert_array_equal(aligned.amplitude, shifted.amplitude)

    def test_align_shape_mismatch(self) -> None:
        """Results on different grids cannot be aligned."""
        with pytest.raises(DataInconsistencyError):
            global_phase_align(make_result(np.zeros((2, 2))), make_result(np.zeros((3, 3))))

    def test_remove_mean(self) -> None:
        """A constant phase is removed entirely."""
        result = remove_phase_mean(make_result(np.full((4, 4), 1.2)))
        np.testing.assert_allclose(result.phase, 0.0, atol=1e-12)


class TestExportResult:
    """Tests for export_result."""

    def test_files(self, temp_dir: Path) -> None:
        """Amplitude, phase, sidecar, and residual trace are written."""
        amplitude = np.linspace(0.0, 2.0, 16).reshape(4, 4)
        phase = np.zeros((4, 4))
        phase[0, 0] = np.pi
        result = make_result(phase, amplitude)
        paths = export_result(result, temp_dir / "recon")
        assert [p.name for p in paths] == [
            "amplitude.pgm",
            "phase.pgm",
            "result.json",
            "residual.csv",
        ]

        amp_codes, maxval = read_pgm(temp_dir / "recon" / "amplitude.pgm")
        assert maxval == 65535
        assert amp_codes.max() == 65535
        assert amp_codes[0, 0] == 0

        phase_codes, _ = read_pgm(temp_dir / "recon" / "phase.pgm")
        assert phase_codes[0, 0] == 65535
        assert phase_codes[1, 1] == 32768

        sidecar = json.loads((temp_dir / "recon" / "result.json").read_text())
        assert sidecar["amplitude"]["max_value"] == pytest.approx(2.0)
        assert sidecar["shape"] == [4, 4]
        assert sidecar["metadata"]["plan_mode"] == "full"

        with (temp_dir / "recon" / "residual.csv").open(newline="") as f:
            rows = list(csv.reader(f))
        assert rows[0] == ["iteration", "residual"]
        assert rows[1] == ["1", "3.0"]
        assert len(rows) == 4
