"""Reconstruction results: phase alignment and export."""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import numpy as np

from ..exceptions import DataInconsistencyError, NumericalError
from ..imaging.pgm import MAXVAL_16BIT, quantize, write_pgm

logger = logging.getLogger(__name__)

AMPLITUDE_FILE = "amplitude.pgm"
PHASE_FILE = "phase.pgm"
METADATA_FILE = "result.json"
RESIDUAL_FILE = "residual.csv"


def wrap_phase(phase: np.ndarray) -> np.ndarray:
    """Wrap angles into (-π, π]."""
    wrapped = np.angle(np.exp(1j * np.asarray(phase, dtype=np.float64)))
    return np.where(wrapped <= -np.pi, wrapped + 2 * np.pi, wrapped)


@dataclass(frozen=True, eq=False)
class ReconResult:
    """Reconstructed high-resolution amplitude and phase with the convergence trace."""

    amplitude: np.ndarray
    phase: np.ndarray
    """Radians in (-π, π]"""

    residual_trace: tuple[float, ...]
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.amplitude.shape != self.phase.shape:
            raise DataInconsistencyError(
                f"Amplitude {self.amplitude.shape} and phase {self.phase.shape} differ"
            )
        if not (np.all(np.isfinite(self.amplitude)) and np.all(np.isfinite(self.phase))):
            raise NumericalError("Reconstruction contains non-finite values")
        if self.amplitude.min() < 0:
            raise DataInconsistencyError("Reconstructed amplitude must be non-negative")

    @property
    def field(self) -> np.ndarray:
        return self.amplitude * np.exp(1j * self.phase)

    @property
    def iterations(self) -> int:
        return len(self.residual_trace)


def phase_offset(phase: np.ndarray, reference: np.ndarray) -> float:
    """Constant offset that best aligns ``phase`` with ``reference`` (circular mean)."""
    return float(np.angle(np.mean(np.exp(1j * (phase - reference)))))


def global_phase_align(result: ReconResult, reference: ReconResult) -> ReconResult:
    """Remove the constant phase offset of ``result`` relative to ``reference``.

    Raises:
        DataInconsistencyError: If the grids differ
    """
    if result.phase.shape != reference.phase.shape:
        raise DataInconsistencyError(
            f"Cannot align phase on {result.phase.shape} to {reference.phase.shape}"
        )
    offset = phase_offset(result.phase, reference.phase)
    logger.debug("Global phase offset %.6f rad", offset)
    return replace(
        result,
        phase=wrap_phase(result.phase - offset),
        metadata={**result.metadata, "phase_offset": offset},
    )


def remove_phase_mean(result: ReconResult) -> ReconResult:
    """Align to a zero-phase reference."""
    return global_phase_align(
        result,
        ReconResult(np.zeros_like(result.amplitude), np.zeros_like(result.phase), ()),
    )


def export_result(result: ReconResult, directory: Path) -> list[Path]:
    """Write amplitude and phase as 16-bit PGMs, result.json, and residual.csv.

    Amplitude is scaled by its maximum; phase (-π, π] maps linearly onto [0, 65535].
    Both scales go into the JSON sidecar.
    """
    directory.mkdir(parents=True, exist_ok=True)

    amplitude_scale = float(result.amplitude.max())
    amplitude_path = write_pgm(
        directory / AMPLITUDE_FILE, quantize(result.amplitude, amplitude_scale), MAXVAL_16BIT
    )
    phase_path = write_pgm(
        directory / PHASE_FILE, quantize(result.phase + np.pi, 2 * np.pi), MAXVAL_16BIT
    )

    sidecar = {
        "amplitude": {"file": AMPLITUDE_FILE, "max_value": amplitude_scale},
        "phase": {"file": PHASE_FILE, "min_rad": -np.pi, "max_rad": np.pi},
        "shape": list(result.amplitude.shape),
        "metadata": result.metadata,
    }
    metadata_path = directory / METADATA_FILE
    metadata_path.write_text(json.dumps(sidecar, indent=2) + "\n", encoding="utf-8")

    residual_path = directory / RESIDUAL_FILE
    with residual_path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["iteration", "residual"])
        for k, value in enumerate(result.residual_trace, start=1):
            writer.writerow([k, repr(float(value))])

    logger.info("Wrote reconstruction to %s", directory)
    return [amplitude_path, phase_path, metadata_path, residual_path]
