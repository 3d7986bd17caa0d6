"""Comparison metrics and CSV reports."""

from .metrics import (
    LineProfile,
    amplitude_phase_crosstalk,
    joint_line_profiles,
    line_profile,
    michelson_contrast,
    modulation_depth,
    normalized_cross_correlation,
    rmse_gray,
)
from .reports import write_profiles, write_table

__all__ = [
    "LineProfile",
    "amplitude_phase_crosstalk",
    "joint_line_profiles",
    "line_profile",
    "michelson_contrast",
    "modulation_depth",
    "normalized_cross_correlation",
    "rmse_gray",
    "write_profiles",
    "write_table",
]
