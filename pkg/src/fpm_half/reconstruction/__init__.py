"""Iterative phase retrieval and result export."""

from .results import ReconResult, export_result, global_phase_align
from .solver import InitMode, ReconConfig, ReconState, fpm_iterate, init_spectrum, reconstruct

__all__ = [
    "ReconResult",
    "export_result",
    "global_phase_align",
    "InitMode",
    "ReconConfig",
    "ReconState",
    "fpm_iterate",
    "init_spectrum",
    "reconstruct",
]
