"""fpm-half - Fourier ptychographic microscopy simulation and half-stack reconstruction."""

__version__ = "0.1.0"

from .core.geometry import IlluminationPlan, LedArraySpec, LedIndex, PlanMode, SystemSpec, make_plan
from .core.optics import ComplexField2D, Grid, Pupil, make_pupil
from .imaging.forward import simulate_frame, simulate_stack, symmetric_pair_difference
from .imaging.objects import ComplexObject, ObjectKind, make_object, standard_test_object
from .imaging.stack import CaptureStack, export_stack, import_stack
from .reconstruction.results import ReconResult, global_phase_align
from .reconstruction.solver import ReconConfig, reconstruct

__all__ = [
    "IlluminationPlan",
    "LedArraySpec",
    "LedIndex",
    "PlanMode",
    "SystemSpec",
    "make_plan",
    "ComplexField2D",
    "Grid",
    "Pupil",
    "make_pupil",
    "simulate_frame",
    "simulate_stack",
    "symmetric_pair_difference",
    "ComplexObject",
    "ObjectKind",
    "make_object",
    "standard_test_object",
    "CaptureStack",
    "export_stack",
    "import_stack",
    "ReconResult",
    "global_phase_align",
    "ReconConfig",
    "reconstruct",
]
