"""Optics primitives, LED geometry, and the stack manifest schema."""

from .geometry import (
    IlluminationPlan,
    LedArraySpec,
    LedIndex,
    PlanEntry,
    PlanMode,
    SpectralShift,
    SystemSpec,
    led_angle,
    led_angle_degrees,
    make_plan,
    spectral_shift,
    spiral_order,
    symmetric_partner,
    synthesized_na,
)
from .manifest import FrameRecord, Provenance, StackManifest
from .optics import (
    AiryKernel,
    ComplexField2D,
    Grid,
    Pupil,
    airy_kernel,
    bessel_j1,
    dft2,
    fft2c,
    idft2,
    ifft2c,
    make_pupil,
)

__all__ = [
    "IlluminationPlan",
    "LedArraySpec",
    "LedIndex",
    "PlanEntry",
    "PlanMode",
    "SpectralShift",
    "SystemSpec",
    "led_angle",
    "led_angle_degrees",
    "make_plan",
    "spectral_shift",
    "spiral_order",
    "symmetric_partner",
    "synthesized_na",
    "FrameRecord",
    "Provenance",
    "StackManifest",
    "AiryKernel",
    "ComplexField2D",
    "Grid",
    "Pupil",
    "airy_kernel",
    "bessel_j1",
    "dft2",
    "fft2c",
    "idft2",
    "ifft2c",
    "make_pupil",
]
