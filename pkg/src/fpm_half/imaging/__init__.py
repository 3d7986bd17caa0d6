"""Test objects, grayscale I/O, the forward model, and capture stacks."""

from .forward import (
    PairDifference,
    add_noise,
    simulate_frame,
    simulate_stack,
    symmetric_pair_difference,
    upsample_frame,
)
from .objects import (
    BarGroup,
    ComplexObject,
    ObjectKind,
    bar_groups,
    make_object,
    standard_test_object,
)
from .pgm import load_grayscale, read_pgm, save_grayscale, write_pgm
from .stack import CaptureStack, crop_stack, export_stack, import_stack

__all__ = [
    "PairDifference",
    "add_noise",
    "simulate_frame",
    "simulate_stack",
    "symmetric_pair_difference",
    "upsample_frame",
    "BarGroup",
    "ComplexObject",
    "ObjectKind",
    "bar_groups",
    "make_object",
    "standard_test_object",
    "load_grayscale",
    "read_pgm",
    "save_grayscale",
    "write_pgm",
    "CaptureStack",
    "crop_stack",
    "export_stack",
    "import_stack",
]
