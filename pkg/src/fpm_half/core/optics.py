"""Complex fields, centered unitary transforms, pupils, and the Airy kernel.

Every spectral array in the package keeps zero frequency at index ``size // 2`` on both
axes. The ``ifftshift``/``fftshift`` shuffle to and from the library layout happens only
inside :func:`fft2c` and :func:`ifft2c`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import special
from scipy.fft import fft2, fftshift, ifft2, ifftshift

from ..exceptions import GeometryError

logger = logging.getLogger(__name__)

J1_FIRST_ZERO = 3.8317059702075125
"""First positive zero of the order-1 Bessel function of the first kind."""


@dataclass(frozen=True)
class Grid:
    """Square sampling grid shared by a spatial array and its spectrum."""

    size: int
    """Samples per side"""

    pitch_um: float
    """Spatial sample spacing in micrometers"""

    def __post_init__(self) -> None:
        if int(self.size) != self.size or self.size < 1:
            raise GeometryError(f"Grid size must be a positive integer, got {self.size}")
        if not self.pitch_um > 0:
            raise GeometryError(f"Grid pitch must be positive, got {self.pitch_um}")

    @property
    def center(self) -> int:
        """Index of the zero-frequency / zero-position sample."""
        return self.size // 2

    @property
    def frequency_step(self) -> float:
        """Spectral sample spacing in cycles per micrometer."""
        return 1.0 / (self.size * self.pitch_um)

    @property
    def max_frequency(self) -> float:
        """Largest frequency magnitude representable along an axis."""
        return (self.size // 2) * self.frequency_step

    @property
    def field_of_view_um(self) -> float:
        return self.size * self.pitch_um

    def offsets(self) -> np.ndarray:
        """Integer sample offsets from the center, ``k - size // 2``."""
        return np.arange(self.size) - self.center

    def spatial_axis(self) -> np.ndarray:
        """Sample positions in micrometers, zero at the center."""
        return self.offsets() * self.pitch_um

    def frequency_axis(self) -> np.ndarray:
        """Spectral sample frequencies in cycles per micrometer, zero at the center."""
        return self.offsets() * self.frequency_step

    def scaled(self, factor: int) -> Grid:
        """Grid with ``factor`` times the samples over the same field of view."""
        return Grid(self.size * factor, self.pitch_um / factor)

    def to_dict(self) -> dict[str, float | int]:
        """Convert to dictionary."""
        return {"size": self.size, "pitch_um": self.pitch_um}

    @classmethod
    def from_dict(cls, data: dict[str, float | int]) -> Grid:
        """Create from dictionary."""
        return cls(size=int(data["size"]), pitch_um=float(data["pitch_um"]))


@dataclass(frozen=True, eq=False)
class ComplexField2D:
    """Sampled 2-D complex field (object, spectrum, or kernel) with its pixel pitch.

    ``samples`` is indexed ``[row, column]``, i.e. ``[y, x]``. The pitch is in
    micrometers for spatial fields and in cycles per micrometer for spectra.
    """

    samples: np.ndarray
    pitch: float

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.complex128)
        if samples.ndim != 2 or samples.shape[0] < 1 or samples.shape[1] < 1:
            raise GeometryError(f"Field must be a non-empty 2-D array, got shape {samples.shape}")
        if not self.pitch > 0:
            raise GeometryError(f"Field pitch must be positive, got {self.pitch}")
        object.__setattr__(self, "samples", samples)

    @property
    def width(self) -> int:
        return int(self.samples.shape[1])

    @property
    def height(self) -> int:
        return int(self.samples.shape[0])

    def energy(self) -> float:
        """Sum of squared moduli."""
        return float(np.sum(np.abs(self.samples) ** 2))


def fft2c(samples: np.ndarray) -> np.ndarray:
    """Centered unitary 2-D DFT of a raw array."""
    return fftshift(fft2(ifftshift(samples), norm="ortho"))


def ifft2c(spectrum: np.ndarray) -> np.ndarray:
    """Centered unitary inverse 2-D DFT of a raw array."""
    return fftshift(ifft2(ifftshift(spectrum), norm="ortho"))


def dft2(field: ComplexField2D) -> ComplexField2D:
    """Centered unitary 2-D DFT.

    The output pitch is the frequency step ``1 / (width * pitch)``.

    Args:
        field: Spatial field

    Returns:
        Spectrum with zero frequency at ``[height // 2, width // 2]``
    """
    return ComplexField2D(fft2c(field.samples), 1.0 / (field.width * field.pitch))


def idft2(field: ComplexField2D) -> ComplexField2D:
    """Exact inverse of :func:`dft2`.

    Args:
        field: Centered spectrum

    Returns:
        Spatial field whose pitch is ``1 / (width * frequency_step)``
    """
    return ComplexField2D(ifft2c(field.samples), 1.0 / (field.width * field.pitch))


@dataclass(frozen=True, eq=False)
class Pupil:
    """Binary circular pupil sampled on a centered frequency grid."""

    cutoff_frequency: float
    """Coherent cutoff NA/λ in cycles per micrometer"""

    grid: Grid
    """Grid whose spectrum the mask is laid on"""

    mask: np.ndarray
    """Float array in {0, 1}, 1 where the radial frequency is within the cutoff"""

    pixel_radius: float
    """Cutoff expressed in frequency samples"""

    clipped: bool = False
    """True when the cutoff exceeds the grid's largest representable frequency"""

    @property
    def support(self) -> np.ndarray:
        """Boolean view of the mask."""
        return self.mask > 0.5


def make_pupil(cutoff_frequency: float, grid: Grid) -> Pupil:
    """Build the circ pupil ``circ(sqrt(u² + v²) / cutoff)``.

    The boundary is inclusive. The mask is point-symmetric about the zero-frequency
    sample because it is computed from integer offsets.

    Args:
        cutoff_frequency: Cutoff NA/λ in cycles per micrometer
        grid: Grid the spectrum is sampled on

    Returns:
        Pupil with its mask and pixel radius

    Raises:
        GeometryError: If the cutoff is not positive
    """
    if not cutoff_frequency > 0:
        raise GeometryError(f"Pupil cutoff must be positive, got {cutoff_frequency}")

    offsets = grid.offsets()
    ku, kv = np.meshgrid(offsets, offsets, indexing="xy")
    radius = np.hypot(ku, kv) * grid.frequency_step
    mask = (radius <= cutoff_frequency).astype(np.float64)

    clipped = cutoff_frequency > grid.max_frequency
    if clipped:
        logger.warning(
            "Pupil cutoff %.4f cycles/um exceeds grid limit %.4f; pupil clipped by grid",
            cutoff_frequency,
            grid.max_frequency,
        )

    return Pupil(
        cutoff_frequency=cutoff_frequency,
        grid=grid,
        mask=mask,
        pixel_radius=cutoff_frequency / grid.frequency_step,
        clipped=clipped,
    )


def bessel_j1(x: float | np.ndarray) -> float | np.ndarray:
    """Order-1 Bessel function of the first kind.

    Scalars in, float out; arrays are evaluated elementwise.
    """
    if np.ndim(x) == 0:
        return float(special.j1(float(x)))
    return special.j1(np.asarray(x, dtype=np.float64))


@dataclass(frozen=True, eq=False)
class AiryKernel:
    """Spatial impulse response of a circular pupil."""

    field: ComplexField2D
    cutoff_frequency: float
    grid: Grid

    periodic: bool = True
    """True when the pattern is summed over its images at every multiple of the field of view"""

    @property
    def first_zero_radius_um(self) -> float:
        """Radius of the first dark ring, ``3.8317 / (2π · cutoff)``."""
        return J1_FIRST_ZERO / (2.0 * np.pi * self.cutoff_frequency)


def _single_airy(grid: Grid, cutoff_frequency: float) -> np.ndarray:
    axis = grid.spatial_axis()
    x, y = np.meshgrid(axis, axis, indexing="xy")
    rho = np.hypot(x, y)
    scale = grid.size * grid.pitch_um**2

    safe_rho = np.where(rho > 0, rho, 1.0)
    argument = 2.0 * np.pi * cutoff_frequency * safe_rho
    values = scale * cutoff_frequency * special.j1(argument) / safe_rho
    return np.where(rho > 0, values, scale * np.pi * cutoff_frequency**2)


def _periodic_airy(grid: Grid, cutoff_frequency: float) -> np.ndarray:
    # Poisson summation: the image sum is a finite plane-wave series over the frequency
    # samples inside the cutoff. Each row of samples reduces to one outer product.
    n = grid.size
    offsets = grid.offsets()
    waves = np.exp(2j * np.pi * np.outer(offsets, offsets) / n)
    values = np.zeros((n, n), dtype=np.complex128)
    for row, kv in enumerate(offsets):
        inside = np.hypot(offsets, kv) * grid.frequency_step <= cutoff_frequency
        if inside.any():
            values += np.outer(waves[row], waves[inside].sum(axis=0))
    return values / n


def airy_kernel(grid: Grid, cutoff_frequency: float, periodic: bool = True) -> AiryKernel:
    """Airy amplitude kernel of a circ pupil, ``n·p²·c·J1(2πcρ)/ρ``.

    The scale makes the kernel's spectrum the binary pupil under the unitary convention;
    the ``ρ → 0`` limit is ``n·p²·π·c²``. A discrete grid is periodic, so by default the
    pattern is summed over its copies at every multiple of the field of view. That sum
    samples the pupil on the grid's frequency lattice, inclusive boundary included, and
    equals ``idft2(make_pupil(cutoff, grid).mask)``. With ``periodic=False`` the single
    analytic pattern is sampled instead; it agrees inside the main lobe and spreads the
    disc edge further out.

    Args:
        grid: Spatial grid of the kernel
        cutoff_frequency: Pupil cutoff in cycles per micrometer
        periodic: Sum the periodic images

    Returns:
        Kernel centered on ``grid.center``

    Raises:
        GeometryError: If the cutoff is not positive
    """
    if not cutoff_frequency > 0:
        raise GeometryError(f"Kernel cutoff must be positive, got {cutoff_frequency}")

    if periodic:
        values = _periodic_airy(grid, cutoff_frequency)
    else:
        values = _single_airy(grid, cutoff_frequency).astype(np.complex128)

    return AiryKernel(
        field=ComplexField2D(values, grid.pitch_um),
        cutoff_frequency=cutoff_frequency,
        grid=grid,
        periodic=periodic,
    )
