"""Custom exception hierarchy for fpm-half.

This module provides a structured exception hierarchy that:
1. Separates configuration mistakes from data and numerical failures
2. Preserves context through exception chaining
3. Maps every failure category onto a CLI exit status

Usage:
    from fpm_half.exceptions import (
        FpmError,
        ConfigError,
        DataInconsistencyError,
    )

    try:
        stack = import_stack(path)
    except ConfigError as e:
        print(f"Bad config: {e}")
    except DataInconsistencyError as e:
        print(f"Stack does not match: {e}")
"""

from __future__ import annotations


class FpmError(Exception):
    """Base exception for all fpm-half errors.

    All custom exceptions in this package inherit from this class,
    making it easy to catch any fpm-half error with a single
    except clause.
    """

    exit_code: int = 1


class ConfigError(FpmError):
    """Invalid pipeline configuration or parameter values.

    Raised when:
    - Config file is missing, unreadable, or not a mapping
    - A field is out of range or has the wrong type
    - A mode or kind string is not recognised
    - A referenced image path does not exist
    - The output directory cannot be created or written
    """

    exit_code = 2


class DataInconsistencyError(FpmError):
    """Data disagrees with itself or with the configuration.

    Raised when:
    - Two images that must match have different shapes
    - A stack manifest disagrees with its frames or with the config grids
    - A symmetric partner frame or the central frame is missing
    """

    exit_code = 3


class GeometryError(DataInconsistencyError):
    """Illumination or sampling geometry is out of bounds.

    Raised when:
    - An LED index lies outside its array
    - A spectral shift falls outside the high-resolution grid
    - A sub-spectrum window extends past the object spectrum
    - A grid or field descriptor is empty or has a non-positive pitch
    """


class ImageFormatError(DataInconsistencyError):
    """Image file cannot be decoded.

    Raised when:
    - The file is not a binary PGM (P5) or supported PNG
    - The header is malformed or the pixel payload is truncated
    """


class NumericalError(FpmError):
    """Numerical failure during simulation, reconstruction, or export.

    Raised when:
    - Frames or results contain NaN or infinite values
    """

    exit_code = 4


class MetricError(NumericalError):
    """Metric is undefined for the given input.

    Raised when:
    - Both images passed to a correlation are constant
    - A contrast window has max + min equal to zero
    - A modulation window has zero mean or the period is not positive
    """
