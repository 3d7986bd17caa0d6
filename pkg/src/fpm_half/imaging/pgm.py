"""Grayscale image I/O: binary PGM (P5) read/write and optional PNG read.

PGM rasters follow the netpbm layout: an ASCII header of four whitespace-separated tokens
(magic, width, height, maxval, with ``#`` comments allowed between tokens), one whitespace
byte, then the raster. Samples are one byte when ``maxval < 256`` and two big-endian bytes
otherwise.
"""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from ..exceptions import ImageFormatError

logger = logging.getLogger(__name__)

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
MAXVAL_8BIT = 255
MAXVAL_16BIT = 65535

_WHITESPACE = b" \t\n\r\v\f"


def _header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """Read ``count`` header tokens, skipping comments. Returns tokens and raster offset."""
    tokens: list[bytes] = []
    pos = 0
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos] in _WHITESPACE:
            pos += 1
        if pos < n and data[pos : pos + 1] == b"#":
            while pos < n and data[pos] not in b"\r\n":
                pos += 1
            continue
        start = pos
        while pos < n and data[pos] not in _WHITESPACE and data[pos : pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise ImageFormatError("PGM header is truncated")
        tokens.append(data[start:pos])
    if pos >= n or data[pos] not in _WHITESPACE:
        raise ImageFormatError("PGM header must end with a single whitespace byte")
    return tokens, pos + 1


def decode_pgm(data: bytes) -> tuple[np.ndarray, int]:
    """Decode a binary PGM image.

    Args:
        data: Raw file contents

    Returns:
        (integer raster indexed [row, column], maxval)

    Raises:
        ImageFormatError: If the data is not a valid P5 image
    """
    if not data.startswith(b"P5"):
        raise ImageFormatError("Not a binary PGM (P5) image")

    tokens, offset = _header_tokens(data, 4)
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError as e:
        raise ImageFormatError(f"Malformed PGM header: {e}") from e
    if width < 1 or height < 1 or not 0 < maxval <= MAXVAL_16BIT:
        raise ImageFormatError(f"Invalid PGM header: {width}x{height}, maxval {maxval}")

    dtype = np.dtype(">u2") if maxval > MAXVAL_8BIT else np.dtype("u1")
    expected = width * height * dtype.itemsize
    raster = data[offset : offset + expected]
    if len(raster) < expected:
        raise ImageFormatError(
            f"PGM raster is truncated: expected {expected} bytes, found {len(raster)}"
        )

    pixels = np.frombuffer(raster, dtype=dtype).reshape(height, width)
    return pixels.astype(np.uint16), maxval


def encode_pgm(pixels: np.ndarray, maxval: int = MAXVAL_16BIT) -> bytes:
    """Encode an integer raster as a binary PGM image."""
    if pixels.ndim != 2:
        raise ImageFormatError(f"PGM raster must be 2-D, got shape {pixels.shape}")
    if not 0 < maxval <= MAXVAL_16BIT:
        raise ImageFormatError(f"PGM maxval must be in [1, 65535], got {maxval}")

    height, width = pixels.shape
    dtype = ">u2" if maxval > MAXVAL_8BIT else "u1"
    clipped = np.clip(pixels, 0, maxval).astype(dtype)
    header = f"P5\n{width} {height}\n{maxval}\n".encode("ascii")
    return header + clipped.tobytes()


def read_pgm(path: Path) -> tuple[np.ndarray, int]:
    """Read a binary PGM file. See :func:`decode_pgm`."""
    try:
        data = path.read_bytes()
    except OSError as e:
        raise ImageFormatError(f"Cannot read image {path}: {e}") from e
    try:
        return decode_pgm(data)
    except ImageFormatError as e:
        raise ImageFormatError(f"{path}: {e}") from e


def write_pgm(path: Path, pixels: np.ndarray, maxval: int = MAXVAL_16BIT) -> Path:
    """Write an integer raster as a binary PGM file."""
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_pgm(pixels, maxval))
    return path


def quantize(image: np.ndarray, scale: float, maxval: int = MAXVAL_16BIT) -> np.ndarray:
    """Map ``[0, scale]`` linearly onto integer codes ``[0, maxval]``.

    A non-positive scale yields an all-zero raster.
    """
    if scale <= 0:
        return np.zeros(image.shape, dtype=np.uint16)
    codes = np.rint(np.asarray(image, dtype=np.float64) / scale * maxval)
    return np.clip(codes, 0, maxval).astype(np.uint16)


def save_grayscale(path: Path, image: np.ndarray, bit_depth: int = 16) -> Path:
    """Save an image with values in [0, 1] as an 8- or 16-bit PGM."""
    if bit_depth not in (8, 16):
        raise ImageFormatError(f"Bit depth must be 8 or 16, got {bit_depth}")
    maxval = MAXVAL_16BIT if bit_depth == 16 else MAXVAL_8BIT
    return write_pgm(path, quantize(image, 1.0, maxval), maxval)


def _read_png(path: Path) -> np.ndarray:
    try:
        import png
    except ImportError as e:
        raise ImageFormatError(
            f"{path}: PNG input requires the optional 'png' extra (pypng)"
        ) from e

    try:
        width, height, rows, info = png.Reader(filename=str(path)).asDirect()
        raster = np.vstack([np.asarray(row, dtype=np.uint16) for row in rows])
    except png.Error as e:
        raise ImageFormatError(f"{path}: corrupt PNG: {e}") from e

    if not info.get("greyscale", False):
        raise ImageFormatError(f"{path}: only grayscale PNG images are supported")

    planes = int(info["planes"])
    raster = raster.reshape(height, width, planes)[:, :, 0]
    maxval = 2 ** int(info["bitdepth"]) - 1
    return raster.astype(np.float64) / maxval


def load_grayscale(path: Path) -> np.ndarray:
    """Load a grayscale PGM or PNG image scaled to [0, 1].

    Args:
        path: Image file

    Returns:
        Float array indexed [row, column]

    Raises:
        ImageFormatError: If the file is missing, unsupported, or corrupt
    """
    path = Path(path)
    try:
        with path.open("rb") as handle:
            magic = handle.read(len(PNG_SIGNATURE))
    except OSError as e:
        raise ImageFormatError(f"Cannot read image {path}: {e}") from e

    if magic.startswith(PNG_SIGNATURE):
        image = _read_png(path)
    elif magic.startswith(b"P5"):
        pixels, maxval = read_pgm(path)
        image = pixels.astype(np.float64) / maxval
    else:
        raise ImageFormatError(f"{path}: unsupported image format (expected P5 PGM or PNG)")

    logger.debug("Loaded %s: %dx%d", path, image.shape[1], image.shape[0])
    return image
