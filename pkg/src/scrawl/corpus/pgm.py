"""Binary PGM (P5) images.

Reading accepts any maxval up to 65535 (two big-endian bytes per pixel above
255) and header comments; writing always produces 8-bit images.
"""

from pathlib import Path
import re

import numpy as np

MAGIC = b"P5"
MAX_MAXVAL = 65535

# Header fields are separated by whitespace; comments run to the end of a line.
_TOKEN = re.compile(rb"(?:\s|#[^\n]*\n?)*([^\s#]+)")


class PgmError(ValueError):
    """Raised for data that is not a valid binary PGM image."""


def parse_pgm(data: bytes, source: str = "<bytes>") -> tuple[np.ndarray, int]:
    """Decode P5 bytes into a [height, width] array and its maxval.

    The array is ``uint8`` for maxval <= 255, else ``uint16``.

    :raises PgmError: For a wrong magic number, a malformed header or
        truncated pixel data.
    """
    if not data.startswith(MAGIC):
        raise PgmError(f"{source}: not a binary PGM file (magic {data[:2]!r})")

    fields: list[int] = []
    pos = len(MAGIC)
    for _ in range(3):
        match = _TOKEN.match(data, pos)
        if match is None:
            raise PgmError(f"{source}: truncated header")
        try:
            fields.append(int(match.group(1)))
        except ValueError:
            raise PgmError(f"{source}: bad header field {match.group(1)!r}") from None
        pos = match.end()
    width, height, maxval = fields

    if width <= 0 or height <= 0:
        raise PgmError(f"{source}: invalid size {width}x{height}")
    if not 0 < maxval <= MAX_MAXVAL:
        raise PgmError(f"{source}: maxval {maxval} outside 1..{MAX_MAXVAL}")
    if pos >= len(data) or not data[pos : pos + 1].isspace():
        raise PgmError(f"{source}: missing whitespace after the header")
    pos += 1

    dtype = np.dtype(np.uint8) if maxval <= 255 else np.dtype(">u2")
    expected = width * height * dtype.itemsize
    raster = data[pos : pos + expected]
    if len(raster) < expected:
        raise PgmError(f"{source}: expected {expected} bytes of pixels, found {len(raster)}")

    pixels = np.frombuffer(raster, dtype=dtype).reshape(height, width)
    if (pixels > maxval).any():
        raise PgmError(f"{source}: pixel values exceed maxval {maxval}")
    return pixels.astype(np.uint8 if maxval <= 255 else np.uint16), maxval


def read_pgm(path: Path | str) -> tuple[np.ndarray, int]:
    """Read a P5 file; see :func:`parse_pgm`."""
    path = Path(path)
    return parse_pgm(path.read_bytes(), str(path))


def to_gray8(pixels: np.ndarray) -> np.ndarray:
    """Map floats in [0, 1] to 8-bit gray levels, rounding to nearest."""
    return np.rint(np.clip(pixels, 0.0, 1.0) * 255.0).astype(np.uint8)


def encode_pgm(pixels: np.ndarray) -> bytes:
    """Encode an 8-bit [height, width] array as P5 bytes with maxval 255."""
    if pixels.ndim != 2 or pixels.size == 0:
        raise PgmError(f"expected a non-empty 2-D image, got shape {pixels.shape}")
    if pixels.dtype != np.uint8:
        raise PgmError(f"expected uint8 pixels, got {pixels.dtype}")
    height, width = pixels.shape
    return b"P5\n%d %d\n255\n" % (width, height) + np.ascontiguousarray(pixels).tobytes()


def write_pgm(path: Path | str, pixels: np.ndarray) -> Path:
    """Write an 8-bit image; float arrays are converted with :func:`to_gray8`."""
    path = Path(path)
    if np.issubdtype(pixels.dtype, np.floating):
        pixels = to_gray8(pixels)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_pgm(pixels))
    return path
