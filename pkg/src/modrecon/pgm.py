"""Minimal 8-bit grayscale PGM (P5 binary / P2 ASCII) reader and writer."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import MalformedFileError

__all__ = ["read_pgm", "write_pgm"]


def _tokens(data: bytes, count: int, pos: int) -> tuple[list[bytes], int]:
    """Read ``count`` whitespace-separated header tokens, skipping ``#`` comments."""
    tokens = []
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos : pos + 1].isspace():
            pos += 1
        if pos < n and data[pos : pos + 1] == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise MalformedFileError("truncated PGM header")
        tokens.append(data[start:pos])
    return tokens, pos


def read_pgm(path) -> np.ndarray:
    """Return the image as a ``(height, width)`` uint8 array."""
    data = Path(path).read_bytes()
    (magic,), pos = _tokens(data, 1, 0)
    if magic not in (b"P5", b"P2"):
        raise MalformedFileError(f"unsupported magic {magic!r}; only grayscale P5/P2 is read")
    fields, pos = _tokens(data, 3, pos)
    try:
        width, height, maxval = (int(t) for t in fields)
    except ValueError:
        raise MalformedFileError("non-integer PGM header field") from None
    if width <= 0 or height <= 0:
        raise MalformedFileError(f"bad image size {width}x{height}")
    if maxval != 255:
        raise MalformedFileError(f"maxval {maxval} unsupported; only 8-bit (255) images are read")
    count = width * height
    if magic == b"P5":
        # exactly one whitespace byte separates the header from the raster
        raster = data[pos + 1 : pos + 1 + count]
        if len(raster) != count:
            raise MalformedFileError(f"expected {count} pixel bytes, found {len(raster)}")
        pixels = np.frombuffer(raster, dtype=np.uint8)
    else:
        try:
            values = [int(v) for v in data[pos:].split()]
        except ValueError:
            raise MalformedFileError("non-integer pixel in ASCII PGM") from None
        if len(values) < count:
            raise MalformedFileError(f"expected {count} pixels, found {len(values)}")
        pixels = np.asarray(values[:count])
        if pixels.min() < 0 or pixels.max() > 255:
            raise MalformedFileError("pixel value outside 0..255")
        pixels = pixels.astype(np.uint8)
    return pixels.reshape(height, width).copy()


def write_pgm(image, path) -> None:
    """Write a binary P5 file with the canonical ``P5\\n<w> <h>\\n255\\n`` header."""
    image = np.asarray(image)
    if image.ndim != 2:
        raise ValueError("write_pgm expects a 2-D grayscale array")
    if image.dtype != np.uint8:
        if image.min() < 0 or image.max() > 255:
            raise ValueError("pixel values must lie in 0..255")
        image = np.round(image).astype(np.uint8)
    height, width = image.shape
    header = f"P5\n{width} {height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + np.ascontiguousarray(image).tobytes())
