"""Binary PGM (P5) with maxval 255 for saliency maps and masks.

Writing emits exactly "P5\\n{w} {h}\\n255\\n" followed by row-major
bytes. Reading accepts the common header variants: '#' comments and any
whitespace between tokens.
"""

from __future__ import annotations

import numpy as np

from .errors import CorruptionError, FormatError


def write_pgm(values: np.ndarray, path: str) -> None:
    v = np.asarray(values)
    if v.ndim != 2:
        raise ValueError(f"PGM image must be 2-D, got {v.ndim} dims")
    if v.dtype != np.uint8:
        raise ValueError(f"PGM image must be uint8, got {v.dtype}")
    h, w = v.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(v.tobytes(order="C"))


def _read_tokens(blob: bytes, count: int) -> tuple[list[bytes], int]:
    """First `count` whitespace-separated tokens, skipping '#' comments.
    Returns the tokens and the offset just past the single whitespace byte
    that terminates the last one."""
    tokens: list[bytes] = []
    pos = 0
    n = len(blob)
    while len(tokens) < count:
        while pos < n and blob[pos : pos + 1].isspace():
            pos += 1
        if pos < n and blob[pos : pos + 1] == b"#":
            while pos < n and blob[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < n and not blob[pos : pos + 1].isspace():
            pos += 1
        if pos == start:
            raise CorruptionError("PGM header ended before all fields were read")
        tokens.append(blob[start:pos])
        pos += 1  # exactly one whitespace byte separates header from pixels
    return tokens, pos


def read_pgm(path: str) -> np.ndarray:
    with open(path, "rb") as fh:
        blob = fh.read()
    tokens, offset = _read_tokens(blob, 4)
    if tokens[0] != b"P5":
        raise FormatError(f"not a binary PGM: magic {tokens[0]!r}")
    try:
        w, h, maxval = (int(t) for t in tokens[1:])
    except ValueError as exc:
        raise CorruptionError(f"non-numeric PGM header field: {exc}") from exc
    if w < 1 or h < 1:
        raise CorruptionError(f"bad PGM dimensions {w}x{h}")
    if maxval != 255:
        raise FormatError(f"unsupported PGM maxval {maxval}, expected 255")
    expected = w * h
    actual = len(blob) - offset
    if actual != expected:
        raise CorruptionError(f"PGM payload holds {actual} bytes, expected {expected}")
    return np.frombuffer(blob, dtype=np.uint8, offset=offset).reshape(h, w).copy()
