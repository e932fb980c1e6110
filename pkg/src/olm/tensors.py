"""Feature tensor storage: the OLMF container format, resizing, and merging.

OLMF is the interchange format between the activation extractor and this
pipeline. Layout (all integers little-endian uint32, all floats IEEE-754
single precision little-endian):

    magic   4 bytes  b"OLMF"
    version u32      1
    count   u32      number of tensors
    per tensor:
        name_len u32, name (UTF-8, name_len bytes)
        C u32, H u32, W u32
        C*H*W float32 values, channel-major then row-major

Reads and writes must round-trip bit-exactly; values are validated to be
finite and non-negative (they are post-ReLU/pool activation magnitudes).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import CorruptionError, DimensionError, FormatError, ValidationError

MAGIC = b"OLMF"
VERSION = 1

_HEADER = struct.Struct("<4sII")
_U32 = struct.Struct("<I")
_SHAPE = struct.Struct("<III")


@dataclass
class FeatureStack:
    """One layer's C x H x W activation tensor at grid resolution."""

    layer_name: str
    data: np.ndarray  # float32, shape (C, H, W)

    @property
    def channels(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]

    def validate(self) -> None:
        """Check the tensor invariants, raising ValidationError on the first hit."""
        if self.data.ndim != 3:
            raise ValidationError(
                f"tensor {self.layer_name!r}: expected 3 dims (C,H,W), got {self.data.ndim}"
            )
        c, h, w = self.data.shape
        if c < 1 or h < 1 or w < 1:
            raise ValidationError(
                f"tensor {self.layer_name!r}: every dimension must be >= 1, got {(c, h, w)}"
            )
        flat = self.data.reshape(-1)
        bad = ~np.isfinite(flat)
        if bad.any():
            idx = int(np.flatnonzero(bad)[0])
            raise ValidationError(
                f"tensor {self.layer_name!r}: non-finite value at flat index {idx}"
            )
        neg = flat < 0
        if neg.any():
            idx = int(np.flatnonzero(neg)[0])
            raise ValidationError(
                f"tensor {self.layer_name!r}: negative value {flat[idx]} at flat index {idx}"
            )


def make_stack(layer_name: str, data) -> FeatureStack:
    """Build a FeatureStack from any array-like, coercing to float32."""
    return FeatureStack(layer_name, np.ascontiguousarray(data, dtype=np.float32))


def write_olmf(stacks: list[FeatureStack], path) -> None:
    """Serialize stacks to an OLMF file. Validates everything before writing."""
    for stack in stacks:
        stack.validate()
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, len(stacks)))
        for stack in stacks:
            name = stack.layer_name.encode("utf-8")
            fh.write(_U32.pack(len(name)))
            fh.write(name)
            c, h, w = stack.data.shape
            fh.write(_SHAPE.pack(c, h, w))
            fh.write(np.ascontiguousarray(stack.data, dtype="<f4").tobytes())


def read_olmf(path) -> list[FeatureStack]:
    """Parse an OLMF file, returning tensors in file order, values bit-identical."""
    with open(path, "rb") as fh:
        blob = fh.read()

    if len(blob) < _HEADER.size:
        raise FormatError(f"{path}: file too short for an OLMF header")
    magic, version, count = _HEADER.unpack_from(blob, 0)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise FormatError(f"{path}: unsupported version {version}, expected {VERSION}")

    offset = _HEADER.size
    stacks: list[FeatureStack] = []
    for i in range(count):
        if offset + _U32.size > len(blob):
            raise CorruptionError(f"{path}: truncated before name length of tensor {i}")
        (name_len,) = _U32.unpack_from(blob, offset)
        offset += _U32.size
        if offset + name_len > len(blob):
            raise CorruptionError(f"{path}: name of tensor {i} runs past end of file")
        try:
            name = blob[offset : offset + name_len].decode("utf-8")
        except UnicodeDecodeError as exc:
            raise CorruptionError(f"{path}: tensor {i} name is not valid UTF-8") from exc
        offset += name_len
        if offset + _SHAPE.size > len(blob):
            raise CorruptionError(f"{path}: truncated before shape of tensor {name!r}")
        c, h, w = _SHAPE.unpack_from(blob, offset)
        offset += _SHAPE.size
        nbytes = c * h * w * 4
        if offset + nbytes > len(blob):
            raise CorruptionError(
                f"{path}: tensor {name!r} declares {nbytes} payload bytes, "
                f"only {len(blob) - offset} remain"
            )
        data = np.frombuffer(blob, dtype="<f4", count=c * h * w, offset=offset)
        offset += nbytes
        stack = FeatureStack(name, data.reshape(c, h, w).copy())
        stack.validate()
        stacks.append(stack)

    if offset != len(blob):
        raise CorruptionError(f"{path}: {len(blob) - offset} trailing bytes after last tensor")
    return stacks


def _axis_coords(src_size: int, dst_size: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Source gather indices and weights for one axis.

    Convention: source coordinate = (dst + 0.5) * src/dst - 0.5, clamped to
    the valid range, so edges replicate rather than extrapolate.
    """
    scale = src_size / dst_size
    src = (np.arange(dst_size, dtype=np.float64) + 0.5) * scale - 0.5
    src = np.clip(src, 0.0, src_size - 1.0)
    lo = np.floor(src).astype(np.intp)
    hi = np.minimum(lo + 1, src_size - 1)
    frac = src - lo
    return lo, hi, frac


def resample_bilinear(data: np.ndarray, target_h: int, target_w: int) -> np.ndarray:
    """Bilinearly resample (..., H, W) float data to (..., target_h, target_w).

    Computes in float64; output is a convex combination of source values per
    channel, so constants are preserved and per-channel min/max are bounds.
    """
    if target_h < 1 or target_w < 1:
        raise ValueError(f"target size must be >= 1, got {(target_h, target_w)}")
    src = np.asarray(data, dtype=np.float64)
    y0, y1, wy = _axis_coords(src.shape[-2], target_h)
    x0, x1, wx = _axis_coords(src.shape[-1], target_w)

    rows = src[..., y0, :] * (1.0 - wy)[:, None] + src[..., y1, :] * wy[:, None]
    out = rows[..., :, x0] * (1.0 - wx) + rows[..., :, x1] * wx
    return out


def resize_bilinear(stack: FeatureStack, target_h: int, target_w: int) -> FeatureStack:
    """Resample every channel of a stack to target_h x target_w independently."""
    out = resample_bilinear(stack.data, target_h, target_w)
    return FeatureStack(stack.layer_name, out.astype(np.float32))


def merge_stacks(a: FeatureStack, b: FeatureStack) -> FeatureStack:
    """Concatenate two stacks along the channel axis (a's channels first)."""
    a.validate()
    b.validate()
    if (a.height, a.width) != (b.height, b.width):
        raise DimensionError(
            f"grid mismatch: {a.layer_name!r} is {a.height}x{a.width}, "
            f"{b.layer_name!r} is {b.height}x{b.width}"
        )
    data = np.concatenate([a.data, b.data], axis=0)
    return FeatureStack(f"{a.layer_name}+{b.layer_name}", data)
