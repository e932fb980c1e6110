"""Writer for the .olmf feature container.

Layout (little endian): magic "OLMF", version u32 = 1, tensor count u32,
then per tensor: name length u32 + UTF-8 name, C/H/W u32, C*H*W float32
row major. Kept independent of the consumer package on purpose; the
consumer's reader is the compatibility check.
"""

import struct

import numpy as np

MAGIC = b"OLMF"
VERSION = 1


def write_olmf(tensors: list[tuple[str, np.ndarray]], path: str) -> None:
    for name, data in tensors:
        if data.ndim != 3:
            raise ValueError(f"tensor '{name}' must be 3-d, got shape {data.shape}")
        if data.dtype != np.float32:
            raise ValueError(f"tensor '{name}' must be float32, got {data.dtype}")
        if not np.isfinite(data).all():
            raise ValueError(f"tensor '{name}' has non-finite values")
        if (data < 0).any():
            raise ValueError(f"tensor '{name}' has negative values")
    with open(path, "wb") as fh:
        fh.write(struct.pack("<4sII", MAGIC, VERSION, len(tensors)))
        for name, data in tensors:
            encoded = name.encode("utf-8")
            fh.write(struct.pack("<I", len(encoded)))
            fh.write(encoded)
            c, h, w = data.shape
            fh.write(struct.pack("<III", c, h, w))
            fh.write(np.ascontiguousarray(data).tobytes())
