"""Versioned binary checkpoint format.

Layout: magic ``OTHLM1``; a little-endian uint32 header length; the
UTF-8 JSON model config; every tensor as little-endian float32 in
:func:`param_shapes` order; a trailing CRC32 (little-endian uint32)
over everything before it.
"""

from __future__ import annotations

import dataclasses
import json
import struct
import zlib

import numpy as np

from .model import InvalidConfig, Model, ModelConfig, param_count, param_shapes

MAGIC = b"OTHLM1"


class CorruptCheckpoint(Exception):
    pass


def save_checkpoint(model: Model, path) -> None:
    """Write the model (cast to float32) to ``path``."""
    header = json.dumps(dataclasses.asdict(model.cfg), sort_keys=True).encode("utf-8")
    chunks = [MAGIC, struct.pack("<I", len(header)), header]
    for name, shape in param_shapes(model.cfg):
        tensor = model.params[name]
        if tensor.shape != shape:
            raise ValueError(f"parameter {name} has shape {tensor.shape}, expected {shape}")
        chunks.append(np.ascontiguousarray(tensor, dtype="<f4").tobytes())
    body = b"".join(chunks)
    with open(path, "wb") as f:
        f.write(body)
        f.write(struct.pack("<I", zlib.crc32(body)))


def load_checkpoint(path) -> Model:
    with open(path, "rb") as f:
        data = f.read()
    if len(data) < len(MAGIC) + 8:
        raise CorruptCheckpoint("file too short")
    body, crc_bytes = data[:-4], data[-4:]
    if struct.unpack("<I", crc_bytes)[0] != zlib.crc32(body):
        raise CorruptCheckpoint("checksum mismatch")
    if body[: len(MAGIC)] != MAGIC:
        raise CorruptCheckpoint("bad magic bytes")
    offset = len(MAGIC)
    (header_len,) = struct.unpack_from("<I", body, offset)
    offset += 4
    if offset + header_len > len(body):
        raise CorruptCheckpoint("truncated header")
    try:
        cfg = ModelConfig(**json.loads(body[offset : offset + header_len].decode("utf-8")))
    except (ValueError, TypeError, InvalidConfig) as exc:
        raise CorruptCheckpoint(f"bad config header: {exc}") from None
    offset += header_len
    if len(body) - offset != 4 * param_count(cfg):
        raise CorruptCheckpoint("tensor payload size mismatch")
    params: dict[str, np.ndarray] = {}
    for name, shape in param_shapes(cfg):
        size = int(np.prod(shape)) * 4
        tensor = np.frombuffer(body, dtype="<f4", count=int(np.prod(shape)), offset=offset)
        params[name] = tensor.reshape(shape).astype(np.float32)
        offset += size
        if not np.isfinite(params[name]).all():
            raise CorruptCheckpoint(f"non-finite values in {name}")
    return Model(cfg, params)
