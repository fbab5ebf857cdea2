"""Binary checkpoint format.

Layout (all integers little-endian):

    magic   4 bytes  b"MVAE"
    version u32      currently 1
    hlen    u64      header length in bytes
    header  hlen     UTF-8 JSON: config, vocab, step, tensor index
    body    ...      raw tensor buffers, concatenated in index order

The header's tensor index lists name, dtype string, and shape for every
buffer, so the body needs no per-tensor framing. Short files and foreign
versions surface as typed errors, never as crashes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MAGIC = b"MVAE"
FORMAT_VERSION = 1


class CheckpointIoError(Exception):
    """Unreadable, truncated, or malformed checkpoint file."""


class VersionMismatch(CheckpointIoError):
    """Checkpoint written by an incompatible format version."""


@dataclass
class CheckpointData:
    config: dict
    vocab: list[str]
    step: int
    arrays: dict[str, np.ndarray]


def save_checkpoint(path: str | Path, config: dict, vocab: list[str], step: int,
                    arrays: dict[str, np.ndarray]) -> None:
    index = [
        {"name": name, "dtype": str(arr.dtype), "shape": list(arr.shape)}
        for name, arr in arrays.items()
    ]
    header = json.dumps({
        "config": config,
        "vocab": vocab,
        "step": step,
        "tensors": index,
    }).encode("utf-8")

    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(MAGIC)
        fh.write(FORMAT_VERSION.to_bytes(4, "little"))
        fh.write(len(header).to_bytes(8, "little"))
        fh.write(header)
        for name, arr in arrays.items():
            fh.write(np.ascontiguousarray(arr).tobytes())
    tmp.replace(path)


def load_checkpoint(path: str | Path) -> CheckpointData:
    try:
        blob = Path(path).read_bytes()
    except OSError as err:
        raise CheckpointIoError(f"cannot read {path}: {err}") from err

    if len(blob) < 16:
        raise CheckpointIoError(f"{path}: too short to hold a header")
    if blob[:4] != MAGIC:
        raise CheckpointIoError(f"{path}: bad magic {blob[:4]!r}")
    version = int.from_bytes(blob[4:8], "little")
    if version != FORMAT_VERSION:
        raise VersionMismatch(f"{path}: format version {version}, "
                              f"expected {FORMAT_VERSION}")
    hlen = int.from_bytes(blob[8:16], "little")
    if len(blob) < 16 + hlen:
        raise CheckpointIoError(f"{path}: truncated header")
    try:
        header = json.loads(blob[16:16 + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as err:
        raise CheckpointIoError(f"{path}: malformed header") from err

    for key in ("config", "vocab", "step", "tensors"):
        if key not in header:
            raise CheckpointIoError(f"{path}: header lacks {key!r}")

    arrays: dict[str, np.ndarray] = {}
    offset = 16 + hlen
    for entry in header["tensors"]:
        dtype = np.dtype(entry["dtype"])
        shape = tuple(entry["shape"])
        nbytes = dtype.itemsize * int(np.prod(shape, dtype=np.int64))
        end = offset + nbytes
        if end > len(blob):
            raise CheckpointIoError(f"{path}: truncated tensor {entry['name']!r}")
        arrays[entry["name"]] = np.frombuffer(
            blob[offset:end], dtype=dtype).reshape(shape).copy()
        offset = end
    if offset != len(blob):
        raise CheckpointIoError(f"{path}: {len(blob) - offset} trailing bytes")

    return CheckpointData(config=header["config"], vocab=header["vocab"],
                          step=int(header["step"]), arrays=arrays)
