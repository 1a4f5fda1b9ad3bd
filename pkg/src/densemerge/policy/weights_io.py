"""Model weight persistence: versioned binary container plus a JSON twin.

Binary layout (little-endian):
  magic "B4MW" | u32 version | u32 d_model | u32 n_layers | u32 n_heads |
  u32 d_v | u32 n_channels | n_channels x (u32 length + utf-8 name) |
  raw float32 tensors in ModelWeights.named_tensors() order.

Tensors are stored float32 and widened to float64 on load; shapes derive from
the header fields and the fixed sample geometry.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from ..core import D_V
from .model import ModelWeights, init_weights

MAGIC = b"B4MW"
VERSION = 1


class WeightsFormatError(ValueError):
    """Weights file is not a readable container of the expected version."""


def _template(d_model: int, n_layers: int, n_heads: int) -> ModelWeights:
    return init_weights(d_model=d_model, n_layers=n_layers, n_heads=n_heads, seed=0)


def save_weights(weights: ModelWeights, path: str | Path) -> None:
    parts = [MAGIC, struct.pack("<5I", VERSION, weights.d_model, weights.n_layers,
                                weights.n_heads, D_V)]
    parts.append(struct.pack("<I", len(weights.channels)))
    for name in weights.channels:
        raw = name.encode("utf-8")
        parts.append(struct.pack("<I", len(raw)) + raw)
    for _, arr in weights.named_tensors():
        parts.append(np.asarray(arr, dtype="<f4").tobytes())
    Path(path).write_bytes(b"".join(parts))


def load_weights(path: str | Path) -> ModelWeights:
    buf = Path(path).read_bytes()
    if buf[:4] != MAGIC:
        raise WeightsFormatError(f"{path}: bad magic {buf[:4]!r}")
    version, d_model, n_layers, n_heads, d_v = struct.unpack_from("<5I", buf, 4)
    if version != VERSION:
        raise WeightsFormatError(f"{path}: unsupported version {version}")
    if d_v != D_V:
        raise WeightsFormatError(f"{path}: channel count {d_v} does not match this build ({D_V})")
    pos = 4 + 20
    (n_channels,) = struct.unpack_from("<I", buf, pos)
    pos += 4
    channels = []
    for _ in range(n_channels):
        (ln,) = struct.unpack_from("<I", buf, pos)
        pos += 4
        channels.append(buf[pos:pos + ln].decode("utf-8"))
        pos += ln

    template = _template(d_model, n_layers, n_heads)
    tensors = {}
    for name, arr in template.named_tensors():
        nbytes = arr.size * 4
        if pos + nbytes > len(buf):
            raise WeightsFormatError(f"{path}: truncated tensor {name}")
        tensors[name] = np.frombuffer(buf, dtype="<f4", count=arr.size, offset=pos).astype(float).reshape(arr.shape)
        pos += nbytes
    if pos != len(buf):
        raise WeightsFormatError(f"{path}: {len(buf) - pos} trailing bytes")
    loaded = template.replace_tensors(tensors)
    object.__setattr__(loaded, "channels", tuple(channels))
    return loaded


def save_weights_json(weights: ModelWeights, path: str | Path) -> None:
    doc = {
        "format": "b4mw-json",
        "version": VERSION,
        "d_model": weights.d_model,
        "n_layers": weights.n_layers,
        "n_heads": weights.n_heads,
        "d_v": D_V,
        "channels": list(weights.channels),
        "tensors": {name: arr.tolist() for name, arr in weights.named_tensors()},
    }
    Path(path).write_text(json.dumps(doc) + "\n", encoding="utf-8")


def load_weights_json(path: str | Path) -> ModelWeights:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("format") != "b4mw-json" or doc.get("version") != VERSION:
        raise WeightsFormatError(f"{path}: not a b4mw-json v{VERSION} document")
    template = _template(doc["d_model"], doc["n_layers"], doc["n_heads"])
    loaded = template.replace_tensors({k: np.asarray(v, dtype=float) for k, v in doc["tensors"].items()})
    object.__setattr__(loaded, "channels", tuple(doc["channels"]))
    return loaded
