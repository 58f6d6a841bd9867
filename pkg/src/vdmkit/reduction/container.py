"""On-disk container for fitted reduction models.

Binary layout (little-endian throughout):

    magic   4 bytes  b"VDMK"
    version u16      currently 1
    type    u8       1 = pca, 2 = lda, 3 = ae
    count   u32      number of arrays
    per array: ndim u8, shape as u64 each, raw <f8 payload

Non-array state (hyperparameters, class labels, training stats) travels in a
JSON sidecar at ``<path>.json`` so it stays human-readable.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from ..errors import FormatError
from .autoencoder import AeArchitecture, AeModel
from .lda import LdaModel
from .pca import PcaModel

__all__ = ["save_model", "load_model"]

MAGIC = b"VDMK"
VERSION = 1
_TYPE_TAGS = {"pca": 1, "lda": 2, "ae": 3}
_TAG_NAMES = {v: k for k, v in _TYPE_TAGS.items()}


def _model_parts(model):
    if isinstance(model, PcaModel):
        sidecar = {
            "type": "pca",
            "k": model.k,
            "dim": model.dim,
        }
        arrays = [model.mean, model.components, model.explained_variance_ratio]
    elif isinstance(model, LdaModel):
        sidecar = {
            "type": "lda",
            "k": model.k,
            "dim": model.dim,
            "classes": [_jsonable(c) for c in model.classes],
        }
        arrays = [model.mean, model.scalings]
    elif isinstance(model, AeModel):
        sidecar = {
            "type": "ae",
            "in_dim": model.architecture.in_dim,
            "plan": model.architecture.plan,
            "train_stats": model.train_stats,
        }
        arrays = [a for pair in model.weights for a in pair]
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    return sidecar, arrays


def _jsonable(value):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.str_,)):
        return str(value)
    return value


def save_model(model, path) -> Path:
    """Write a fitted model to ``path`` plus a ``<path>.json`` sidecar."""
    path = Path(path)
    sidecar, arrays = _model_parts(model)
    tag = _TYPE_TAGS[sidecar["type"]]
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<HB", VERSION, tag))
        fh.write(struct.pack("<I", len(arrays)))
        for a in arrays:
            a = np.ascontiguousarray(a, dtype="<f8")
            fh.write(struct.pack("<B", a.ndim))
            fh.write(struct.pack(f"<{a.ndim}Q", *a.shape))
            fh.write(a.tobytes())
    with open(path.with_name(path.name + ".json"), "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _read_exact(fh, n: int, what: str) -> bytes:
    buf = fh.read(n)
    if len(buf) != n:
        raise FormatError(f"truncated model file while reading {what}")
    return buf


def load_model(path):
    """Read a model written by :func:`save_model`."""
    path = Path(path)
    with open(path, "rb") as fh:
        if _read_exact(fh, 4, "magic") != MAGIC:
            raise FormatError(f"{path} is not a model container (bad magic)")
        version, tag = struct.unpack("<HB", _read_exact(fh, 3, "header"))
        if version != VERSION:
            raise FormatError(f"unsupported container version {version}")
        if tag not in _TAG_NAMES:
            raise FormatError(f"unknown model type tag {tag}")
        (count,) = struct.unpack("<I", _read_exact(fh, 4, "array count"))
        arrays = []
        for i in range(count):
            (ndim,) = struct.unpack("<B", _read_exact(fh, 1, f"array {i} ndim"))
            shape = struct.unpack(
                f"<{ndim}Q", _read_exact(fh, 8 * ndim, f"array {i} shape")
            )
            n_bytes = 8 * int(np.prod(shape, dtype=np.int64)) if ndim else 8
            raw = _read_exact(fh, n_bytes, f"array {i} payload")
            arrays.append(np.frombuffer(raw, dtype="<f8").reshape(shape).copy())

    sidecar_path = path.with_name(path.name + ".json")
    if not sidecar_path.exists():
        raise FormatError(f"missing sidecar {sidecar_path}")
    with open(sidecar_path) as fh:
        sidecar = json.load(fh)
    if _TYPE_TAGS.get(sidecar.get("type")) != tag:
        raise FormatError(
            f"sidecar type {sidecar.get('type')!r} does not match container tag {tag}"
        )

    if sidecar["type"] == "pca":
        mean, components, ratio = arrays
        return PcaModel(mean=mean, components=components, explained_variance_ratio=ratio)
    if sidecar["type"] == "lda":
        mean, scalings = arrays
        return LdaModel(mean=mean, scalings=scalings, classes=tuple(sidecar["classes"]))
    arch = AeArchitecture(in_dim=sidecar["in_dim"], plan=sidecar["plan"])
    if len(arrays) % 2:
        raise FormatError("autoencoder container holds an odd number of arrays")
    weights = tuple(
        (arrays[i], arrays[i + 1]) for i in range(0, len(arrays), 2)
    )
    expected = arch.layer_shapes()
    if len(weights) != len(expected):
        raise FormatError(
            f"expected {len(expected)} layers for plan {arch.plan!r}, "
            f"found {len(weights)}"
        )
    return AeModel(architecture=arch, weights=weights,
                   train_stats=sidecar.get("train_stats", {}))
