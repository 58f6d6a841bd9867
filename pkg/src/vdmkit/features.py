"""Canonical feature-set representation and array/manifest I/O.

Feature sets live in memory as :class:`FeatureMatrix`, an immutable 2-D
float64 array with one row per clip. On disk they are NPY files (v1.0 is
written; v1.0 and v2.0 are read) restricted to little-endian float32/float64,
C order, 2-D. The restriction is deliberate: the adapter component and any
alternate implementation interoperate bit-exactly through this format.

Datasets are described by a JSON :class:`Manifest` that pins the extractor
identity and the expected feature dimension; validation happens before any
metric touches the data.
"""

from __future__ import annotations

import ast
import json
import os
import struct
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DataError,
    DimensionMismatchError,
    FormatError,
    UnsupportedLayoutError,
)
from .rng import make_generator

__all__ = [
    "FeatureMatrix",
    "ScalingStats",
    "Manifest",
    "EXTRACTOR_DIMS",
    "as_features",
    "read_array",
    "write_array",
    "peek_header",
    "standardize",
    "subsample",
    "load_manifest",
    "save_manifest",
    "validate_manifest",
]

_MAGIC = b"\x93NUMPY"

#: Expected feature dimension per extractor id. ``None`` means unconstrained.
EXTRACTOR_DIMS: dict[str, int | None] = {
    "i3d": 400,
    "videomae_pt": 1408,
    "videomae_ssv2": 1408,
    "vjepa_pt": 1280,
    "vjepa_ssv2": 1280,
    "synthetic": None,
}


class FeatureMatrix:
    """Immutable n x d float64 matrix of per-clip feature vectors.

    Invariants enforced at construction: two-dimensional, n >= 1, d >= 1,
    every entry finite. The backing array is C-contiguous float64 and marked
    read-only, so instances are safe to share across threads.
    """

    __slots__ = ("_data",)

    def __init__(self, data, copy: bool = True):
        arr = np.array(data, dtype=np.float64, copy=copy, order="C")
        if arr.ndim != 2:
            raise UnsupportedLayoutError(
                f"feature data must be 2-D, got {arr.ndim}-D"
            )
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DataError(f"feature matrix must be nonempty, got shape {arr.shape}")
        bad = ~np.isfinite(arr)
        if bad.any():
            row = int(np.nonzero(bad.any(axis=1))[0][0])
            raise DataError(f"non-finite value in row {row}")
        arr.flags.writeable = False
        self._data = arr

    @property
    def data(self) -> np.ndarray:
        """Read-only float64 array of shape (n, d)."""
        return self._data

    @property
    def n(self) -> int:
        return self._data.shape[0]

    @property
    def d(self) -> int:
        return self._data.shape[1]

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"FeatureMatrix(n={self.n}, d={self.d})"


def as_features(x, name: str = "features") -> FeatureMatrix:
    """Coerce an array-like or FeatureMatrix to a validated FeatureMatrix."""
    if isinstance(x, FeatureMatrix):
        return x
    try:
        return FeatureMatrix(x)
    except (UnsupportedLayoutError, DataError) as exc:
        raise type(exc)(f"{name}: {exc}") from None


@dataclass(frozen=True)
class ScalingStats:
    """Per-column mean/std used by :func:`standardize`.

    ``std`` entries are strictly positive; zero-variance columns are floored
    at 1e-8 and their indices recorded in ``floored_columns``.
    """

    mean: np.ndarray
    std: np.ndarray
    floored_columns: tuple[int, ...] = ()

    STD_FLOOR = 1e-8

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=np.float64)
        std = np.asarray(self.std, dtype=np.float64)
        if mean.ndim != 1 or std.shape != mean.shape:
            raise DimensionMismatchError("mean and std must be matching 1-D vectors")
        if not (np.isfinite(mean).all() and np.isfinite(std).all()):
            raise DataError("scaling stats must be finite")
        if (std < self.STD_FLOOR).any():
            raise DataError(f"std entries must be >= {self.STD_FLOOR}")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "std", std)

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


# ---------------------------------------------------------------------------
# NPY reading/writing
# ---------------------------------------------------------------------------

def _parse_header(f, path: str):
    magic = f.read(6)
    if magic != _MAGIC:
        raise FormatError(f"{path}: not an NPY file (bad magic {magic!r})")
    version = f.read(2)
    if len(version) != 2:
        raise FormatError(f"{path}: truncated version field")
    major, minor = version[0], version[1]
    if major == 1:
        raw = f.read(2)
        if len(raw) != 2:
            raise FormatError(f"{path}: truncated header length")
        (hlen,) = struct.unpack("<H", raw)
    elif major == 2:
        raw = f.read(4)
        if len(raw) != 4:
            raise FormatError(f"{path}: truncated header length")
        (hlen,) = struct.unpack("<I", raw)
    else:
        raise FormatError(f"{path}: unsupported NPY version {major}.{minor}")
    header = f.read(hlen)
    if len(header) != hlen:
        raise FormatError(f"{path}: truncated header")
    try:
        meta = ast.literal_eval(header.decode("latin1").strip())
    except (SyntaxError, ValueError, UnicodeDecodeError) as exc:
        raise FormatError(f"{path}: unparseable NPY header ({exc})") from None
    if not isinstance(meta, dict) or set(meta) != {"descr", "fortran_order", "shape"}:
        raise FormatError(f"{path}: NPY header missing required keys")
    return meta


def peek_header(path: str) -> tuple[int, int, str]:
    """Read only the NPY header: returns (n, d, descr) without loading data."""
    with open(path, "rb") as f:
        meta = _parse_header(f, path)
    descr = meta["descr"]
    shape = meta["shape"]
    if not isinstance(shape, tuple) or len(shape) != 2:
        raise UnsupportedLayoutError(f"{path}: expected 2-D shape, got {shape!r}")
    return int(shape[0]), int(shape[1]), str(descr)


def read_array(path: str) -> FeatureMatrix:
    """Load an NPY feature file into a float64 :class:`FeatureMatrix`.

    Accepts NPY v1.0 or v2.0 with dtype ``<f4`` or ``<f8``, C order, 2-D.
    Anything else is rejected: format problems raise :class:`FormatError`,
    layout problems :class:`UnsupportedLayoutError`, and non-finite entries
    :class:`DataError` naming the first offending row.
    """
    with open(path, "rb") as f:
        meta = _parse_header(f, path)
        descr = meta["descr"]
        if descr not in ("<f4", "<f8"):
            raise UnsupportedLayoutError(
                f"{path}: dtype {descr!r} not supported (need '<f4' or '<f8')"
            )
        if meta["fortran_order"] is not False:
            raise UnsupportedLayoutError(f"{path}: fortran-ordered arrays not supported")
        shape = meta["shape"]
        if not isinstance(shape, tuple) or len(shape) != 2:
            raise UnsupportedLayoutError(f"{path}: expected 2-D shape, got {shape!r}")
        n, d = (int(s) for s in shape)
        if n < 1 or d < 1:
            raise DataError(f"{path}: empty feature file (shape {shape})")
        dtype = np.dtype(descr)
        payload = f.read()
    expected = n * d * dtype.itemsize
    if len(payload) < expected:
        raise FormatError(
            f"{path}: truncated data ({len(payload)} bytes, expected {expected})"
        )
    arr = np.frombuffer(payload[:expected], dtype=dtype).reshape(n, d)
    try:
        return FeatureMatrix(arr.astype(np.float64), copy=False)
    except DataError as exc:
        raise DataError(f"{path}: {exc}") from None


def write_array(m, path: str, precision: str = "f32") -> None:
    """Write a FeatureMatrix to ``path`` as NPY v1.0.

    ``precision`` is ``"f32"`` or ``"f64"``. The f64 path round-trips
    bit-exactly; the f32 path round-trips after float32 quantization.
    """
    m = as_features(m)
    if precision not in ("f32", "f64"):
        raise ValueError(f"precision must be 'f32' or 'f64', got {precision!r}")
    descr = "<f4" if precision == "f32" else "<f8"
    header = "{'descr': %r, 'fortran_order': False, 'shape': (%d, %d), }" % (
        descr,
        m.n,
        m.d,
    )
    # pad so magic(6) + version(2) + len(2) + header is a multiple of 64
    unpadded = 10 + len(header) + 1
    header = header + " " * (-unpadded % 64) + "\n"
    body = m.data.astype(np.dtype(descr)).tobytes(order="C")
    with open(path, "wb") as f:
        f.write(_MAGIC)
        f.write(bytes([1, 0]))
        f.write(struct.pack("<H", len(header)))
        f.write(header.encode("latin1"))
        f.write(body)


# ---------------------------------------------------------------------------
# Standardization and subsampling
# ---------------------------------------------------------------------------

def standardize(m, stats: ScalingStats | None = None) -> tuple[FeatureMatrix, ScalingStats]:
    """Column-wise (x - mean) / std transform.

    With ``stats=None`` the statistics are computed from ``m`` (training
    path); otherwise the given statistics are applied unchanged (test path).
    Zero-variance columns have their std floored to 1e-8; a warning is issued
    and the column indices are recorded on the returned stats.
    """
    m = as_features(m)
    if stats is None:
        mean = m.data.mean(axis=0)
        std = m.data.std(axis=0)
        floored = np.nonzero(std < ScalingStats.STD_FLOOR)[0]
        if floored.size:
            warnings.warn(
                f"standardize: {floored.size} zero-variance column(s) floored "
                f"to {ScalingStats.STD_FLOOR}",
                stacklevel=2,
            )
            std = np.maximum(std, ScalingStats.STD_FLOOR)
        stats = ScalingStats(mean, std, tuple(int(i) for i in floored))
    elif stats.dim != m.d:
        raise DimensionMismatchError(
            f"stats dimension {stats.dim} != feature dimension {m.d}"
        )
    out = (m.data - stats.mean) / stats.std
    return FeatureMatrix(out, copy=False), stats


def subsample(m, n_sub: int, seed: int) -> FeatureMatrix:
    """Draw ``n_sub`` rows without replacement, deterministically per seed.

    The selection comes from a Philox permutation, so a fixed seed yields the
    same rows in the same order on every platform. ``n_sub == n`` returns a
    full permutation of the rows.
    """
    m = as_features(m)
    if not 1 <= n_sub <= m.n:
        raise DataError(f"n_sub must be in [1, {m.n}], got {n_sub}")
    rng = make_generator(seed)
    idx = rng.permutation(m.n)[:n_sub]
    return FeatureMatrix(m.data[idx], copy=False)


# ---------------------------------------------------------------------------
# Manifests
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Manifest:
    """Dataset descriptor pinning extractor identity and feature dimension."""

    dataset: str
    extractor: str
    clip_len: int
    dim: int
    files: tuple[str, ...] = ()
    seed: int | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.extractor not in EXTRACTOR_DIMS:
            raise FormatError(
                f"unknown extractor {self.extractor!r}; expected one of "
                f"{sorted(EXTRACTOR_DIMS)}"
            )
        if self.clip_len < 1 or self.dim < 1:
            raise DataError("clip_len and dim must be >= 1")


def load_manifest(path: str) -> Manifest:
    """Parse a UTF-8 JSON manifest file."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = json.load(f)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid manifest JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise FormatError(f"{path}: manifest must be a JSON object")
    missing = {"dataset", "extractor", "clip_len", "dim", "files"} - set(raw)
    if missing:
        raise FormatError(f"{path}: manifest missing field(s) {sorted(missing)}")
    files = raw["files"]
    if not isinstance(files, list) or not all(isinstance(p, str) for p in files):
        raise FormatError(f"{path}: manifest 'files' must be a list of paths")
    known = {"dataset", "extractor", "clip_len", "dim", "files", "seed"}
    extra = {k: v for k, v in raw.items() if k not in known}
    return Manifest(
        dataset=str(raw["dataset"]),
        extractor=str(raw["extractor"]),
        clip_len=int(raw["clip_len"]),
        dim=int(raw["dim"]),
        files=tuple(files),
        seed=None if raw.get("seed") is None else int(raw["seed"]),
        extra=extra,
    )


def save_manifest(manifest: Manifest, path: str) -> None:
    doc = {
        "dataset": manifest.dataset,
        "extractor": manifest.extractor,
        "clip_len": manifest.clip_len,
        "dim": manifest.dim,
        "files": list(manifest.files),
        "seed": manifest.seed,
    }
    doc.update(manifest.extra)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write("\n")


def validate_manifest(manifest: Manifest, base_dir: str = ".") -> None:
    """Enforce extractor/dim consistency and check every referenced file.

    Raises :class:`DimensionMismatchError` when the declared dim contradicts
    the extractor table or any file's actual column count. Must pass before
    metrics consume the files.
    """
    table_dim = EXTRACTOR_DIMS[manifest.extractor]
    if table_dim is not None and manifest.dim != table_dim:
        raise DimensionMismatchError(
            f"extractor {manifest.extractor!r} produces dim {table_dim}, "
            f"manifest declares {manifest.dim}"
        )
    for rel in manifest.files:
        path = rel if os.path.isabs(rel) else os.path.join(base_dir, rel)
        if not os.path.exists(path):
            raise FormatError(f"manifest references missing file {rel!r}")
        _, d, _ = peek_header(path)
        if d != manifest.dim:
            raise DimensionMismatchError(
                f"file {rel!r} has dim {d}, manifest declares {manifest.dim}"
            )
