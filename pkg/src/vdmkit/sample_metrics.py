"""Distribution-free two-sample distances: energy distance and unbiased MMD.

Both statistics are computed by blocked accumulation over row-major blocks of
256 rows in a fixed order (outer blocks over x, inner blocks over y, partial
sums added in loop order), so results are bitwise reproducible regardless of
how the underlying BLAS parallelizes individual blocks.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .errors import DataError, DimensionMismatchError
from .features import as_features

__all__ = [
    "KernelSpec",
    "MetricResult",
    "JEDI_KERNEL",
    "JEDI_SCALE",
    "kernel_eval",
    "mmd2_unbiased",
    "energy_distance",
    "jedi_score",
]

BLOCK = 256

KERNEL_FAMILIES = ("linear", "polynomial", "rbf", "laplacian")


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus parameters.

    gamma="auto" resolves to 1/d at evaluation time; degree and coef apply to
    the polynomial family only.
    """

    family: str
    degree: int = 2
    gamma: float | str = "auto"
    coef: float = 0.0

    def __post_init__(self):
        if self.family not in KERNEL_FAMILIES:
            raise ValueError(
                f"unknown kernel family {self.family!r}; expected one of "
                f"{KERNEL_FAMILIES}"
            )
        if self.family == "polynomial" and self.degree < 1:
            raise ValueError("polynomial degree must be >= 1")
        if self.gamma != "auto" and not float(self.gamma) > 0:
            raise ValueError("gamma must be positive or 'auto'")

    def resolve_gamma(self, d: int) -> float:
        return 1.0 / d if self.gamma == "auto" else float(self.gamma)


#: The JEDi kernel configuration: polynomial, degree 2, gamma 1, coef 0.
JEDI_KERNEL = KernelSpec("polynomial", degree=2, gamma=1.0, coef=0.0)
#: Scale factor applied to the unbiased MMD to produce the JEDi score.
JEDI_SCALE = 100.0


@dataclass(frozen=True)
class MetricResult:
    """A computed metric value with its provenance.

    ``value`` may be negative for the unbiased MMD estimator. ``params``
    records the resolved metric parameters (e.g. gamma after "auto").
    """

    metric_id: str
    value: float
    n_real: int
    n_gen: int
    seed: int | None = None
    elapsed_ms: float = 0.0
    params: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "metric": self.metric_id,
            "value": self.value,
            "n_real": self.n_real,
            "n_gen": self.n_gen,
            "seed": self.seed,
            "elapsed_ms": self.elapsed_ms,
        }
        # metric-specific top-level fields (e.g. fd's term breakdown)
        out.update(sorted(self.extra.items()))
        if self.params:
            out["params"] = dict(sorted(self.params.items()))
        return out


def _gram_block(spec: KernelSpec, gamma: float, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    if spec.family == "linear":
        return x @ y.T
    if spec.family == "polynomial":
        return (gamma * (x @ y.T) + spec.coef) ** spec.degree
    if spec.family == "rbf":
        return np.exp(-gamma * cdist(x, y, "sqeuclidean"))
    return np.exp(-gamma * cdist(x, y, "cityblock"))


def _gram_diag(spec: KernelSpec, gamma: float, x: np.ndarray) -> np.ndarray:
    # k(x_i, x_i) per row, used to strip diagonals from within-set sums
    if spec.family in ("rbf", "laplacian"):
        return np.ones(len(x))
    sq = np.einsum("ij,ij->i", x, x)
    if spec.family == "linear":
        return sq
    return (gamma * sq + spec.coef) ** spec.degree


def _blocked_sum(fn, x: np.ndarray, y: np.ndarray) -> float:
    """Sum fn-blocks over the full x-y grid in fixed row-major block order."""
    total = 0.0
    for i in range(0, len(x), BLOCK):
        xi = x[i : i + BLOCK]
        for j in range(0, len(y), BLOCK):
            total += float(fn(xi, y[j : j + BLOCK]).sum())
    return total


def kernel_eval(spec: KernelSpec, x, y) -> float:
    """Evaluate k(x, y) for single d-vectors."""
    x = np.asarray(x, dtype=np.float64).reshape(1, -1)
    y = np.asarray(y, dtype=np.float64).reshape(1, -1)
    if x.shape[1] != y.shape[1]:
        raise DimensionMismatchError(
            f"vector dimensions differ: {x.shape[1]} vs {y.shape[1]}"
        )
    gamma = spec.resolve_gamma(x.shape[1])
    return float(_gram_block(spec, gamma, x, y)[0, 0])


def mmd2_unbiased(x, y, spec: KernelSpec, seed: int | None = None) -> MetricResult:
    """Unbiased squared MMD between two samples.

    Within-set sums exclude the diagonal with 1/(m(m-1)) weights; the cross
    term is -2/(mn) times the full grid sum. The estimate can be negative
    under the null and is reported raw.
    """
    x = as_features(x, "x")
    y = as_features(y, "y")
    if x.d != y.d:
        raise DimensionMismatchError(f"dimension mismatch: {x.d} vs {y.d}")
    m, n = x.n, y.n
    if m < 2 or n < 2:
        raise DataError(f"unbiased MMD needs m, n >= 2, got m={m}, n={n}")
    start = time.perf_counter()
    gamma = spec.resolve_gamma(x.d)
    block = lambda a, b: _gram_block(spec, gamma, a, b)

    sxx = _blocked_sum(block, x.data, x.data) - float(_gram_diag(spec, gamma, x.data).sum())
    syy = _blocked_sum(block, y.data, y.data) - float(_gram_diag(spec, gamma, y.data).sum())
    sxy = _blocked_sum(block, x.data, y.data)
    value = sxx / (m * (m - 1)) + syy / (n * (n - 1)) - 2.0 * sxy / (m * n)

    family_tag = {"linear": "linear", "polynomial": "poly", "rbf": "rbf", "laplacian": "lap"}
    params = {"family": spec.family, "gamma": gamma}
    if spec.family == "polynomial":
        params.update(degree=spec.degree, coef=spec.coef)
    return MetricResult(
        metric_id=f"mmd-{family_tag[spec.family]}",
        value=float(value),
        n_real=m,
        n_gen=n,
        seed=seed,
        elapsed_ms=(time.perf_counter() - start) * 1e3,
        params=params,
    )


def energy_distance(x, y, seed: int | None = None) -> MetricResult:
    """Energy distance with full-range double sums (V-statistic form).

    value = 2/(mn) sum ||x_i - y_j|| - 1/m^2 sum ||x_i - x_j||
            - 1/n^2 sum ||y_i - y_j||
    """
    x = as_features(x, "x")
    y = as_features(y, "y")
    if x.d != y.d:
        raise DimensionMismatchError(f"dimension mismatch: {x.d} vs {y.d}")
    m, n = x.n, y.n
    start = time.perf_counter()
    dist = lambda a, b: cdist(a, b, "euclidean")
    sxy = _blocked_sum(dist, x.data, y.data)
    sxx = _blocked_sum(dist, x.data, x.data)
    syy = _blocked_sum(dist, y.data, y.data)
    value = 2.0 * sxy / (m * n) - sxx / (m * m) - syy / (n * n)
    return MetricResult(
        metric_id="energy",
        value=float(value),
        n_real=m,
        n_gen=n,
        seed=seed,
        elapsed_ms=(time.perf_counter() - start) * 1e3,
    )


def jedi_score(
    real,
    gen,
    clamp_negative: bool = False,
    extractor: str | None = None,
    seed: int | None = None,
) -> MetricResult:
    """100 x unbiased polynomial-kernel MMD (degree 2, gamma 1, coef 0).

    The score is designed for vjepa_ssv2 features; passing any other known
    ``extractor`` issues a warning but still computes. The raw (possibly
    negative) value is reported unless ``clamp_negative`` is set.
    """
    if extractor is not None and extractor != "vjepa_ssv2":
        warnings.warn(
            f"jedi_score is calibrated for vjepa_ssv2 features, got "
            f"extractor={extractor!r}",
            stacklevel=2,
        )
    inner = mmd2_unbiased(real, gen, JEDI_KERNEL, seed=seed)
    value = JEDI_SCALE * inner.value
    clamped = False
    if clamp_negative and value < 0.0:
        value = 0.0
        clamped = True
    params = dict(inner.params, scale=JEDI_SCALE)
    if clamped:
        params["clamped"] = True
    return MetricResult(
        metric_id="jedi",
        value=value,
        n_real=inner.n_real,
        n_gen=inner.n_gen,
        seed=seed,
        elapsed_ms=inner.elapsed_ms,
        params=params,
    )
