"""Experimental harnesses: toy distributions, convergence studies, sweeps.

The convergence protocol estimates how many samples a metric needs before its
value stabilizes: evaluate the metric on subsample pairs at every grid size
n (multiples of ``interval``), average over ``repeats`` draws, and call the
run converged at the smallest n whose mean, and the mean at every larger grid
size, stays within a relative ``margin`` of the target-size mean.

Seeds are derived per (grid size, repeat index) from the master seed, so the
target point reuses the same draws whether it is reached through the grid or
directly, and repeat counts can change without reshuffling earlier repeats.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, DimensionMismatchError, RangeError
from .features import FeatureMatrix, as_features, subsample
from .registry import compute_metric
from .rng import derive_seeds, make_generator

__all__ = [
    "ConvergenceConfig",
    "ConvergenceReport",
    "RateCurve",
    "SweepResult",
    "synth_mg",
    "synth_gmm",
    "gmm_component_means",
    "convergence_sample_size",
    "rate_curve",
    "blur_sigma_range",
    "sweep",
    "spearman",
]

RATE_EPS = 1e-12
GRID_MIN = 50


def synth_mg(n: int, seed: int) -> FeatureMatrix:
    """100-D toy Gaussian: columns 0-49 iid N(0,1), columns 50-99 their
    cumulative sum (so the second half is a deterministic linear map of the
    first)."""
    if n < 1:
        raise DataError(f"need n >= 1, got {n}")
    rng = make_generator(seed, "synth-mg")
    half = rng.standard_normal((n, 50))
    return FeatureMatrix(np.hstack([half, np.cumsum(half, axis=1)]), copy=False)


def gmm_component_means() -> np.ndarray:
    """The fixed 5 x 50 component mean layout used by :func:`synth_gmm`.

    Half-integer lattice points drawn once from a pinned stream; constants,
    not per-call randomness, so every run and implementation agrees.
    """
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(820513)))
    return 3.0 * np.round(2.0 * rng.standard_normal((5, 50))) / 2.0


def synth_gmm(n: int, seed: int) -> FeatureMatrix:
    """100-D toy mixture: columns 0-49 from a 5-component equal-weight
    unit-covariance GMM on a fixed mean lattice, columns 50-99 the cumulative
    sum of the first half."""
    if n < 5:
        raise DataError(f"need n >= 5, got {n}")
    means = gmm_component_means()
    rng = make_generator(seed, "synth-gmm")
    comp = rng.integers(0, 5, size=n)
    half = rng.standard_normal((n, 50)) + means[comp]
    return FeatureMatrix(np.hstack([half, np.cumsum(half, axis=1)]), copy=False)


@dataclass(frozen=True)
class ConvergenceConfig:
    """Grid/repeat settings for the convergence protocols.

    ``repeats=None`` resolves to 5 for :func:`convergence_sample_size` and 10
    for :func:`rate_curve`; set it explicitly to share draws between the two.
    ``metric_options`` passes through to the metric (kernel params etc.).
    """

    interval: int = 100
    repeats: int | None = None
    margin: float = 0.05
    target_n: int = 5000
    metric_id: str = "fd"
    master_seed: int = 0
    metric_options: dict = field(default_factory=dict)

    def __post_init__(self):
        # 1.0 is allowed as the vacuous upper bound
        if not 0 < self.margin <= 1:
            raise DataError(f"margin must be in (0, 1], got {self.margin}")
        if self.interval < 1:
            raise DataError(f"interval must be >= 1, got {self.interval}")
        if self.repeats is not None and self.repeats < 1:
            raise DataError(f"repeats must be >= 1, got {self.repeats}")
        if self.target_n < 1:
            raise DataError(f"target_n must be >= 1, got {self.target_n}")

    def resolve_repeats(self, default: int) -> int:
        return default if self.repeats is None else self.repeats

    def to_dict(self) -> dict:
        return {
            "interval": self.interval,
            "repeats": self.repeats,
            "margin": self.margin,
            "target_n": self.target_n,
            "metric": self.metric_id,
            "master_seed": self.master_seed,
            "metric_options": dict(sorted(self.metric_options.items())),
        }


@dataclass(frozen=True)
class ConvergenceReport:
    """Per-grid-point means/variances plus the convergence verdict."""

    config: ConvergenceConfig
    repeats: int
    ns: tuple
    means: tuple
    variances: tuple
    target_value: float
    converged_at: int | None
    truncated: bool

    def to_dict(self) -> dict:
        return {
            "config": dict(self.config.to_dict(), repeats=self.repeats),
            "points": [
                {"n": n, "mean": m, "variance": v}
                for n, m, v in zip(self.ns, self.means, self.variances)
            ],
            "target_value": self.target_value,
            "converged_at": self.converged_at,
            "truncated": self.truncated,
        }

    def to_csv(self) -> str:
        lines = ["n,mean,variance"]
        for n, m, v in zip(self.ns, self.means, self.variances):
            lines.append(f"{n},{m!r},{v!r}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class RateCurve:
    """Relative deviation from the target-size mean at each grid size."""

    config: ConvergenceConfig
    repeats: int
    ns: tuple
    rates: tuple
    target_value: float
    truncated: bool
    eps: float = RATE_EPS

    def to_dict(self) -> dict:
        return {
            "config": dict(self.config.to_dict(), repeats=self.repeats),
            "points": [{"n": n, "rate": r} for n, r in zip(self.ns, self.rates)],
            "target_value": self.target_value,
            "truncated": self.truncated,
            "eps": self.eps,
        }

    def to_csv(self) -> str:
        lines = ["n,rate"]
        for n, r in zip(self.ns, self.rates):
            lines.append(f"{n},{r!r}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SweepResult:
    """Metric value per distortion level."""

    levels: tuple
    values: tuple
    metric_id: str

    def __post_init__(self):
        if len(self.levels) != len(self.values):
            raise DimensionMismatchError(
                f"{len(self.levels)} levels vs {len(self.values)} values"
            )

    def to_dict(self) -> dict:
        return {
            "metric": self.metric_id,
            "points": [
                {"level": lv, "value": v} for lv, v in zip(self.levels, self.values)
            ],
        }

    def to_csv(self) -> str:
        lines = ["level,value"]
        for lv, v in zip(self.levels, self.values):
            lines.append(f"{lv},{v!r}")
        return "\n".join(lines) + "\n"


def _grid(cfg: ConvergenceConfig, available: int) -> tuple[list[int], int, bool]:
    """Grid sizes, the effective target size, and the truncation flag."""
    n_t = min(cfg.target_n, available)
    truncated = n_t < cfg.target_n
    start = max(cfg.interval, GRID_MIN)
    # first multiple of interval at or above the floor
    first = ((start + cfg.interval - 1) // cfg.interval) * cfg.interval
    ns = list(range(first, n_t + 1, cfg.interval))
    if not ns or ns[-1] != n_t:
        ns.append(n_t)
    return ns, n_t, truncated


def _point_value(real, gen, cfg: ConvergenceConfig, n: int, r: int) -> float:
    """One metric evaluation on the seeded subsample pair for (n, repeat r)."""
    s_real, s_gen, s_metric = derive_seeds(cfg.master_seed, (n, r), 3)
    try:
        res = compute_metric(
            cfg.metric_id,
            subsample(real, n, s_real),
            subsample(gen, n, s_gen),
            seed=int(s_metric),
            **cfg.metric_options,
        )
    except Exception as exc:
        raise DataError(
            f"metric {cfg.metric_id} failed at n={n}, repeat {r}: {exc}"
        ) from exc
    return res.value


def _grid_stats(real, gen, cfg: ConvergenceConfig, repeats: int,
                threads: int = 1):
    real = as_features(real, "real")
    gen = as_features(gen, "gen")
    if real.d != gen.d:
        raise DimensionMismatchError(f"dimension mismatch: {real.d} vs {gen.d}")
    ns, n_t, truncated = _grid(cfg, min(real.n, gen.n))
    tasks = [(n, r) for n in ns for r in range(repeats)]
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(
                pool.map(lambda t: _point_value(real, gen, cfg, *t), tasks)
            )
        values = dict(zip(tasks, results))
    else:
        values = {t: _point_value(real, gen, cfg, *t) for t in tasks}
    means, variances = [], []
    # aggregation order fixed by (n, repeat) regardless of scheduling
    for n in ns:
        arr = np.asarray([values[(n, r)] for r in range(repeats)])
        means.append(float(arr.mean()))
        variances.append(float(arr.var()))
    # the target point is the last grid entry by construction
    return ns, means, variances, means[-1], truncated


def _rel_err(value: float, target: float) -> float:
    if value == target:
        return 0.0
    if target == 0.0:
        return np.inf
    return abs(value - target) / abs(target)


def convergence_sample_size(real, gen, cfg: ConvergenceConfig,
                            threads: int = 1) -> ConvergenceReport:
    """Run the grid protocol and locate the smallest stable sample size.

    ``converged_at`` is the smallest grid n whose mean, and the mean of every
    larger grid n, is within ``cfg.margin`` relative error of the mean at the
    target size. The target point itself always qualifies (relative error 0),
    so the scan yields at most the effective target size.
    """
    repeats = cfg.resolve_repeats(5)
    ns, means, variances, target, truncated = _grid_stats(
        real, gen, cfg, repeats, threads
    )
    converged_at = None
    for n, m in zip(reversed(ns), reversed(means)):
        if _rel_err(m, target) <= cfg.margin:
            converged_at = n
        else:
            break
    return ConvergenceReport(
        config=cfg,
        repeats=repeats,
        ns=tuple(ns),
        means=tuple(means),
        variances=tuple(variances),
        target_value=target,
        converged_at=converged_at,
        truncated=truncated,
    )


def rate_curve(real, gen, cfg: ConvergenceConfig, threads: int = 1) -> RateCurve:
    """Relative deviation curve (mean(n) - mean(target)) / (mean(target) + eps).

    Shares the seed scheme with :func:`convergence_sample_size`, so the rate
    at the target size is exactly zero.
    """
    repeats = cfg.resolve_repeats(10)
    ns, means, _, target, truncated = _grid_stats(real, gen, cfg, repeats, threads)
    rates = [(m - target) / (target + RATE_EPS) for m in means]
    return RateCurve(
        config=cfg,
        repeats=repeats,
        ns=tuple(ns),
        rates=tuple(rates),
        target_value=target,
        truncated=truncated,
    )


def blur_sigma_range(level: float) -> tuple[float, float]:
    """Per-frame blur sigma range (0.1 - 0.01*level, 0.75 + 0.8*level).

    The low end hits zero at level 10, so levels are restricted to [0, 10).
    """
    if not np.isfinite(level) or level < 0:
        raise RangeError(f"level must be finite and >= 0, got {level}")
    lo = 0.1 - 0.01 * level
    hi = 0.75 + 0.8 * level
    if lo <= 0:
        raise RangeError(
            f"level {level} drives the lower sigma bound to {lo:.6g} (<= 0); "
            "levels must stay below 10"
        )
    return lo, hi


def sweep(real, gen_series, metric_id: str, seed: int = 0, levels=None,
          n_sub: int | None = None, **metric_options) -> SweepResult:
    """Evaluate one metric against each element of a distortion series.

    All levels share the same subsampling seeds so differences reflect the
    series, not resampling noise. ``n_sub`` caps the per-side sample count.
    """
    real = as_features(real, "real")
    series = [as_features(g, f"gen_series[{i}]") for i, g in enumerate(gen_series)]
    if not series:
        raise DataError("gen_series must be nonempty")
    for i, g in enumerate(series):
        if g.d != real.d:
            raise DimensionMismatchError(
                f"gen_series[{i}] has d={g.d}, real has d={real.d}"
            )
    if levels is None:
        levels = tuple(range(len(series)))
    levels = tuple(levels)
    if len(levels) != len(series):
        raise DimensionMismatchError(
            f"{len(levels)} levels vs {len(series)} series elements"
        )
    s_real, s_gen, s_metric = derive_seeds(seed, ("sweep",), 3)
    values = []
    for g in series:
        r = real if n_sub is None else subsample(real, min(n_sub, real.n), s_real)
        g_eff = g if n_sub is None else subsample(g, min(n_sub, g.n), s_gen)
        res = compute_metric(metric_id, r, g_eff, seed=int(s_metric), **metric_options)
        values.append(res.value)
    return SweepResult(levels=levels, values=tuple(values), metric_id=metric_id)


def _average_ranks(v: np.ndarray) -> np.ndarray:
    order = np.argsort(v, kind="stable")
    ranks = np.empty(v.size)
    sv = v[order]
    i = 0
    while i < v.size:
        j = i
        while j + 1 < v.size and sv[j + 1] == sv[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman(xs, ys) -> float:
    """Spearman rank correlation with average-rank tie handling."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.ndim != 1 or y.ndim != 1:
        raise DataError("inputs must be 1-D value lists")
    if x.size != y.size:
        raise DimensionMismatchError(f"length mismatch: {x.size} vs {y.size}")
    if x.size < 2:
        raise DataError(f"need at least 2 values, got {x.size}")
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise DataError("inputs must be finite")
    rx = _average_ranks(x)
    ry = _average_ranks(y)
    rx -= rx.mean()
    ry -= ry.mean()
    denom = np.sqrt((rx**2).sum() * (ry**2).sum())
    if denom == 0.0:
        raise DataError("rank correlation undefined for constant input")
    return float(np.clip((rx * ry).sum() / denom, -1.0, 1.0))
