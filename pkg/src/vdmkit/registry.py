"""Dispatch from metric id strings to implementations.

Registered ids: fd, energy, mmd-linear, mmd-poly, mmd-rbf, mmd-lap, jedi,
mw2. Every metric computes from two feature sets and returns a
:class:`~vdmkit.sample_metrics.MetricResult` so callers (protocol harnesses,
the CLI) can stay metric-agnostic.
"""

from __future__ import annotations

import dataclasses
import time

from .errors import DataError
from .features import as_features
from .frechet import fvd
from .rng import derive_seeds
from .sample_metrics import (
    KernelSpec,
    MetricResult,
    energy_distance,
    jedi_score,
    mmd2_unbiased,
)
from .transport import fit_gmm, mw2_sq

__all__ = ["METRIC_IDS", "compute_metric"]

_MMD_FAMILIES = {
    "mmd-linear": "linear",
    "mmd-poly": "polynomial",
    "mmd-rbf": "rbf",
    "mmd-lap": "laplacian",
}

METRIC_IDS = ("fd", "energy", "mmd-linear", "mmd-poly", "mmd-rbf", "mmd-lap",
              "jedi", "mw2")

DEFAULT_CLUSTERS = 5


def _compute_fd(real, gen, seed, options) -> MetricResult:
    ddof = int(options.pop("ddof", 0))
    ridge = float(options.pop("ridge", 0.0))
    start = time.perf_counter()
    res = fvd(real, gen, ddof=ddof, ridge=ridge)
    elapsed = (time.perf_counter() - start) * 1e3
    return MetricResult(
        metric_id="fd",
        value=res.value,
        n_real=real.n,
        n_gen=gen.n,
        seed=seed,
        elapsed_ms=elapsed,
        params={"ddof": ddof, "ridge": ridge},
        extra={
            "mean_term": res.mean_term,
            "cov_term": res.cov_term,
            "clamped": res.clamped,
        },
    )


def _compute_mw2(real, gen, seed, options) -> MetricResult:
    c_real = int(options.pop("c_real", options.get("clusters", DEFAULT_CLUSTERS)))
    c_gen = int(options.pop("c_gen", options.get("clusters", DEFAULT_CLUSTERS)))
    options.pop("clusters", None)
    base = seed if seed is not None else 0
    fit_seeds = derive_seeds(base, ("mw2-fit",), 2)
    start = time.perf_counter()
    p = fit_gmm(real, c_real, seed=fit_seeds[0])
    q = fit_gmm(gen, c_gen, seed=fit_seeds[1])
    res = mw2_sq(p, q, seed=seed)
    elapsed = (time.perf_counter() - start) * 1e3
    return dataclasses.replace(
        res, n_real=real.n, n_gen=gen.n, elapsed_ms=elapsed
    )


def compute_metric(metric_id: str, real, gen, seed: int | None = None,
                   **options) -> MetricResult:
    """Compute one registered metric between two feature sets.

    Unknown option names raise so typos never silently fall back to
    defaults. ``seed`` is recorded in the result; only mw2 (GMM fits)
    actually consumes randomness.
    """
    real = as_features(real, "real")
    gen = as_features(gen, "gen")
    options = dict(options)

    if metric_id == "fd":
        out = _compute_fd(real, gen, seed, options)
    elif metric_id == "energy":
        out = energy_distance(real, gen, seed=seed)
    elif metric_id in _MMD_FAMILIES:
        spec = KernelSpec(
            family=_MMD_FAMILIES[metric_id],
            degree=int(options.pop("degree", 2)),
            gamma=options.pop("gamma", "auto"),
            coef=float(options.pop("coef", 0.0)),
        )
        out = mmd2_unbiased(real, gen, spec, seed=seed)
    elif metric_id == "jedi":
        out = jedi_score(
            real,
            gen,
            clamp_negative=bool(options.pop("clamp_negative", False)),
            extractor=options.pop("extractor", None),
            seed=seed,
        )
    elif metric_id == "mw2":
        out = _compute_mw2(real, gen, seed, options)
    else:
        raise DataError(
            f"unknown metric {metric_id!r}; registered: {', '.join(METRIC_IDS)}"
        )
    if options:
        raise DataError(
            f"unused options for {metric_id}: {', '.join(sorted(options))}"
        )
    return out
