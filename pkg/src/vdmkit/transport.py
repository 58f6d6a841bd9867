"""Gaussian mixture fitting and the mixture-Wasserstein distance MW2.

MW2 restricts optimal-transport couplings between two GMMs to mixtures: the
cost of moving component i of p onto component j of q is the closed-form
squared Gaussian W2 (the Frechet formula), and the coupling weights solve an
exact discrete transport LP over the mixture weights.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg
from scipy.optimize import linprog

from .errors import DataError, DegenerateFitError, DimensionMismatchError, TransportError
from .features import as_features
from .frechet import GaussianMoments, estimate_moments, frechet_distance
from .rng import make_generator
from .sample_metrics import MetricResult

__all__ = [
    "GmmModel",
    "TransportPlan",
    "fit_gmm",
    "gaussian_w2_sq",
    "discrete_ot",
    "mw2_sq",
]

COV_FLOOR = 1e-6
EM_TOL = 1e-6
EM_MAX_ITER = 200
_RESTARTS = 3


@dataclass(frozen=True)
class GmmModel:
    """Fitted Gaussian mixture: weights (c,), means (c, d), covs (c, d, d)."""

    weights: np.ndarray
    means: np.ndarray
    covs: np.ndarray
    converged: bool = True
    n_iter: int = 0
    log_likelihoods: tuple[float, ...] = field(default=(), repr=False)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        mu = np.asarray(self.means, dtype=np.float64)
        cv = np.asarray(self.covs, dtype=np.float64)
        if w.ndim != 1 or mu.ndim != 2 or cv.ndim != 3:
            raise DimensionMismatchError("weights/means/covs must be 1-D/2-D/3-D")
        c = w.shape[0]
        if mu.shape[0] != c or cv.shape[0] != c or cv.shape[1:] != (mu.shape[1],) * 2:
            raise DimensionMismatchError("inconsistent GMM component shapes")
        if (w < 0).any() or abs(w.sum() - 1.0) > 1e-10:
            raise DataError("weights must be a probability vector (sum 1 within 1e-10)")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "means", mu)
        object.__setattr__(self, "covs", cv)

    @property
    def c(self) -> int:
        return self.weights.shape[0]

    @property
    def dim(self) -> int:
        return self.means.shape[1]

    def component(self, i: int) -> GaussianMoments:
        return GaussianMoments(mean=self.means[i], cov=self.covs[i])

    def to_dict(self) -> dict:
        return {
            "weights": self.weights.tolist(),
            "means": self.means.tolist(),
            "covs": self.covs.reshape(self.c, -1).tolist(),
            "dim": self.dim,
            "converged": self.converged,
            "n_iter": self.n_iter,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "GmmModel":
        d = int(doc["dim"])
        covs = np.asarray(doc["covs"], dtype=np.float64).reshape(-1, d, d)
        return cls(
            weights=np.asarray(doc["weights"], dtype=np.float64),
            means=np.asarray(doc["means"], dtype=np.float64),
            covs=covs,
            converged=bool(doc.get("converged", True)),
            n_iter=int(doc.get("n_iter", 0)),
        )


@dataclass(frozen=True)
class TransportPlan:
    """Optimal coupling between two weight vectors with its total cost."""

    matrix: np.ndarray
    cost: float


# ---------------------------------------------------------------------------
# EM fitting
# ---------------------------------------------------------------------------

def _kmeanspp_centers(x: np.ndarray, c: int, rng: np.random.Generator) -> np.ndarray:
    n = len(x)
    centers = np.empty((c, x.shape[1]))
    centers[0] = x[rng.integers(n)]
    d2 = np.sum((x - centers[0]) ** 2, axis=1)
    for k in range(1, c):
        total = d2.sum()
        if total <= 0:
            centers[k] = x[rng.integers(n)]
            continue
        centers[k] = x[rng.choice(n, p=d2 / total)]
        d2 = np.minimum(d2, np.sum((x - centers[k]) ** 2, axis=1))
    return centers


def _log_gaussian(x: np.ndarray, mean: np.ndarray, cov: np.ndarray) -> np.ndarray:
    d = x.shape[1]
    chol, lower = linalg.cho_factor(cov, lower=True, check_finite=False)
    logdet = 2.0 * np.sum(np.log(np.diag(chol)))
    solved = linalg.solve_triangular(
        chol, (x - mean).T, lower=lower, check_finite=False
    )
    maha = np.sum(solved**2, axis=0)
    return -0.5 * (d * np.log(2.0 * np.pi) + logdet + maha)


def _em_once(x: np.ndarray, c: int, rng: np.random.Generator,
             max_iter: int, tol: float):
    n, d = x.shape
    means = _kmeanspp_centers(x, c, rng)
    base = estimate_moments(x).cov
    base[np.diag_indices(d)] = np.maximum(np.diag(base), COV_FLOOR)
    covs = np.repeat(base[None], c, axis=0)
    weights = np.full(c, 1.0 / c)
    lls: list[float] = []
    converged = False
    for it in range(max_iter):
        # E-step
        log_prob = np.empty((n, c))
        for k in range(c):
            try:
                log_prob[:, k] = np.log(weights[k]) + _log_gaussian(x, means[k], covs[k])
            except linalg.LinAlgError:
                return None, lls
        tot = np.logaddexp.reduce(log_prob, axis=1)
        lls.append(float(tot.mean()))
        if it > 0 and abs(lls[-1] - lls[-2]) < tol:
            converged = True
            break
        # M-step
        resp = np.exp(log_prob - tot[:, None])
        nk = resp.sum(axis=0)
        if (nk < 1e-8).any():
            return None, lls
        weights = nk / n
        means = (resp.T @ x) / nk[:, None]
        for k in range(c):
            diff = x - means[k]
            cov = (resp[:, k, None] * diff).T @ diff / nk[k]
            cov = (cov + cov.T) / 2.0
            cov[np.diag_indices(d)] = np.maximum(np.diag(cov), COV_FLOOR)
            covs[k] = cov
    model = GmmModel(
        weights=weights,
        means=means,
        covs=covs,
        converged=converged,
        n_iter=len(lls),
        log_likelihoods=tuple(lls),
    )
    return model, lls


def fit_gmm(x, c: int, seed: int = 0, max_iter: int = EM_MAX_ITER,
            tol: float = EM_TOL) -> GmmModel:
    """Fit a full-covariance GMM by EM, deterministically per seed.

    Initialization is k-means++-style center seeding from a Philox stream.
    Covariance diagonals are floored at 1e-6. The fit stops when the mean
    per-sample log-likelihood improves by less than ``tol`` or after
    ``max_iter`` iterations. A component that empties restarts the fit (fresh
    derived seed, up to 3 attempts) before failing.
    """
    x = as_features(x)
    if c < 1:
        raise DataError("component count c must be >= 1")
    if x.n < 5 * c:
        raise DataError(f"need n >= 5*c samples to fit a {c}-component GMM, got {x.n}")
    if c == 1:
        # EM fixed point: the single component carries the sample moments
        mom = estimate_moments(x)
        cov = mom.cov.copy()
        cov[np.diag_indices(x.d)] = np.maximum(np.diag(cov), COV_FLOOR)
        return GmmModel(
            weights=np.array([1.0]),
            means=mom.mean[None, :],
            covs=cov[None, :, :],
            converged=True,
            n_iter=1,
        )
    for attempt in range(_RESTARTS):
        rng = make_generator(seed, attempt)
        model, _ = _em_once(x.data, c, rng, max_iter, tol)
        if model is not None:
            return model
    raise DegenerateFitError(
        f"EM produced an empty or singular component in {_RESTARTS} attempts; "
        f"try a smaller c (requested c={c}, n={x.n})"
    )


# ---------------------------------------------------------------------------
# Transport
# ---------------------------------------------------------------------------

def gaussian_w2_sq(a: GaussianMoments, b: GaussianMoments) -> float:
    """Squared 2-Wasserstein distance between Gaussians (Frechet formula)."""
    return frechet_distance(a, b).value


def _validate_simplex(w, name: str) -> np.ndarray:
    w = np.asarray(w, dtype=np.float64)
    if w.ndim != 1 or w.size < 1:
        raise TransportError(f"{name} must be a nonempty vector")
    if not np.isfinite(w).all() or (w < 0).any():
        raise TransportError(f"{name} must be finite and nonnegative")
    return w


def discrete_ot(cost, a, b) -> TransportPlan:
    """Exact discrete optimal transport between weight vectors a and b.

    Solves min <plan, cost> subject to plan 1 = a, plan^T 1 = b, plan >= 0
    with an exact LP (HiGHS dual simplex). Intended for component counts up
    to a few hundred.
    """
    cost = np.asarray(cost, dtype=np.float64)
    a = _validate_simplex(a, "a")
    b = _validate_simplex(b, "b")
    if cost.shape != (a.size, b.size):
        raise DimensionMismatchError(
            f"cost shape {cost.shape} does not match weights ({a.size}, {b.size})"
        )
    if not np.isfinite(cost).all() or (cost < 0).any():
        raise TransportError("cost matrix must be finite and nonnegative")
    if abs(a.sum() - b.sum()) > 1e-8:
        raise TransportError(
            f"weight sums differ: {a.sum():.12f} vs {b.sum():.12f}"
        )
    ca, cb = a.size, b.size
    if ca == 1:
        # marginals force the plan
        plan = b[None, :].copy()
        return TransportPlan(plan, float(np.dot(plan.ravel(), cost.ravel())))
    if cb == 1:
        plan = a[:, None].copy()
        return TransportPlan(plan, float(np.dot(plan.ravel(), cost.ravel())))

    # equality constraints: all row sums plus all but one column sum
    # (the last column constraint is linearly dependent, dropping it keeps
    # HiGHS away from a redundant row)
    n_var = ca * cb
    rows = []
    rhs = []
    for i in range(ca):
        r = np.zeros(n_var)
        r[i * cb : (i + 1) * cb] = 1.0
        rows.append(r)
        rhs.append(a[i])
    for j in range(cb - 1):
        r = np.zeros(n_var)
        r[j::cb] = 1.0
        rows.append(r)
        rhs.append(b[j])
    res = linprog(
        cost.ravel(),
        A_eq=np.array(rows),
        b_eq=np.array(rhs),
        bounds=(0, None),
        method="highs",
    )
    if not res.success:
        raise TransportError(f"transport LP failed: {res.message}")
    plan = res.x.reshape(ca, cb)
    plan[plan < 0] = 0.0
    return TransportPlan(plan, float(np.dot(plan.ravel(), cost.ravel())))


def mw2_sq(p: GmmModel, q: GmmModel, seed: int | None = None) -> MetricResult:
    """Squared mixture-Wasserstein distance between two fitted GMMs."""
    if p.dim != q.dim:
        raise DimensionMismatchError(f"dimension mismatch: {p.dim} vs {q.dim}")
    start = time.perf_counter()
    cost = np.empty((p.c, q.c))
    for i in range(p.c):
        comp_i = p.component(i)
        for j in range(q.c):
            cost[i, j] = gaussian_w2_sq(comp_i, q.component(j))
    plan = discrete_ot(cost, p.weights, q.weights)
    return MetricResult(
        metric_id="mw2",
        value=plan.cost,
        n_real=p.c,
        n_gen=q.c,
        seed=seed,
        elapsed_ms=(time.perf_counter() - start) * 1e3,
        params={"c_real": p.c, "c_gen": q.c},
    )
