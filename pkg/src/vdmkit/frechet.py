"""Gaussian moment estimation and the Frechet (2-Wasserstein) distance.

The squared distance between Gaussian fits N(mean_a, cov_a) and
N(mean_b, cov_b) is

    ||mean_a - mean_b||^2 + Tr(cov_a + cov_b - 2 (cov_a cov_b)^(1/2))

The product square root is evaluated through the symmetrized form
cov_a^(1/2) cov_b cov_a^(1/2), whose argument is PSD by construction; the raw
product is non-symmetric and numerically fragile.

This distance is a semi-metric: nonnegative, symmetric, zero iff equal, but
the triangle inequality fails (see the counterexample tests).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, DimensionMismatchError, NotPsdError
from .features import as_features

__all__ = [
    "GaussianMoments",
    "FrechetResult",
    "estimate_moments",
    "sqrtm_psd",
    "frechet_distance",
    "fvd",
]

# eigenvalues in [-EIG_TOL * lam_max, 0] are treated as rounding noise
EIG_TOL = 1e-8
# a cov_term below -COV_CLAMP_TOL * (tr a + tr b) is a genuine error
COV_CLAMP_TOL = 1e-6


@dataclass(frozen=True)
class GaussianMoments:
    """Mean vector and covariance matrix of a Gaussian fit.

    ``n_source`` records how many samples produced the estimate; it is None
    for moments that do not come from data (e.g. GMM components).
    """

    mean: np.ndarray
    cov: np.ndarray
    n_source: int | None = None

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=np.float64)
        cov = np.asarray(self.cov, dtype=np.float64)
        if mean.ndim != 1:
            raise DimensionMismatchError("mean must be a vector")
        if cov.shape != (mean.shape[0], mean.shape[0]):
            raise DimensionMismatchError(
                f"cov shape {cov.shape} does not match mean dimension {mean.shape[0]}"
            )
        if not (np.isfinite(mean).all() and np.isfinite(cov).all()):
            raise DataError("moments must be finite")
        scale = np.abs(cov).max()
        if scale > 0 and np.abs(cov - cov.T).max() > 1e-10 * scale:
            raise NotPsdError("covariance is not symmetric within tolerance")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    def diagnostics(self) -> dict:
        """Eigenvalue range, numerical rank, and singularity flag of cov."""
        eigvals = np.linalg.eigvalsh(self.cov)
        lam_max = float(eigvals[-1])
        tol = EIG_TOL * max(lam_max, 0.0)
        rank = int(np.count_nonzero(eigvals > tol))
        return {
            "min_eigenvalue": float(eigvals[0]),
            "max_eigenvalue": lam_max,
            "rank": rank,
            "singular": rank < self.dim,
        }


@dataclass(frozen=True)
class FrechetResult:
    """Squared Frechet distance split into its two Eq.-style terms.

    ``value = mean_term + cov_term`` after clamping; ``clamped`` flags a
    slightly negative trace term that was raised to zero.
    """

    value: float
    mean_term: float
    cov_term: float
    clamped: bool = False


def estimate_moments(x, ddof: int = 0, ridge: float = 0.0) -> GaussianMoments:
    """Estimate (mean, cov) from samples with the 1/n covariance convention.

    Parameters
    ----------
    x : FeatureMatrix or array-like, shape (n, d)
        Sample rows; n >= 2 required.
    ddof : {0, 1}
        0 divides by n (the default convention throughout this package);
        1 divides by n-1 for parity with tools that use the unbiased form.
    ridge : float
        Optional nonnegative multiple of the identity added to the
        covariance, for downstream inversion of singular n < d fits.
    """
    m = as_features(x)
    if m.n < 2:
        raise DataError(f"need at least 2 samples to estimate moments, got {m.n}")
    if ddof not in (0, 1):
        raise ValueError("ddof must be 0 or 1")
    if ridge < 0:
        raise ValueError("ridge must be nonnegative")
    mean = m.data.mean(axis=0)
    centered = m.data - mean
    cov = centered.T @ centered / (m.n - ddof)
    cov = (cov + cov.T) / 2.0
    if ridge:
        cov = cov + ridge * np.eye(m.d)
    return GaussianMoments(mean=mean, cov=cov, n_source=m.n)


def sqrtm_psd(mat: np.ndarray, tol: float = EIG_TOL) -> np.ndarray:
    """Symmetric PSD square root via eigendecomposition.

    Eigenvalues in [-tol * lam_max, 0] are clamped to zero; anything more
    negative raises :class:`NotPsdError`.
    """
    mat = np.asarray(mat, dtype=np.float64)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DimensionMismatchError("sqrtm_psd needs a square matrix")
    scale = np.abs(mat).max()
    if scale > 0 and np.abs(mat - mat.T).max() > 1e-8 * scale:
        raise NotPsdError("matrix is not symmetric within tolerance")
    sym = (mat + mat.T) / 2.0
    eigvals, eigvecs = np.linalg.eigh(sym)
    lam_max = max(float(eigvals[-1]), 0.0)
    floor = -tol * lam_max
    if eigvals[0] < floor:
        raise NotPsdError(
            f"eigenvalue {eigvals[0]:.6e} below PSD tolerance {floor:.6e}"
        )
    clamped = np.where(eigvals < 0.0, 0.0, eigvals)
    root = (eigvecs * np.sqrt(clamped)) @ eigvecs.T
    return (root + root.T) / 2.0


def frechet_distance(a: GaussianMoments, b: GaussianMoments) -> FrechetResult:
    """Squared Frechet distance between two Gaussian moment pairs."""
    if a.dim != b.dim:
        raise DimensionMismatchError(f"dimension mismatch: {a.dim} vs {b.dim}")
    diff = a.mean - b.mean
    mean_term = float(diff @ diff)

    root_a = sqrtm_psd(a.cov)
    inner = root_a @ b.cov @ root_a
    cross = sqrtm_psd((inner + inner.T) / 2.0)
    tr_a = float(np.trace(a.cov))
    tr_b = float(np.trace(b.cov))
    cov_term = tr_a + tr_b - 2.0 * float(np.trace(cross))

    clamped = False
    if cov_term < 0.0:
        if cov_term < -COV_CLAMP_TOL * (tr_a + tr_b):
            raise NotPsdError(
                f"covariance trace term {cov_term:.6e} is too negative to be "
                f"rounding noise (threshold {-COV_CLAMP_TOL * (tr_a + tr_b):.6e})"
            )
        cov_term = 0.0
        clamped = True
    return FrechetResult(
        value=mean_term + cov_term,
        mean_term=mean_term,
        cov_term=cov_term,
        clamped=clamped,
    )


def fvd(real, gen, ddof: int = 0, ridge: float = 0.0) -> FrechetResult:
    """Frechet distance between Gaussian fits of two feature sets."""
    real = as_features(real, "real")
    gen = as_features(gen, "gen")
    if real.d != gen.d:
        raise DimensionMismatchError(
            f"feature dimensions differ: real d={real.d}, gen d={gen.d}"
        )
    return frechet_distance(
        estimate_moments(real, ddof=ddof, ridge=ridge),
        estimate_moments(gen, ddof=ddof, ridge=ridge),
    )
