"""Multivariate normality tests: Mardia skewness/kurtosis and Henze-Zirkler.

All three statistics are built on the Mahalanobis gram values
g_ij = (x_i - xbar)^T S^{-1} (x_j - xbar) with the 1/n covariance S, the
classical formulation in the source literature. The asymptotic null
distributions are used directly: chi-square for skewness (no small-sample
correction), standard normal for kurtosis, lognormal for Henze-Zirkler.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import DataError, SingularCovarianceError
from .features import as_features

__all__ = [
    "NormalityTestResult",
    "mardia_skewness",
    "mardia_kurtosis",
    "henze_zirkler",
    "run_battery",
]

ALPHA = 0.05
COND_LIMIT = 1e12
RIDGE_SCALE = 1e-8
_BLOCK = 512


@dataclass(frozen=True)
class NormalityTestResult:
    test_id: str
    statistic: float
    p_value: float
    reject_at_005: bool
    n: int
    d: int

    def __post_init__(self):
        if not 0.0 <= self.p_value <= 1.0:
            raise DataError(f"p_value {self.p_value} outside [0, 1]")
        if self.reject_at_005 != (self.p_value < ALPHA):
            raise DataError("reject_at_005 inconsistent with p_value")

    def to_dict(self) -> dict:
        return {
            "test": self.test_id,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "reject_at_005": self.reject_at_005,
            "n": self.n,
            "d": self.d,
        }


def _inv_covariance(cov: np.ndarray) -> np.ndarray:
    """Invert S by eigendecomposition, adding ridge 1e-8*tr(S)/d when the
    condition number exceeds 1e12."""
    d = cov.shape[0]
    eigvals, eigvecs = np.linalg.eigh(cov)
    lam_min, lam_max = float(eigvals[0]), float(eigvals[-1])
    if lam_min <= 0.0 or lam_max / lam_min > COND_LIMIT:
        ridge = RIDGE_SCALE * float(np.trace(cov)) / d
        if ridge <= 0.0:
            raise SingularCovarianceError(
                "covariance has zero trace; data is degenerate"
            )
        eigvals, eigvecs = np.linalg.eigh(cov + ridge * np.eye(d))
        if float(eigvals[0]) <= 0.0:
            raise SingularCovarianceError(
                "covariance remains singular after ridge fallback"
            )
    return (eigvecs / eigvals) @ eigvecs.T


def _prepare(x):
    m = as_features(x)
    if m.n < 10:
        raise DataError(f"normality tests need n >= 10, got {m.n}")
    centered = m.data - m.data.mean(axis=0)
    cov = centered.T @ centered / m.n
    s_inv = _inv_covariance((cov + cov.T) / 2.0)
    # w[j] = S^{-1} centered^T, so g_ij = centered[i] . w[:, j]
    w = s_inv @ centered.T
    return m, centered, w


def mardia_skewness(x) -> NormalityTestResult:
    """Mardia's multivariate skewness test.

    b1 = (1/n^2) sum_ij g_ij^3; the statistic n*b1/6 is asymptotically
    chi-square with d(d+1)(d+2)/6 degrees of freedom under normality.
    """
    m, centered, w = _prepare(x)
    n, d = m.n, m.d
    total = 0.0
    for i in range(0, n, _BLOCK):
        g = centered[i : i + _BLOCK] @ w
        total += float((g**3).sum())
    b1 = total / (n * n)
    statistic = n * b1 / 6.0
    dof = d * (d + 1) * (d + 2) / 6.0
    # b1 is a cube sum and can be trivially negative from rounding
    p = float(stats.chi2.sf(max(statistic, 0.0), dof))
    return NormalityTestResult("mardia_skew", statistic, p, p < ALPHA, n, d)


def mardia_kurtosis(x) -> NormalityTestResult:
    """Mardia's multivariate kurtosis test.

    b2 = (1/n) sum_i g_ii^2 has null mean d(d+2) and variance 8d(d+2)/n;
    the two-sided normal p-value of the z-score is reported.
    """
    m, centered, w = _prepare(x)
    n, d = m.n, m.d
    gii = np.einsum("ij,ji->i", centered, w)
    b2 = float((gii**2).mean())
    z = (b2 - d * (d + 2)) / np.sqrt(8.0 * d * (d + 2) / n)
    p = float(2.0 * stats.norm.sf(abs(z)))
    return NormalityTestResult("mardia_kurt", z, p, p < ALPHA, n, d)


def henze_zirkler(x) -> NormalityTestResult:
    """Henze-Zirkler test with the standard smoothing parameter.

    beta = ((n(2d+1))/4)^(1/(d+4)) / sqrt(2); the statistic compares the
    empirical characteristic function against the Gaussian one, and the
    p-value comes from the usual lognormal approximation of the null.
    """
    m, centered, w = _prepare(x)
    n, d = m.n, m.d
    beta = ((n * (2 * d + 1)) / 4.0) ** (1.0 / (d + 4)) / np.sqrt(2.0)
    b2 = beta * beta

    gii = np.einsum("ij,ji->i", centered, w)
    # sum over all pairs of exp(-b2/2 * D_ij) with D_ij the squared
    # Mahalanobis distance: D_ij = g_ii + g_jj - 2 g_ij
    pair_sum = 0.0
    for i in range(0, n, _BLOCK):
        g = centered[i : i + _BLOCK] @ w
        dij = gii[i : i + _BLOCK, None] + gii[None, :] - 2.0 * g
        np.maximum(dij, 0.0, out=dij)
        pair_sum += float(np.exp(-0.5 * b2 * dij).sum())
    one_sum = float(np.exp(-b2 / (2.0 * (1.0 + b2)) * gii).sum())
    hz = n * (
        pair_sum / (n * n)
        - 2.0 * (1.0 + b2) ** (-d / 2.0) * one_sum / n
        + (1.0 + 2.0 * b2) ** (-d / 2.0)
    )

    # lognormal null approximation (Henze & Zirkler 1990 moments)
    a = 1.0 + 2.0 * b2
    wb = (1.0 + b2) * (1.0 + 3.0 * b2)
    mu = 1.0 - a ** (-d / 2.0) * (
        1.0 + d * b2 / a + d * (d + 2) * b2**2 / (2.0 * a**2)
    )
    si2 = (
        2.0 * (1.0 + 4.0 * b2) ** (-d / 2.0)
        + 2.0 * a ** (-d)
        * (1.0 + 2.0 * d * b2**2 / a**2 + 3.0 * d * (d + 2) * b2**4 / (4.0 * a**4))
        - 4.0 * wb ** (-d / 2.0)
        * (1.0 + 3.0 * d * b2**2 / (2.0 * wb) + d * (d + 2) * b2**4 / (2.0 * wb**2))
    )
    pmu = np.log(np.sqrt(mu**4 / (si2 + mu**2)))
    psi = np.sqrt(np.log1p(si2 / mu**2))
    p = float(stats.lognorm.sf(hz, psi, scale=np.exp(pmu)))
    return NormalityTestResult("henze_zirkler", float(hz), p, p < ALPHA, n, d)


def run_battery(x) -> list[NormalityTestResult]:
    """All three tests on one sample, in a fixed order."""
    return [mardia_skewness(x), mardia_kurtosis(x), henze_zirkler(x)]
