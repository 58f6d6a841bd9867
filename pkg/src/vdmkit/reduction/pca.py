"""PCA via singular value decomposition of the centered data matrix."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DataError, DimensionMismatchError
from ..features import FeatureMatrix, as_features

__all__ = ["PcaModel", "pca_fit", "pca_transform", "pca_reconstruct"]


@dataclass(frozen=True)
class PcaModel:
    """Fitted PCA: mean (d,), components (k, d) orthonormal rows,
    explained_variance_ratio (k,) nonincreasing."""

    mean: np.ndarray
    components: np.ndarray
    explained_variance_ratio: np.ndarray

    @property
    def k(self) -> int:
        return self.components.shape[0]

    @property
    def dim(self) -> int:
        return self.components.shape[1]


def _fix_signs(components: np.ndarray) -> np.ndarray:
    """Deterministic sign convention: the largest-magnitude entry of each
    component is positive."""
    out = components.copy()
    for row in out:
        pivot = np.argmax(np.abs(row))
        if row[pivot] < 0:
            row *= -1.0
    return out


def pca_fit(x, k: int) -> PcaModel:
    """Fit a k-component PCA (SVD of the centered matrix).

    Requires k <= min(n - 1, d). Input is expected to be standardized
    upstream when columns have incommensurate scales.
    """
    m = as_features(x)
    if not 1 <= k <= min(m.n - 1, m.d):
        raise DataError(
            f"k must be in [1, min(n-1, d)] = [1, {min(m.n - 1, m.d)}], got {k}"
        )
    mean = m.data.mean(axis=0)
    centered = m.data - mean
    _, svals, vt = np.linalg.svd(centered, full_matrices=False)
    components = _fix_signs(vt[:k])
    var = svals**2
    total = float(var.sum())
    ratios = var[:k] / total if total > 0 else np.zeros(k)
    return PcaModel(mean=mean, components=components,
                    explained_variance_ratio=ratios)


def pca_transform(model: PcaModel, x) -> FeatureMatrix:
    """Project rows onto the fitted components: (x - mean) @ components^T."""
    m = as_features(x)
    if m.d != model.dim:
        raise DimensionMismatchError(
            f"model expects d={model.dim}, got d={m.d}"
        )
    return FeatureMatrix((m.data - model.mean) @ model.components.T, copy=False)


def pca_reconstruct(model: PcaModel, z) -> FeatureMatrix:
    """Map projected rows back to the original space."""
    z = as_features(z)
    if z.d != model.k:
        raise DimensionMismatchError(f"model produces k={model.k}, got d={z.d}")
    return FeatureMatrix(z.data @ model.components + model.mean, copy=False)
