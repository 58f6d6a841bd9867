"""Fisher linear discriminant analysis for class-supervised projection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from ..errors import DataError, DimensionMismatchError, SingularCovarianceError
from ..features import FeatureMatrix, as_features
from .pca import _fix_signs

__all__ = ["LdaModel", "lda_fit", "lda_transform"]


@dataclass(frozen=True)
class LdaModel:
    """Fitted LDA: global mean, scalings (k, d) projection rows, class labels."""

    mean: np.ndarray
    scalings: np.ndarray
    classes: tuple

    @property
    def k(self) -> int:
        return self.scalings.shape[0]

    @property
    def dim(self) -> int:
        return self.scalings.shape[1]


def lda_fit(x, labels, k: int, ridge: float | None = None) -> LdaModel:
    """Fit the standard Fisher discriminant: maximize between-class over
    within-class scatter; k must be <= classes - 1.

    When the within-class scatter is singular a ridge is applied; pass
    ``ridge=0`` to forbid the fallback and fail instead.
    """
    m = as_features(x)
    labels = np.asarray(labels)
    if labels.ndim != 1 or labels.shape[0] != m.n:
        raise DimensionMismatchError("labels must be one per row")
    classes = tuple(np.unique(labels).tolist())
    if len(classes) < 2:
        raise DataError("LDA needs at least 2 classes")
    if not 1 <= k <= len(classes) - 1:
        raise DataError(f"k must be in [1, classes-1] = [1, {len(classes) - 1}], got {k}")
    if k > m.d:
        raise DataError(f"k={k} exceeds feature dimension {m.d}")

    mean = m.data.mean(axis=0)
    d = m.d
    sw = np.zeros((d, d))
    sb = np.zeros((d, d))
    for cls in classes:
        rows = m.data[labels == cls]
        mu = rows.mean(axis=0)
        centered = rows - mu
        sw += centered.T @ centered
        offset = (mu - mean)[:, None]
        sb += rows.shape[0] * (offset @ offset.T)
    sw /= m.n
    sb /= m.n

    eigvals_sw = np.linalg.eigvalsh(sw)
    needs_ridge = eigvals_sw[0] <= 1e-12 * max(eigvals_sw[-1], 1.0)
    if needs_ridge:
        if ridge == 0:
            raise SingularCovarianceError(
                "within-class scatter is singular and ridge fallback disabled"
            )
        eps = ridge if ridge is not None else 1e-8 * max(float(np.trace(sw)) / d, 1.0)
        sw = sw + eps * np.eye(d)
    # generalized symmetric eigenproblem Sb v = lam Sw v
    eigvals, eigvecs = linalg.eigh(sb, sw)
    order = np.argsort(eigvals)[::-1][:k]
    scalings = eigvecs[:, order].T
    norms = np.linalg.norm(scalings, axis=1, keepdims=True)
    scalings = _fix_signs(scalings / norms)
    return LdaModel(mean=mean, scalings=scalings, classes=classes)


def lda_transform(model: LdaModel, x) -> FeatureMatrix:
    """Project rows onto the discriminant directions."""
    m = as_features(x)
    if m.d != model.dim:
        raise DimensionMismatchError(f"model expects d={model.dim}, got d={m.d}")
    return FeatureMatrix((m.data - model.mean) @ model.scalings.T, copy=False)
