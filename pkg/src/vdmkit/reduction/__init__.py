"""Dimensionality reduction: PCA, Fisher LDA, and MLP autoencoders."""

from .autoencoder import (
    AeArchitecture,
    AeModel,
    TrainConfig,
    ae_encode,
    ae_reconstruct,
    ae_train,
    split_indices,
)
from .container import load_model, save_model
from .lda import LdaModel, lda_fit, lda_transform
from .pca import PcaModel, pca_fit, pca_reconstruct, pca_transform

__all__ = [
    "AeArchitecture",
    "AeModel",
    "TrainConfig",
    "ae_encode",
    "ae_reconstruct",
    "ae_train",
    "split_indices",
    "load_model",
    "save_model",
    "LdaModel",
    "lda_fit",
    "lda_transform",
    "PcaModel",
    "pca_fit",
    "pca_reconstruct",
    "pca_transform",
]
