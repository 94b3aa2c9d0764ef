"""Principal component analysis by SVD of the centered matrix."""

import warnings
from dataclasses import dataclass

import numpy as np

from ..errors import RankDeficientWarning
from ._common import values_of


@dataclass(frozen=True)
class PCAModel:
    mean: np.ndarray
    components: np.ndarray  # (k, d), orthonormal rows
    explained_variance: np.ndarray
    total_variance: float
    feature_ids: tuple = ()

    @property
    def n_components(self):
        return self.components.shape[0]

    @property
    def explained_ratio(self):
        if self.total_variance == 0:
            return np.zeros_like(self.explained_variance)
        return self.explained_variance / self.total_variance


def pca_fit(m, k=2):
    """Top-``k`` principal directions.

    Each component is signed so that its largest-magnitude loading is
    positive. When the centered data has rank below ``k`` only ``rank``
    components are returned, with a RankDeficientWarning.
    """
    x = values_of(m)
    n, d = x.shape
    if k < 1:
        raise ValueError("k must be at least 1")
    if n < k:
        raise ValueError(f"need at least k={k} rows, got {n}")
    mean = x.mean(axis=0)
    xc = x - mean
    _, s, vt = np.linalg.svd(xc, full_matrices=False)
    tol = (s[0] if len(s) else 0.0) * max(n, d) * np.finfo(float).eps
    rank = int((s > tol).sum())
    if rank < k:
        warnings.warn(f"requested {k} components but the data has rank {rank}", RankDeficientWarning, stacklevel=2)
        k = rank
    comps = vt[:k].copy()
    for i in range(k):
        j = int(np.argmax(np.abs(comps[i])))
        if comps[i, j] < 0:
            comps[i] = -comps[i]
    denom = max(n - 1, 1)
    ev = s[:k] ** 2 / denom
    total = float((xc ** 2).sum() / denom)
    fids = tuple(getattr(m, "feature_ids", ()))
    return PCAModel(mean, comps, ev, total, fids)


def pca_project(model, rows):
    """Coordinates of ``rows`` on the model's components."""
    return (values_of(rows) - model.mean) @ model.components.T


def pca_reconstruct(model, coords):
    return np.asarray(coords, dtype=np.float64) @ model.components + model.mean
