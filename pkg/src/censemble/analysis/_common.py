"""Small helpers shared by the analysis modules."""

import numpy as np

from ..store import CorpusMatrix


def values_of(m):
    """Float matrix behind a CorpusMatrix or any 2-D array-like."""
    if isinstance(m, CorpusMatrix):
        return m.values
    arr = np.asarray(m, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[None, :]
    return arr


def ids_of(m):
    if isinstance(m, CorpusMatrix):
        return m.ids
    return [str(i) for i in range(values_of(m).shape[0])]


def rank_keys(ids):
    """Integer rank of every id in sorted string order (ties broken by id)."""
    order = sorted(range(len(ids)), key=lambda i: ids[i])
    rank = np.empty(len(ids), dtype=np.int64)
    rank[order] = np.arange(len(ids))
    return rank


def top_k(scores, k, tie_rank, allowed=None):
    """Indices of the ``k`` largest scores, ties by ascending ``tie_rank``.

    ``allowed`` is an optional boolean mask of eligible positions.
    """
    idx = np.arange(len(scores)) if allowed is None else np.flatnonzero(allowed)
    if len(idx) == 0 or k <= 0:
        return idx[:0]
    s = scores[idx]
    if len(idx) > k:
        # coarse cut, then widen to keep every entry tied with the k-th score
        kth = np.partition(-s, k - 1)[k - 1]
        keep = -s <= kth
        idx, s = idx[keep], s[keep]
    order = np.lexsort((tie_rank[idx], -s))
    return idx[order[:k]]


def row_normalize(x):
    """Rows scaled to unit length; all-zero rows stay zero."""
    norms = np.sqrt(np.einsum("ij,ij->i", x, x))
    safe = np.where(norms > 0, norms, 1.0)
    return x / safe[:, None], norms


def seeded_rng(seed, *stream):
    """Generator for one (seed, stream...) combination, independent of call order."""
    return np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF] + [int(s) for s in stream])
