"""Feature ordering by averaged univariate logistic-regression t-statistics."""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from ..errors import ClassTooSmall
from ._common import seeded_rng, values_of

BASELINE = "b_gif_1"
NEWTON_ITERS = 25
RIDGE = 1e-6


def logistic_t(x, y, iters=NEWTON_ITERS, ridge=RIDGE):
    """Slope t-statistic of ``y ~ 1 + x`` for every column of ``x`` at once.

    Columns are standardized first, so constant columns get t = 0. Newton
    runs a fixed number of iterations with ``ridge`` on the diagonal of the
    information matrix. Columns still moving after the last iteration
    (separated classes, no finite maximum) use the score statistic at
    b1 = 0 instead, since their Wald t shrinks towards zero as the
    iterations continue.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    sd = x.std(axis=0)
    z = np.where(sd > 0, (x - x.mean(axis=0)) / np.where(sd > 0, sd, 1.0), 0.0)
    d = z.shape[1]
    b0 = np.zeros(d)
    b1 = np.zeros(d)
    step = np.zeros(d)
    for _ in range(iters):
        eta = b0 + z * b1
        p = 0.5 * (1.0 + np.tanh(0.5 * eta))
        w = p * (1.0 - p)
        r = y[:, None] - p
        g0, g1 = r.sum(axis=0), (r * z).sum(axis=0)
        h00 = w.sum(axis=0) + ridge
        h01 = (w * z).sum(axis=0)
        h11 = (w * z * z).sum(axis=0) + ridge
        det = h00 * h11 - h01 * h01
        b0 = b0 + (h11 * g0 - h01 * g1) / det
        step = (h00 * g1 - h01 * g0) / det
        b1 = b1 + step
    eta = b0 + z * b1
    p = 0.5 * (1.0 + np.tanh(0.5 * eta))
    w = p * (1.0 - p)
    h00 = w.sum(axis=0) + ridge
    h01 = (w * z).sum(axis=0)
    h11 = (w * z * z).sum(axis=0) + ridge
    var_b1 = h00 / (h00 * h11 - h01 * h01)
    with np.errstate(invalid="ignore", divide="ignore"):
        t = b1 / np.sqrt(var_b1)
    ybar = y.mean()
    score = ((y - ybar)[:, None] * z).sum(axis=0) / np.sqrt(ybar * (1.0 - ybar) * (z * z).sum(axis=0) + ridge)
    moving = ~np.isfinite(t) | (np.abs(step) > 1e-6 * (1.0 + np.abs(b1)))
    t = np.where(moving, score, t)
    return np.where(sd > 0, t, 0.0)


@dataclass
class Importance:
    order: list
    mean_abs_t: dict
    pairs: int


def feature_importance(m, label_key, seed=0, max_per_class=None, baseline=BASELINE):
    """Rank features by mean |t| over all unordered class pairs.

    ``baseline`` (the untransformed GIF ratio) always comes first when it is
    part of the schema; the rest sort by descending mean |t| and then by id.
    ``max_per_class`` caps the rows used per class (sampled with ``seed``).
    """
    x = values_of(m)
    labels = [str(v) for v in m.meta_column(label_key)]
    classes = sorted(set(labels))
    if len(classes) < 2:
        raise ClassTooSmall(f"{label_key!r} has fewer than two classes")
    rng = seeded_rng(seed, 2)
    rows = {}
    for cls in classes:
        idx = np.array([i for i, v in enumerate(labels) if v == cls])
        if max_per_class is not None and len(idx) > max_per_class:
            idx = np.sort(rng.choice(idx, size=max_per_class, replace=False))
        rows[cls] = idx
    total = np.zeros(x.shape[1])
    n_pairs = 0
    for a, b in combinations(classes, 2):
        idx = np.concatenate([rows[a], rows[b]])
        y = np.concatenate([np.zeros(len(rows[a])), np.ones(len(rows[b]))])
        total += np.abs(logistic_t(x[idx], y))
        n_pairs += 1
    mean_t = total / n_pairs
    fids = list(m.feature_ids)
    stats = dict(zip(fids, (float(v) for v in mean_t)))
    rest = sorted((f for f in fids if f != baseline), key=lambda f: (-stats[f], f))
    order = ([baseline] if baseline in stats else []) + rest
    return Importance(order, stats, n_pairs)
