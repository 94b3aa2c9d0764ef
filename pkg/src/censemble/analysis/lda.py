"""Linear discriminant analysis with uniform priors and a ridge-regularized
pooled covariance, plus the replicate-based evaluation helpers."""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from ..errors import ClassTooSmall, SingularCovariance
from ..store import CorpusMatrix
from ._common import seeded_rng, values_of

RIDGE = 1e-6
COLLINEAR = 0.999


@dataclass(frozen=True)
class LDAModel:
    classes: tuple
    columns: np.ndarray  # indices of the features kept
    means: np.ndarray  # (c, d_kept)
    covariance: np.ndarray  # pooled, regularized
    coef: np.ndarray  # (c, d_kept)
    intercept: np.ndarray  # (c,)
    directions: np.ndarray  # (d_kept, min(c-1, d_kept)) discriminant axes
    train_rows: tuple = ()

    def scores(self, x):
        x = values_of(x)[:, self.columns]
        return x @ self.coef.T + self.intercept


def usable_columns(x):
    """Columns left after dropping zero-variance and near-collinear ones.

    A column is dropped when its |correlation| with an earlier kept column
    exceeds 0.999.
    """
    sd = x.std(axis=0)
    cand = np.flatnonzero(np.ptp(x, axis=0) > 0)
    if len(cand) == 0:
        return cand
    z = (x[:, cand] - x[:, cand].mean(axis=0)) / sd[cand]
    corr = (z.T @ z) / x.shape[0]
    kept = []
    for j in range(len(cand)):
        if all(abs(corr[j, i]) <= COLLINEAR for i in kept):
            kept.append(j)
    return cand[kept]


def lda_fit_arrays(x, labels, train_rows=()):
    """Fit on a plain array and a label sequence."""
    x = np.asarray(x, dtype=np.float64)
    labels = [str(v) for v in labels]
    classes = tuple(sorted(set(labels)))
    if len(classes) < 2:
        raise ClassTooSmall("need at least two classes")
    y = np.array([classes.index(v) for v in labels])
    cols = usable_columns(x)
    xs = x[:, cols]
    n, d = xs.shape
    c = len(classes)
    means = np.array([xs[y == k].mean(axis=0) for k in range(c)]).reshape(c, d)
    resid = xs - means[y]
    dof = max(n - c, 1)
    cov = resid.T @ resid / dof
    if d:
        cov = cov + RIDGE * np.trace(cov) / d * np.eye(d)
        try:
            chol = linalg.cho_factor(cov, lower=True)
        except linalg.LinAlgError as exc:
            raise SingularCovariance(str(exc)) from exc
        coef = linalg.cho_solve(chol, means.T).T
    else:
        coef = np.zeros((c, 0))
    intercept = -0.5 * np.einsum("ij,ij->i", coef, means)
    directions = _directions(means, cov, resid.shape[0])
    return LDAModel(classes, cols, means, cov, coef, intercept, directions, tuple(train_rows))


def _directions(means, cov, n):
    d = means.shape[1]
    k = min(means.shape[0] - 1, d)
    if k <= 0:
        return np.zeros((d, 0))
    centered = means - means.mean(axis=0)
    between = centered.T @ centered
    vals, vecs = linalg.eigh(between, cov)
    order = np.argsort(-vals, kind="stable")[:k]
    return vecs[:, order]


def sample_rows(labels, n_per_class, rng, pool=None):
    """``n_per_class`` rows of every class, drawn without replacement.

    Classes are visited in sorted order; each sample is returned sorted.
    """
    pool = np.arange(len(labels)) if pool is None else np.asarray(pool)
    by_class = {}
    for i in pool:
        by_class.setdefault(labels[i], []).append(i)
    picked = {}
    for cls in sorted(by_class):
        rows = np.array(by_class[cls])
        if len(rows) < n_per_class:
            raise ClassTooSmall(f"class {cls!r} has {len(rows)} rows, need {n_per_class}")
        picked[cls] = np.sort(rng.choice(rows, size=n_per_class, replace=False))
    return picked


def _labels(m, label_key):
    return [str(v) for v in m.meta_column(label_key)]


def lda_fit(m, label_key, train_n, seed=0, feature_ids=None):
    """Fit on ``train_n`` randomly drawn rows per class of ``label_key``."""
    labels = _labels(m, label_key)
    if len(set(labels)) < 2:
        raise ClassTooSmall(f"{label_key!r} has fewer than two classes")
    picked = sample_rows(labels, train_n, seeded_rng(seed))
    rows = np.sort(np.concatenate(list(picked.values())))
    x = _select(m, feature_ids)
    return lda_fit_arrays(x[rows], [labels[i] for i in rows], rows.tolist())


def _select(m, feature_ids):
    if feature_ids is None:
        return values_of(m)
    cols = [m.feature_ids.index(f) for f in feature_ids]
    return values_of(m)[:, cols]


def lda_predict(model, rows):
    """Class labels; ties go to the first class in sorted order."""
    s = model.scores(rows)
    return [model.classes[i] for i in np.argmax(s, axis=1)]


@dataclass
class ClassificationResult:
    classes: tuple
    accuracies: np.ndarray
    confusion: np.ndarray  # counts, rows = true class, cols = predicted

    @property
    def mean_accuracy(self):
        return float(self.accuracies.mean())

    def confusion_rates(self):
        tot = self.confusion.sum(axis=1, keepdims=True)
        return self.confusion / np.where(tot == 0, 1, tot)


def _replicate(x, labels, classes, train_n, test_n, seed, stream, prefixes):
    """One train/test split; accuracy (and confusion) for each column prefix."""
    rng = seeded_rng(seed, *stream)
    train = sample_rows(labels, train_n, rng)
    taken = set(np.concatenate(list(train.values())).tolist())
    rest = [i for i in range(len(labels)) if i not in taken]
    if test_n is None:
        test_rows = np.array(rest)
    else:
        test = sample_rows(labels, test_n, rng, rest)
        test_rows = np.sort(np.concatenate(list(test.values())))
    train_rows = np.sort(np.array(sorted(taken)))
    truth = [labels[i] for i in test_rows]
    out = []
    for cols in prefixes:
        model = lda_fit_arrays(x[np.ix_(train_rows, cols)], [labels[i] for i in train_rows])
        pred = lda_predict(model, x[np.ix_(test_rows, cols)])
        acc = float(np.mean([p == t for p, t in zip(pred, truth)]))
        conf = np.zeros((len(classes), len(classes)), dtype=np.int64)
        for t, p in zip(truth, pred):
            conf[classes.index(t), classes.index(p)] += 1
        out.append((acc, conf))
    return out


def _replicate_star(args):
    return _replicate(*args)


def _run(jobs, workers):
    if workers <= 1:
        return [_replicate_star(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_replicate_star, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


def _check_classes(labels, need):
    counts = {}
    for v in labels:
        counts[v] = counts.get(v, 0) + 1
    if len(counts) < 2:
        raise ClassTooSmall("need at least two classes")
    small = {k: v for k, v in counts.items() if v < need}
    if small:
        k = sorted(small)[0]
        raise ClassTooSmall(f"class {k!r} has {small[k]} rows, need {need}")
    return tuple(sorted(counts))


def classify(m, label_key, train_n, test_n=None, replicates=100, seed=0, feature_ids=None, workers=1):
    """Repeated random train/test LDA evaluation.

    Every replicate draws ``train_n`` and ``test_n`` rows per class (all
    remaining rows when ``test_n`` is None) with its own derived seed.
    """
    labels = _labels(m, label_key)
    classes = _check_classes(labels, train_n + (test_n or 1))
    x = _select(m, feature_ids)
    prefixes = [np.arange(x.shape[1])]
    jobs = [(x, labels, classes, train_n, test_n, seed, (0, r), prefixes) for r in range(replicates)]
    res = [r[0] for r in _run(jobs, workers)]
    return ClassificationResult(classes, np.array([a for a, _ in res]), sum(c for _, c in res))


@dataclass
class StepwiseRow:
    train_n: int
    n_features: int
    last_feature: str
    mean_accuracy: float
    sd_accuracy: float
    replicates: int


def stepwise_accuracy(m, label_key, train_sizes, seed=0, test_n=20, replicates=100,
                      order=None, feature_counts=None, workers=1):
    """Accuracy for growing prefixes of a feature ordering.

    ``order`` defaults to :func:`feature_importance`. Within one replicate
    the same split serves every prefix length.
    """
    if order is None:
        from .importance import feature_importance
        order = feature_importance(m, label_key, seed).order
    cols_all = [m.feature_ids.index(f) for f in order]
    counts = feature_counts or range(1, len(cols_all) + 1)
    counts = [c for c in counts if 1 <= c <= len(cols_all)]
    prefixes = [np.array(cols_all[:c]) for c in counts]
    labels = _labels(m, label_key)
    x = values_of(m)
    rows = []
    for ti, train_n in enumerate(train_sizes):
        classes = _check_classes(labels, train_n + test_n)
        jobs = [(x, labels, classes, train_n, test_n, seed, (1, ti, r), prefixes) for r in range(replicates)]
        res = _run(jobs, workers)
        for pi, c in enumerate(counts):
            accs = np.array([r[pi][0] for r in res])
            rows.append(StepwiseRow(train_n, c, order[c - 1], float(accs.mean()),
                                    float(accs.std()), replicates))
    return rows
