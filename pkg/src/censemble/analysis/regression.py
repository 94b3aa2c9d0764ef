"""Linear regression of numeric targets on ensemble vectors."""

import warnings
from dataclasses import dataclass

import numpy as np

from ..errors import UnderdeterminedWarning
from ._common import seeded_rng, values_of
from .pca import pca_fit, pca_project

RIDGE = 1e-8


@dataclass(frozen=True)
class LinRegModel:
    coef: np.ndarray
    intercept: float
    reduction: object = None  # PCAModel applied before the fit, if any

    def predict(self, x):
        x = values_of(x)
        if self.reduction is not None:
            x = pca_project(self.reduction, x)
        return x @ self.coef + self.intercept


def linreg_fit(x, y, ridge=RIDGE):
    """Least squares with an intercept and a small absolute ridge on the centred Gram matrix."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    mx, my = x.mean(axis=0), y.mean()
    xc = x - mx
    gram = xc.T @ xc
    d = gram.shape[0]
    if d:
        gram = gram + ridge * np.eye(d)
        coef = np.linalg.solve(gram, xc.T @ (y - my))
    else:
        coef = np.zeros(0)
    return LinRegModel(coef, float(my - mx @ coef))


@dataclass
class RegressionReport:
    n: int
    n_features: int
    r2: float
    adjusted_r2: float
    median_abs_error: float
    folds: int
    reduced_to: int = None


def linreg_fit_eval(m, y, folds=10, seed=0, feature_ids=None):
    """In-sample adjusted R² and k-fold out-of-sample median absolute error.

    When there are no more rows than features the matrix is first reduced
    by PCA to ``(n - 1) // 2`` components and an UnderdeterminedWarning is
    issued.
    """
    x = values_of(m)
    if feature_ids is not None:
        x = x[:, [m.feature_ids.index(f) for f in feature_ids]]
    y = np.asarray(y, dtype=np.float64)
    n, d = x.shape
    if len(y) != n:
        raise ValueError(f"{len(y)} targets for {n} rows")
    if n < 3:
        raise ValueError("need at least three rows")
    reduction = None
    if n <= d:
        k = max(1, (n - 1) // 2)
        warnings.warn(f"{n} rows for {d} features; reducing to {k} principal components",
                      UnderdeterminedWarning, stacklevel=2)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            reduction = pca_fit(x, k)
        x = pca_project(reduction, x)
        d = x.shape[1]
    model = linreg_fit(x, y)
    resid = y - model.predict(x)
    ss_res = float(resid @ resid)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
    adj = 1.0 - (1.0 - r2) * (n - 1) / (n - d - 1) if n - d - 1 > 0 else float("nan")

    folds = max(2, min(folds, n))
    perm = seeded_rng(seed, 3).permutation(n)
    errs = np.empty(n)
    for test in np.array_split(perm, folds):
        train = np.setdiff1d(perm, test)
        fm = linreg_fit(x[train], y[train])
        errs[test] = np.abs(y[test] - fm.predict(x[test]))
    return RegressionReport(n, d, r2, adj, float(np.median(errs)), folds,
                            None if reduction is None else reduction.n_components)
