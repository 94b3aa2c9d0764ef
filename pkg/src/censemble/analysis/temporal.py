"""Temporal resemblance and the local-linear smoother used to residualize it."""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ..errors import InsufficientNeighborsWarning, MissingYear, SpanTooSmall
from ._common import ids_of, rank_keys, row_normalize, top_k, values_of

SPAN = 0.3
ROBUST_ITERS = 2
MIN_POINTS = 20


def _tricube(u):
    u = np.clip(np.abs(u), 0.0, 1.0)
    return (1.0 - u ** 3) ** 3


def _local_linear(x, y, w, x0, q):
    """Weighted line through the ``q`` nearest points, evaluated at ``x0``."""
    dist = np.abs(x - x0)
    h = np.partition(dist, q - 1)[q - 1]
    if h > 0:
        k = _tricube(dist / h) * w
    else:
        k = (dist == 0) * w
    sw = k.sum()
    if sw <= 0:
        return float("nan")
    xm = (k * x).sum() / sw
    ym = (k * y).sum() / sw
    sxx = (k * (x - xm) ** 2).sum()
    slope = (k * (x - xm) * (y - ym)).sum() / sxx if sxx > 1e-12 * max(sw, 1.0) else 0.0
    return ym + slope * (x0 - xm)


def loess(x, y, x_eval=None, span=SPAN, iterations=ROBUST_ITERS):
    """Robust local linear regression (tricube kernel, bisquare reweighting).

    The fit only depends on x, so each distinct x is solved once.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = len(x)
    if n < MIN_POINTS:
        raise SpanTooSmall(f"need at least {MIN_POINTS} points, got {n}")
    q = max(2, min(n, int(math.ceil(span * n))))
    ux, inv = np.unique(x, return_inverse=True)
    rw = np.ones(n)
    for it in range(iterations + 1):
        fit_u = np.array([_local_linear(x, y, rw, x0, q) for x0 in ux])
        if it == iterations:
            break
        resid = y - fit_u[inv]
        s = np.median(np.abs(resid))
        if s <= 0:
            break
        rw = (1.0 - np.clip(resid / (6.0 * s), -1.0, 1.0) ** 2) ** 2
    if x_eval is None:
        return fit_u[inv]
    x_eval = np.asarray(x_eval, dtype=np.float64)
    ue, inv_e = np.unique(x_eval, return_inverse=True)
    return np.array([_local_linear(x, y, rw, x0, q) for x0 in ue])[inv_e]


def smooth_residuals(x, y, span=SPAN, iterations=ROBUST_ITERS, fit_mask=None):
    """``y`` minus the smoother of ``y`` on ``x``.

    With ``fit_mask`` the smoother is fitted on the masked points only but
    residuals are returned for every point.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    mask = np.ones(len(x), dtype=bool) if fit_mask is None else np.asarray(fit_mask, dtype=bool)
    fit = loess(x[mask], y[mask], x, span, iterations)
    return y - fit


@dataclass
class TemporalProfile:
    ids: list
    years: np.ndarray
    raw: np.ndarray  # median signed neighbour-year offset
    adjusted: np.ndarray  # residual of the smoother of raw on year
    n_neighbors: np.ndarray
    k: int

    @property
    def short(self):
        return self.n_neighbors < self.k


def neighbor_offsets(m, k=100, year_key="year", artist_key="artist", block=512):
    """Raw temporal resemblance: median of (neighbour year - own year).

    Neighbours are the ``k`` most cosine-similar rows by other artists (the
    row itself is always excluded). Returns ``(raw, n_used, years)``.
    """
    years = m.meta_column(year_key)
    if any(v is None or v == "" for v in years):
        missing = [m.meta[i]["id"] for i, v in enumerate(years) if v is None or v == ""]
        raise MissingYear(f"{len(missing)} rows lack {year_key!r}, e.g. {missing[0]!r}")
    years = np.array([float(v) for v in years])
    artists = np.array([str(v) if v not in (None, "") else "" for v in m.meta_column(artist_key)], dtype=object)
    codes = {a: i for i, a in enumerate(sorted(set(artists)))}
    acode = np.array([codes[a] for a in artists])
    unit, _ = row_normalize(values_of(m))
    tie = rank_keys(ids_of(m))
    n = len(years)
    raw = np.full(n, np.nan)
    used = np.zeros(n, dtype=np.int64)
    for b0 in range(0, n, block):
        sims = unit[b0:b0 + block] @ unit.T
        for j in range(sims.shape[0]):
            i = b0 + j
            allowed = np.ones(n, dtype=bool) if artists[i] == "" else acode != acode[i]
            allowed[i] = False
            nb = top_k(sims[j], k, tie, allowed)
            used[i] = len(nb)
            if len(nb):
                raw[i] = float(np.median(years[nb] - years[i]))
    short = int((used < k).sum())
    if short:
        warnings.warn(f"{short} rows had fewer than {k} eligible neighbours; all available were used",
                      InsufficientNeighborsWarning, stacklevel=2)
    return raw, used, years


def temporal_resemblance(m, k=100, year_key="year", artist_key="artist", fit_range=None,
                         span=SPAN, iterations=ROBUST_ITERS):
    """Raw and smoother-adjusted temporal resemblance for every row.

    ``fit_range`` = (first, last) year limits the rows the smoother is
    fitted on; residuals are computed for all rows.
    """
    raw, used, years = neighbor_offsets(m, k, year_key, artist_key)
    ok = np.isfinite(raw)
    mask = ok.copy()
    if fit_range is not None:
        lo, hi = fit_range
        mask &= (years >= lo) & (years <= hi)
    adjusted = np.full(len(raw), np.nan)
    fit = loess(years[mask], raw[mask], years[ok], span, iterations)
    adjusted[ok] = raw[ok] - fit
    return TemporalProfile(ids_of(m), years, raw, adjusted, used, k)
