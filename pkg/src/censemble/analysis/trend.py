"""Rolling quantile trend lines over a time axis."""

from dataclasses import dataclass

import numpy as np

from ..store import CorpusMatrix

QUANTILES = (0.025, 0.25, 0.5, 0.75, 0.975)


@dataclass
class TrendRow:
    time: float
    n: int
    half_window: float
    stretched: bool
    quantiles: tuple  # None entries when the window is empty


def _series(m, value, time_key):
    if isinstance(m, CorpusMatrix):
        times = m.meta_column(time_key)
        vals = m.column(value) if isinstance(value, str) else np.asarray(value, dtype=np.float64)
    else:
        times, vals = m, np.asarray(value, dtype=np.float64)
    keep = [i for i, t in enumerate(times) if t not in (None, "")]
    return np.array([float(times[i]) for i in keep]), np.asarray(vals, dtype=np.float64)[keep]


def rolling_trend(m, value, time_key="year", half_window=10, max_window=50, min_n=1000,
                  quantiles=QUANTILES, times=None, step=1):
    """Quantiles of ``value`` in a symmetric window around each time point.

    The window starts at +-``half_window`` and widens by ``step`` until it
    holds ``min_n`` items or reaches +-``max_window``. ``m`` is a
    CorpusMatrix (``value`` a feature id or a vector aligned with its rows)
    or a sequence of times (``value`` a vector). Time points default to the
    distinct times present.
    """
    t, v = _series(m, value, time_key)
    order = np.argsort(t, kind="stable")
    t, v = t[order], v[order]
    grid = np.unique(t) if times is None else np.asarray(times, dtype=np.float64)
    rows = []
    for t0 in grid:
        w = half_window
        while True:
            lo = np.searchsorted(t, t0 - w, side="left")
            hi = np.searchsorted(t, t0 + w, side="right")
            if hi - lo >= min_n or w >= max_window:
                break
            w = min(w + step, max_window)
        sel = v[lo:hi]
        qs = tuple(float(q) for q in np.quantile(sel, quantiles)) if len(sel) else (None,) * len(quantiles)
        rows.append(TrendRow(float(t0), int(hi - lo), float(w), w > half_window, qs))
    return rows
