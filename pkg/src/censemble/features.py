"""Statistical image features: colorfulness, color frequencies, contrast,
composition-line angle entropy and box-counting fractal dimension."""

from dataclasses import dataclass

import numpy as np

from .codecs.quantize import quantize
from .colorspace import gray_int, rgb_to_lab
from .errors import DegenerateScales
from .imageio import NormalizedImage
from .transforms import lines


@dataclass(frozen=True)
class StatConfig:
    quantize_n: int = 200
    hough: tuple = (40, 40, 20)
    fractal_windows: tuple = ((1 / 10, 1 / 40, "bilevel"), (1 / 3, 1 / 4, "bilevel"), (1 / 5, 1 / 6, "canny"))
    angle_bins: int = 18

    def __post_init__(self):
        if self.quantize_n < 1 or self.angle_bins < 1 or min(self.hough) < 1:
            raise ValueError("stat counts must be positive")
        if len(self.fractal_windows) != 3:
            raise ValueError("exactly three fractal window configurations are required")


STAT_IDS = (
    "fractaldim1", "fractaldim2", "fractaldim3", "stats_angleentropy",
    "stats_colfreq_entropy", "stats_colfreq_max", "stats_colfreq_mean",
    "stats_colfreq_median", "stats_colfreq_sd", "stats_colorfulness_lab",
    "stats_colorfulness_rgb", "stats_contrastrange", "stats_contrastsd",
)


def _px(img):
    return img.pixels if isinstance(img, NormalizedImage) else np.asarray(img, dtype=np.uint8)


def colorfulness_rgb(img):
    """Opponent-channel colorfulness: sigma_rgyb + 0.3 * mu_rgyb."""
    p = _px(img).reshape(-1, 3).astype(np.float64)
    rg = p[:, 0] - p[:, 1]
    yb = 0.5 * (p[:, 0] + p[:, 1]) - p[:, 2]
    sigma = np.sqrt(rg.var() + yb.var())
    mu = np.sqrt(rg.mean() ** 2 + yb.mean() ** 2)
    return float(sigma + 0.3 * mu)


def colorfulness_lab(img):
    """CIELab chroma colorfulness: sigma_C + 0.94 * mu_C."""
    lab = rgb_to_lab(_px(img)).reshape(-1, 3)
    chroma = np.hypot(lab[:, 1], lab[:, 2])
    return float(chroma.std() + 0.94 * chroma.mean())


def _quantized(pixels, n):
    palette, index = quantize(pixels, n)
    return palette, np.asarray(index).ravel()


def color_frequency_stats(img, n=200):
    palette, index = _quantized(_px(img), n)
    counts = np.bincount(index.astype(np.int64), minlength=len(palette))
    counts = counts[counts > 0]
    p = counts / counts.sum()
    return {
        "entropy": float(-(p * np.log2(p)).sum()) + 0.0,
        "max": float(p.max()),
        "mean": float(p.mean()),
        "median": float(np.median(p)),
        "sd": float(p.std()),
    }


def contrast_stats(img, n=200):
    palette, index = _quantized(_px(img), n)
    counts = np.bincount(index.astype(np.int64), minlength=len(palette))
    used = counts > 0
    light = rgb_to_lab(palette[used])[:, 0]
    p = counts[used] / counts.sum()
    mu = (p * light).sum()
    sd = np.sqrt((p * (light - mu) ** 2).sum())
    return {"range": float(light.max() - light.min()), "sd": float(sd)}


def hough_angle_entropy(img, width=40, height=40, threshold=20, bins=18):
    """Shannon entropy (bits) of binned Hough line angles, one count per line."""
    edges = lines.canny(gray_int(_px(img)) / 255.0)
    found = lines.hough_lines(edges, width, height, threshold)
    if not found:
        return 0.0
    deg = np.array([np.rad2deg(t) for _, t, _ in found]) % 180.0
    idx = np.minimum((deg * bins / 180.0).astype(np.int64), bins - 1)
    counts = np.bincount(idx, minlength=bins)
    p = counts[counts > 0] / counts.sum()
    return float(-(p * np.log2(p)).sum()) + 0.0


def foreground(img, source="bilevel"):
    """Foreground mask: dark pixels of the bilevel image, or Canny edges."""
    gray = gray_int(_px(img))
    if source == "bilevel":
        return gray < 128
    if source == "canny":
        return lines.canny(gray / 255.0)
    raise ValueError(f"unknown fractal source {source!r}")


def box_sizes(window_px):
    """Box side ladder 1, 2, 4, ... up to a quarter of the window."""
    sizes = []
    e = 1
    while e <= window_px / 4:
        sizes.append(e)
        e *= 2
    return sizes


def _window_counts(sat, ys, xs, win, e):
    """Occupied e-boxes per window (``e`` divides ``win``)."""
    starts = np.arange(0, win, e)
    ends = starts + e
    y0 = (ys[:, None] + starts)[:, :, None, None]
    y1 = (ys[:, None] + ends)[:, :, None, None]
    x0 = (xs[:, None] + starts)[None, None]
    x1 = (xs[:, None] + ends)[None, None]
    s = sat[y1, x1] - sat[y0, x1] - sat[y1, x0] + sat[y0, x0]
    return (s > 0).sum(axis=(1, 3))


def _positions(length, win, step):
    """Window offsets every ``step`` from the near edge and from the far edge.

    The set is mirror symmetric, so a flipped or rotated mask gets the same
    windows.
    """
    span = length - win
    fwd = np.arange(0, span + 1, step)
    return np.union1d(fwd, span - fwd)


def box_dimension(mask, window_px, step_px):
    """Mean box-counting slope over sliding square windows of a mask."""
    h, w = mask.shape
    win = min(int(window_px), h, w)
    sizes = box_sizes(win)
    if len(sizes) < 2:
        raise DegenerateScales(f"window of {win}px gives fewer than two box sizes")
    # trim so every box size tiles the window exactly
    win -= win % sizes[-1]
    step = max(1, int(step_px))
    sat = np.zeros((h + 1, w + 1), dtype=np.int64)
    sat[1:, 1:] = mask.astype(np.int64).cumsum(0).cumsum(1)
    ys = _positions(h, win, step)
    xs = _positions(w, win, step)
    logs = np.log(np.array([_window_counts(sat, ys, xs, win, e) for e in sizes], dtype=np.float64)
                  .clip(min=1))
    occupied = _window_counts(sat, ys, xs, win, win) > 0
    if not occupied.any():
        return 0.0
    x = -np.log(np.array(sizes, dtype=np.float64))
    xc = x - x.mean()
    y = logs[:, occupied]
    slopes = (xc[:, None] * (y - y.mean(axis=0))).sum(axis=0) / (xc * xc).sum()
    return float(np.clip(slopes.mean(), 0.0, 2.0))


def fractal_dimension(img, window, step, source="bilevel"):
    """Box-counting dimension with window and step given as fractions of m.

    m is the mean of width and height.
    """
    if not (0 < window <= 1 and 0 < step <= 1):
        raise ValueError("window and step must be in (0, 1]")
    mask = foreground(img, source)
    h, w = mask.shape
    m = (h + w) / 2.0
    return box_dimension(mask, np.floor(window * m + 0.5), np.floor(step * m + 0.5))


def compute_stats(img, config=None, ids=None):
    """Statistical features keyed by id in declaration order.

    ``ids`` restricts the computation to a subset of STAT_IDS.
    """
    cfg = config or StatConfig()
    want = STAT_IDS if ids is None else tuple(i for i in STAT_IDS if i in set(ids))
    out = {}
    for i, (win, step, src) in enumerate(cfg.fractal_windows, start=1):
        if f"fractaldim{i}" in want:
            out[f"fractaldim{i}"] = fractal_dimension(img, win, step, src)
    if "stats_angleentropy" in want:
        out["stats_angleentropy"] = hough_angle_entropy(img, *cfg.hough, bins=cfg.angle_bins)
    if any(i.startswith("stats_colfreq_") for i in want):
        freq = color_frequency_stats(img, cfg.quantize_n)
        for key in ("entropy", "max", "mean", "median", "sd"):
            out[f"stats_colfreq_{key}"] = freq[key]
    if "stats_colorfulness_lab" in want:
        out["stats_colorfulness_lab"] = colorfulness_lab(img)
    if "stats_colorfulness_rgb" in want:
        out["stats_colorfulness_rgb"] = colorfulness_rgb(img)
    if "stats_contrastrange" in want or "stats_contrastsd" in want:
        con = contrast_stats(img, cfg.quantize_n)
        out["stats_contrastrange"] = con["range"]
        out["stats_contrastsd"] = con["sd"]
    return {k: out[k] for k in want}
