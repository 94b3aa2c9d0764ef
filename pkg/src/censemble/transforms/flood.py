"""Flood fills with the least frequent RGB-cube corner color."""

import numpy as np
from scipy import ndimage

# tie order for equally rare corners
CORNER_COLORS = np.array([
    [0, 0, 0], [255, 255, 255], [255, 0, 0], [0, 255, 0],
    [0, 0, 255], [0, 255, 255], [255, 0, 255], [255, 255, 0],
], dtype=np.uint8)
CORNER_NAMES = ("black", "white", "red", "green", "blue", "cyan", "magenta", "yellow")
PATTERNS = ("centre", "hole", "corners", "thirds")
_FOUR = ndimage.generate_binary_structure(2, 1)


def color_distance(pixels, color):
    """RMS channel difference on the [0, 1] scale."""
    return np.sqrt(_sq_dist(pixels, color) / 3.0) / 255.0


def _sq_dist(pixels, color):
    d = pixels.astype(np.int32) - np.asarray(color, dtype=np.int32)
    return np.einsum("...c,...c->...", d, d)


def _within(pixels, color, fuzz):
    # same test as color_distance(...) <= fuzz, kept in integers
    return _sq_dist(pixels, color) <= 3.0 * (fuzz * 255.0) ** 2


def fill_color(pixels, fuzz):
    counts = [int(_within(pixels, c, fuzz).sum()) for c in CORNER_COLORS]
    return CORNER_COLORS[int(np.argmin(counts))]


def seed_points(pattern, h, w):
    if pattern == "centre":
        return [(h // 2, w // 2)]
    if pattern == "corners":
        return [(0, 0), (0, w - 1), (h - 1, 0), (h - 1, w - 1)]
    if pattern == "thirds":
        ys = (h // 3, (2 * h) // 3)
        xs = (w // 3, (2 * w) // 3)
        return [(y, x) for y in ys for x in xs]
    raise ValueError(f"unknown flood pattern {pattern!r}")


def flood_region(pixels, seed, fuzz):
    """4-connected region around ``seed`` within ``fuzz`` of the seed color."""
    y, x = seed
    mask = _within(pixels, pixels[y, x], fuzz)
    labels, _ = ndimage.label(mask, structure=_FOUR)
    return labels == labels[y, x]


def disc_mask(h, w):
    r = min(w, h) / 6.0
    yy, xx = np.mgrid[0:h, 0:w]
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    return (yy - cy) ** 2 + (xx - cx) ** 2 <= r * r


def flood_fill(pixels, pattern, fuzz=0.1):
    if not 0 <= fuzz < 1:
        raise ValueError("fuzz must be in [0, 1)")
    if pattern not in PATTERNS:
        raise ValueError(f"unknown flood pattern {pattern!r}")
    h, w = pixels.shape[:2]
    color = fill_color(pixels, fuzz)
    if pattern == "hole":
        region = disc_mask(h, w)
    else:
        region = np.zeros((h, w), dtype=bool)
        for seed in seed_points(pattern, h, w):
            if not region[seed]:
                region |= flood_region(pixels, seed, fuzz)
    out = np.array(pixels, copy=True)
    out[region] = color
    return out
