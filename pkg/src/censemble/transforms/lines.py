"""Edge and line detectors: Canny, Hough lines, edge kernels, Sobel."""

import numpy as np
from scipy import ndimage

from ..colorspace import from_unit, gray3, gray_int, to_unit

CANNY_SIGMA = 1.4
CANNY_LO = 0.1
CANNY_HI = 0.3
N_THETA = 180


def canny(gray, sigma=CANNY_SIGMA, lo=CANNY_LO, hi=CANNY_HI):
    """Boolean edge map of a 2-D float image.

    Thresholds are fractions of the maximum gradient magnitude. Non-maximum
    suppression keeps a pixel when it is >= its predecessor and > its
    successor along the gradient, so a symmetric ridge yields a 1-px line.
    """
    if not 0 < lo < hi <= 1:
        raise ValueError("need 0 < lo < hi <= 1")
    g = ndimage.gaussian_filter(np.asarray(gray, dtype=np.float64), sigma, mode="nearest")
    gx = ndimage.sobel(g, axis=1, mode="nearest")
    gy = ndimage.sobel(g, axis=0, mode="nearest")
    mag = np.hypot(gx, gy)
    peak = mag.max()
    if peak <= 1e-12:
        return np.zeros(g.shape, dtype=bool)
    mag[mag < 1e-12 * peak] = 0.0

    ang = np.rad2deg(np.arctan2(gy, gx)) % 180.0
    sector = (np.floor((ang + 22.5) / 45.0).astype(np.int64)) % 4
    p = np.pad(mag, 1)
    h, w = mag.shape
    # neighbour offsets along the gradient for sectors 0, 45, 90, 135 deg
    offsets = [((0, -1), (0, 1)), ((-1, -1), (1, 1)), ((-1, 0), (1, 0)), ((-1, 1), (1, -1))]
    keep = np.zeros_like(mag, dtype=bool)
    for s, ((dy1, dx1), (dy2, dx2)) in enumerate(offsets):
        n1 = p[1 + dy1:1 + dy1 + h, 1 + dx1:1 + dx1 + w]
        n2 = p[1 + dy2:1 + dy2 + h, 1 + dx2:1 + dx2 + w]
        keep |= (sector == s) & (mag >= n1) & (mag > n2) & (mag > 0)

    weak = keep & (mag >= lo * peak)
    strong = keep & (mag >= hi * peak)
    labels, n = ndimage.label(weak, structure=np.ones((3, 3), dtype=bool))
    if n == 0:
        return weak
    good = np.zeros(n + 1, dtype=bool)
    good[np.unique(labels[strong])] = True
    good[0] = False
    return good[labels]


def canny_edges(pixels, sigma=CANNY_SIGMA, lo=CANNY_LO, hi=CANNY_HI):
    """White-on-black Canny raster of an RGB image."""
    edges = canny(gray_int(pixels) / 255.0, sigma, lo, hi)
    return gray3(np.where(edges, 255, 0).astype(np.uint8))


def _trig(n_theta):
    """cos/sin tables; the second half is an exact quarter-turn of the first."""
    thetas = np.arange(n_theta) * (np.pi / n_theta)
    cos, sin = np.cos(thetas), np.sin(thetas)
    if n_theta % 2 == 0:
        q = n_theta // 2
        cos[q:], sin[q:] = -sin[:q], cos[:q]
    return thetas, cos, sin


def hough_accumulator(edges, n_theta=N_THETA):
    """Vote counts indexed by (rho + offset, theta step).

    rho is measured from the raster centre and rounded half to even, so a
    quarter turn of the raster shifts the accumulator by exactly n_theta/2
    columns.
    """
    h, w = edges.shape
    diag = int(np.ceil(np.hypot(h, w) / 2.0)) + 1
    thetas, cos, sin = _trig(n_theta)
    ys, xs = np.nonzero(edges)
    acc = np.zeros((2 * diag + 1, n_theta), dtype=np.int64)
    if len(xs) == 0:
        return acc, thetas, diag
    # chunked to bound memory on dense edge maps
    for start in range(0, len(xs), 20000):
        x = xs[start:start + 20000, None] - (w - 1) / 2.0
        y = ys[start:start + 20000, None] - (h - 1) / 2.0
        rho = np.rint(x * cos + y * sin).astype(np.int64) + diag
        flat = rho * n_theta + np.arange(n_theta)
        acc += np.bincount(flat.ravel(), minlength=acc.size).reshape(acc.shape)
    return acc, thetas, diag


def hough_lines(edges, width=40, height=40, threshold=20, n_theta=N_THETA):
    """Detected lines as ``(rho, theta_radians, votes)`` tuples.

    A cell is a line when it reaches ``threshold`` votes and is the maximum
    of the cells within +-height/2 in rho and +-width/2 in theta. Plateaus
    of equal maxima count once.
    """
    acc, thetas, diag = hough_accumulator(edges, n_theta)
    if not acc.any():
        return []
    # theta wraps from 180 back to 0 with rho negated (row order reversed)
    k = min(width // 2, n_theta)
    ext = np.concatenate([acc[::-1, n_theta - k:], acc, acc[::-1, :k]], axis=1)
    size = (2 * (height // 2) + 1, 2 * k + 1)
    mx = ndimage.maximum_filter(ext, size=size, mode="constant")[:, k:k + n_theta]
    peaks = (acc == mx) & (acc >= threshold)
    labels, n = ndimage.label(peaks, structure=np.ones((3, 3), dtype=bool))
    if n == 0:
        return []
    flat = np.flatnonzero(peaks)
    lab = labels.ravel()[flat]
    _, first = np.unique(lab, return_index=True)
    cells = flat[np.sort(first)]
    ri, ti = np.divmod(cells, n_theta)
    return [(int(r) - diag, float(thetas[t]), int(acc[r, t])) for r, t in zip(ri, ti)]


def render_lines(shape, lines):
    """Draw lines (rho from the raster centre) white on a black canvas."""
    h, w = shape
    cx, cy = (w - 1) / 2.0, (h - 1) / 2.0
    out = np.zeros((h, w), dtype=np.uint8)
    for rho, theta, _ in lines:
        c, s = np.cos(theta), np.sin(theta)
        if abs(s) >= abs(c):
            x = np.arange(w)
            y = np.floor((rho - (x - cx) * c) / s + cy + 0.5).astype(np.int64)
        else:
            y = np.arange(h)
            x = np.floor((rho - (y - cy) * s) / c + cx + 0.5).astype(np.int64)
        ok = (x >= 0) & (x < w) & (y >= 0) & (y < h)
        out[y[ok], x[ok]] = 255
    return out


def hough_render(pixels, width, height, threshold):
    edges = canny(gray_int(pixels) / 255.0)
    return gray3(render_lines(edges.shape, hough_lines(edges, width, height, threshold)))


def edge_kernel(u, radius):
    """Edge operator with a (2r+1)^2 kernel: centre n^2 - 1, all others -1."""
    size = 2 * radius + 1
    mean = ndimage.uniform_filter(u, size=size, mode="nearest", axes=(0, 1))
    return size * size * (u - mean)


def edge_gray(pixels, radius):
    u = gray_int(pixels) / 255.0
    return gray3(from_unit(edge_kernel(u, radius)))


def edge_color(pixels, radius):
    return from_unit(edge_kernel(to_unit(pixels), radius))


def sobel_color(pixels):
    u = to_unit(pixels)
    gx = ndimage.sobel(u, axis=1, mode="nearest")
    gy = ndimage.sobel(u, axis=0, mode="nearest")
    return from_unit(np.hypot(gx, gy) / 4.0)


def adaptive_threshold(pixels, size=25, offset=-0.05):
    """White where the pixel exceeds its local mean plus ``offset``."""
    u = gray_int(pixels) / 255.0
    mean = ndimage.uniform_filter(u, size=size, mode="nearest")
    return gray3(np.where(u > mean + offset, 255, 0).astype(np.uint8))
