"""Blur, morphology, emboss and compositing-based transforms."""

import numpy as np
from PIL import Image
from scipy import ndimage

from ..colorspace import from_unit, gray3, gray_int, to_unit
from . import lines


def blur(pixels, sigma):
    """Gaussian blur with edge replication; truncation at 3 sigma."""
    u = to_unit(pixels)
    out = ndimage.gaussian_filter(u, sigma=(sigma, sigma, 0), mode="nearest", truncate=3.0)
    return from_unit(out)


def pixelate(pixels, factor):
    """Box-downscale by ``factor`` then nearest-neighbour back to size."""
    h, w = pixels.shape[:2]
    sw = max(1, int(np.floor(w / factor + 0.5)))
    sh = max(1, int(np.floor(h / factor + 0.5)))
    im = Image.fromarray(np.ascontiguousarray(pixels))
    small = im.resize((sw, sh), resample=Image.Resampling.BOX)
    return np.asarray(small.resize((w, h), resample=Image.Resampling.NEAREST))


# exchange network selecting the median of 9 values (Paeth / Devillard)
_MED9 = [(1, 2), (4, 5), (7, 8), (0, 1), (3, 4), (6, 7), (1, 2), (4, 5), (7, 8), (0, 3),
         (5, 8), (4, 7), (3, 6), (1, 4), (2, 5), (4, 7), (4, 2), (6, 4), (4, 2)]


def _median9(pixels):
    h, w = pixels.shape[:2]
    pad = ((1, 1), (1, 1)) + ((0, 0),) * (pixels.ndim - 2)
    p = np.pad(pixels, pad, mode="edge")
    v = [p[dy:dy + h, dx:dx + w] for dy in range(3) for dx in range(3)]
    for i, j in _MED9:
        v[i], v[j] = np.minimum(v[i], v[j]), np.maximum(v[i], v[j])
    return v[4]


def median3(pixels, passes=1):
    """``passes`` rounds of a 3x3 per-channel median with edge replication."""
    out = pixels
    for _ in range(passes):
        out = _median9(out)
    return np.ascontiguousarray(out)


def oilpaint(pixels, radius=3, bins=16):
    """Neighbourhood mode filter.

    Each pixel takes the mean color of the pixels, within a square window,
    whose intensity falls in the window's most populated intensity bin.
    Lowest bin wins ties.
    """
    size = 2 * radius + 1
    area = size * size
    gray = gray_int(pixels).astype(np.int64)
    bin_of = gray * bins // 256
    best_count = np.full(gray.shape, -1, dtype=np.int64)
    best_sum = np.zeros(pixels.shape, dtype=np.int64)
    p = pixels.astype(np.float64)

    def window_sum(a):
        # uniform_filter gives the mean; sums of integers are recovered exactly
        return np.rint(ndimage.uniform_filter(a, size=size, mode="nearest") * area).astype(np.int64)

    for b in range(bins):
        ind = (bin_of == b)
        if not ind.any():
            continue
        cnt = window_sum(ind.astype(np.float64))
        better = cnt > best_count
        if not better.any():
            continue
        sums = np.stack([window_sum(p[..., c] * ind) for c in range(3)], axis=-1)
        best_count = np.where(better, cnt, best_count)
        best_sum = np.where(better[..., None], sums, best_sum)
    cnt = np.maximum(best_count, 1)[..., None]
    return ((2 * best_sum + cnt) // (2 * cnt)).astype(np.uint8)


def dilate_squares(pixels, size=7):
    return ndimage.maximum_filter(pixels, size=(size, size, 1), mode="nearest")


def _equalize(channel):
    """Histogram equalization of one uint8 channel."""
    hist = np.bincount(channel.ravel(), minlength=256)
    cdf = np.cumsum(hist)
    nz = cdf[hist > 0]
    lo, total = int(nz[0]), int(cdf[-1])
    if total == lo:
        return channel
    lut = np.floor((cdf - lo) * 255.0 / (total - lo) + 0.5)
    return np.clip(lut, 0, 255).astype(np.uint8)[channel]


def emboss_kernel(radius, sigma):
    """Anti-diagonal Gaussian-weighted kernel, negative on the upper-left half."""
    size = 2 * radius + 1
    k = np.zeros((size, size))
    for i, v in enumerate(range(-radius, radius + 1)):
        u = radius - i
        sign = -8.0 if (u < 0 or v < 0) else 8.0
        k[i, u + radius] = sign * np.exp(-(u * u + v * v) / (2 * sigma * sigma)) / (2 * np.pi * sigma * sigma)
    return k


def emboss(u, radius, sigma):
    """Emboss a 2-D float image; result equalized."""
    k = emboss_kernel(radius, sigma)
    resp = ndimage.correlate(u, k, mode="nearest") + 0.5
    return _equalize(from_unit(resp))


def emboss_gray(pixels, radius, sigma):
    return gray3(emboss(gray_int(pixels) / 255.0, radius, sigma))


def emboss_color(pixels, radius, sigma):
    u = to_unit(pixels)
    return np.stack([emboss(u[..., c], radius, sigma) for c in range(3)], axis=-1)


def emboss_dog(pixels, s1=1.0, s2=2.0, gain=2.0):
    u = gray_int(pixels) / 255.0
    d = ndimage.gaussian_filter(u, s1, mode="nearest") - ndimage.gaussian_filter(u, s2, mode="nearest")
    return gray3(from_unit(0.5 + gain * d))


_PREWITT_DIAG = np.array([[-2.0, -1.0, 0.0], [-1.0, 0.0, 1.0], [0.0, 1.0, 2.0]])


def emboss_prewitt(pixels):
    u = gray_int(pixels) / 255.0
    resp = ndimage.correlate(u, _PREWITT_DIAG, mode="nearest")
    return gray3(from_unit(0.5 + resp / 12.0))


def division_gray(pixels, sigma=10.0):
    """Grayscale divided by its own Gaussian blur."""
    g = gray_int(pixels) / 255.0
    b = ndimage.gaussian_filter(g, sigma, mode="nearest", truncate=3.0)
    return gray3(from_unit(g / np.maximum(b, 1.0 / 255.0)))


def cartoon(pixels, sigma=3.0):
    """Multiply-composite of inverted Canny lines with a blurred copy."""
    edges = lines.canny(gray_int(pixels) / 255.0)
    soft = blur(pixels, sigma)
    return np.where(edges[..., None], 0, soft).astype(np.uint8)


def compare_despeckled(pixels):
    """Absolute difference to a median-despeckled copy."""
    d = np.abs(pixels.astype(np.int16) - median3(pixels).astype(np.int16))
    return d.astype(np.uint8)
