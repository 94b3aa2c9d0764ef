"""Geometric and stochastic effects."""

import numpy as np
from PIL import Image
from scipy import ndimage

from ..codecs.quantize import quantize as _quantize
from ..colorspace import from_unit, gray_int, to_unit
from . import lines


def dominant_skew(pixels, threshold=70):
    """Skew angle in degrees, in [-45, 45), of the strongest Hough line."""
    edges = lines.canny(gray_int(pixels) / 255.0)
    acc, thetas, _ = lines.hough_accumulator(edges)
    if acc.max() < threshold:
        return 0.0
    _, t = np.unravel_index(int(np.argmax(acc)), acc.shape)
    theta = float(np.rad2deg(thetas[t]))
    return (theta + 45.0) % 90.0 - 45.0


def deskew_zoom(pixels):
    """Rotate away the dominant skew and crop the largest centred frame."""
    skew = dominant_skew(pixels)
    if abs(skew) < 0.5:
        return np.array(pixels, copy=True)
    h, w = pixels.shape[:2]
    im = Image.fromarray(np.ascontiguousarray(pixels))
    rot = np.asarray(im.rotate(skew, resample=Image.Resampling.BILINEAR, fillcolor=(255, 255, 255)))
    a = np.deg2rad(abs(skew))
    c, s = np.cos(a), np.sin(a)
    k = min(w / (w * c + h * s), h / (w * s + h * c))
    cw = max(1, int(np.floor(k * w + 0.5)))
    ch = max(1, int(np.floor(k * h + 0.5)))
    x0, y0 = (w - cw) // 2, (h - ch) // 2
    return np.ascontiguousarray(rot[y0:y0 + ch, x0:x0 + cw])


def implode(pixels, amount=0.5):
    """Radial inward warp: inside the central disc, sample farther out."""
    h, w = pixels.shape[:2]
    cx, cy = w / 2.0, h / 2.0
    radius = min(cx, cy)
    sx = sy = 1.0
    if w > h:
        sy = w / h
        radius = cx
    elif h > w:
        sx = h / w
        radius = cy
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    dx = sx * (xx + 0.5 - cx)
    dy = sy * (yy + 0.5 - cy)
    dist = dx * dx + dy * dy
    inside = (dist < radius * radius) & (dist > 0)
    factor = np.ones_like(dist)
    d = np.sqrt(dist[inside])
    factor[inside] = np.sin(np.pi * d / radius / 2.0) ** (-amount)
    src_x = factor * dx / sx + cx - 0.5
    src_y = factor * dy / sy + cy - 0.5
    out = np.empty_like(pixels)
    for c in range(3):
        out[..., c] = np.clip(np.floor(
            ndimage.map_coordinates(pixels[..., c].astype(np.float64), [src_y, src_x], order=1, mode="nearest")
            + 0.5), 0, 255)
    return out


def multiplicative_noise(pixels, seed, sigma=0.5):
    rng = np.random.default_rng(seed)
    u = to_unit(pixels)
    return from_unit(u * (1.0 + sigma * rng.standard_normal(u.shape)))


def scramble(pixels, seed):
    rng = np.random.default_rng(seed)
    flat = pixels.reshape(-1, 3)
    return flat[rng.permutation(len(flat))].reshape(pixels.shape)


def stripes(pixels, n=20):
    """Quantize, then lay pixels out in raster order sorted by color frequency."""
    palette, index = _quantize(pixels, n)
    flat = np.asarray(index).ravel().astype(np.int64)
    counts = np.bincount(flat, minlength=len(palette))
    order = np.lexsort((np.arange(len(palette)), -counts))
    seq = np.repeat(order, counts[order])
    return palette[seq].reshape(pixels.shape)
