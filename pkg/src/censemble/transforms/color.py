"""Per-pixel color transforms.

Channel math runs on [0, 1] floats; results are clamped and requantized
with round-half-up.
"""

import numpy as np

from .. import kernels
from ..codecs.quantize import quantize_pixels
from ..colorspace import (
    from_unit, gray3, gray_int, hcl_to_rgb, hsl_to_rgb, rgb_to_hcl, rgb_to_hsl, to_unit,
)
from .morph import median3


def grayscale(pixels):
    return gray3(gray_int(pixels))


def bilevel(pixels):
    return gray3(np.where(gray_int(pixels) >= 128, 255, 0).astype(np.uint8))


def bilevel_dither(pixels):
    """Floyd-Steinberg dithered black and white."""
    out = kernels.fs_dither(np.ascontiguousarray(gray_int(pixels) / 255.0))
    return gray3(np.asarray(out, dtype=np.uint8))


def quantize(pixels, n):
    if n < 2:
        raise ValueError("n must be at least 2")
    return quantize_pixels(pixels, n)


_CURVES = {
    "acos": lambda u: np.arccos(u) / (np.pi / 2),
    "p10": lambda u: u ** 10,
    "sqrt": np.sqrt,
    "round": lambda u: np.floor(u + 0.5),
}


def curve(pixels, kind):
    return from_unit(_CURVES[kind](to_unit(pixels)))


def modulate_lightness(pixels, factor):
    h, s, lum = rgb_to_hsl(to_unit(pixels))
    return from_unit(hsl_to_rgb(h, s, np.clip(lum * factor, 0.0, 1.0)))


def modulate_saturation(pixels, factor):
    h, s, lum = rgb_to_hsl(to_unit(pixels))
    return from_unit(hsl_to_rgb(h, np.clip(s * factor, 0.0, 1.0), lum))


def _divide(u, d):
    """Clamped u / d with x / 0 -> 1 for x > 0 and 0 / 0 -> 0."""
    with np.errstate(divide="ignore", invalid="ignore"):
        q = u / d
    return np.where(d > 0, q, np.where(u > 0, 1.0, 0.0))


def chroma_divide(pixels):
    u = to_unit(pixels)
    _, c, _ = rgb_to_hcl(u)
    return from_unit(_divide(u, c[..., None]))


def round_chroma(pixels):
    h, c, luma = rgb_to_hcl(to_unit(pixels))
    return from_unit(hcl_to_rgb(h, np.floor(c + 0.5), luma))


def luminance_divide(pixels):
    u = to_unit(pixels)
    y = gray_int(pixels) / 255.0
    return from_unit(_divide(u, y[..., None]))


def luminance_lighten(pixels):
    """Linear-light composite of the luma channel over the image."""
    u = to_unit(pixels)
    y = (gray_int(pixels) / 255.0)[..., None]
    return from_unit(u + 2.0 * y - 1.0)


def darken_intensity(pixels):
    """Darken-composite with the negative, then take the intensity."""
    p = pixels.astype(np.int32)
    dark = np.minimum(p, 255 - p).astype(np.uint8)
    return grayscale(dark)


def add_self(pixels, times=1):
    """Modulus-add the image onto itself ``times`` times (wraps at 256)."""
    p = pixels.astype(np.int64)
    return ((p << times) & 0xFF).astype(np.uint8)


def modulate_self(pixels):
    """Scale each pixel by twice its own intensity, then despeckle once."""
    u = to_unit(pixels)
    y = (gray_int(pixels) / 255.0)[..., None]
    out = from_unit(u * 2.0 * y)
    return median3(out)
