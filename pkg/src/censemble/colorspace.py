"""Color-space conversions on uint8 RGB rasters.

Lab uses the sRGB companding curve and the D65 white point. HSL and HCL
follow the hexcone definitions ImageMagick uses for its modulate operator
and HCL colorspace.
"""

import numpy as np

_RGB_TO_XYZ = np.array([
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
])
# D65 white as the image of RGB white, so neutrals land exactly on a = b = 0
D65_WHITE = tuple(_RGB_TO_XYZ.sum(axis=1))
# HCL luma weights
_HCL_LUMA = (0.298839, 0.586811, 0.114350)


def to_unit(pixels):
    return np.asarray(pixels, dtype=np.float64) / 255.0


def from_unit(x):
    """Clamp to [0, 1] and requantize with round-half-up."""
    return np.floor(np.clip(x, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)


def gray_int(pixels):
    """Integer luma (299R + 587G + 114B) / 1000, rounded half up."""
    p = pixels.astype(np.int32)
    return ((299 * p[..., 0] + 587 * p[..., 1] + 114 * p[..., 2] + 500) // 1000).astype(np.uint8)


def gray3(gray):
    return np.repeat(np.asarray(gray, dtype=np.uint8)[..., None], 3, axis=-1)


def srgb_to_linear(u):
    return np.where(u <= 0.04045, u / 12.92, ((u + 0.055) / 1.055) ** 2.4)


def rgb_to_xyz(pixels):
    lin = srgb_to_linear(to_unit(pixels))
    return lin @ _RGB_TO_XYZ.T


def _lab_f(t):
    eps = (6.0 / 29.0) ** 3
    return np.where(t > eps, np.cbrt(t), t / (3 * (6.0 / 29.0) ** 2) + 4.0 / 29.0)


def rgb_to_lab(pixels):
    """CIELab (D65) of an RGB uint8 array; returns float array (..., 3)."""
    xyz = rgb_to_xyz(pixels)
    fx = _lab_f(xyz[..., 0] / D65_WHITE[0])
    fy = _lab_f(xyz[..., 1] / D65_WHITE[1])
    fz = _lab_f(xyz[..., 2] / D65_WHITE[2])
    return np.stack([116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)], axis=-1)


def rgb_to_hsl(u):
    """HSL of unit RGB floats; hue in [0, 1)."""
    r, g, b = u[..., 0], u[..., 1], u[..., 2]
    mx = np.max(u, axis=-1)
    mn = np.min(u, axis=-1)
    c = mx - mn
    lum = (mx + mn) / 2.0
    denom = 1.0 - np.abs(2.0 * lum - 1.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        sat = np.where(c > 0, c / np.where(denom > 0, denom, 1.0), 0.0)
    hue = _hue(r, g, b, mx, c)
    return hue, np.clip(sat, 0.0, 1.0), lum


def _hue(r, g, b, mx, c):
    safe = np.where(c > 0, c, 1.0)
    h = np.where(
        mx == r, ((g - b) / safe) % 6.0,
        np.where(mx == g, (b - r) / safe + 2.0, (r - g) / safe + 4.0),
    )
    return np.where(c > 0, h / 6.0, 0.0)


def _sector_rgb(h6, c, x):
    zero = np.zeros_like(c)
    sector = np.floor(h6).astype(np.int64) % 6
    r = np.choose(sector, [c, x, zero, zero, x, c])
    g = np.choose(sector, [x, c, c, x, zero, zero])
    b = np.choose(sector, [zero, zero, x, c, c, x])
    return r, g, b


def hsl_to_rgb(hue, sat, lum):
    c = (1.0 - np.abs(2.0 * lum - 1.0)) * sat
    h6 = hue * 6.0
    x = c * (1.0 - np.abs(h6 % 2.0 - 1.0))
    r, g, b = _sector_rgb(h6, c, x)
    m = lum - c / 2.0
    return np.stack([r + m, g + m, b + m], axis=-1)


def rgb_to_hcl(u):
    """Hue, chroma (max - min) and luma of unit RGB floats."""
    r, g, b = u[..., 0], u[..., 1], u[..., 2]
    mx = np.max(u, axis=-1)
    c = mx - np.min(u, axis=-1)
    luma = _HCL_LUMA[0] * r + _HCL_LUMA[1] * g + _HCL_LUMA[2] * b
    return _hue(r, g, b, mx, c), c, luma


def hcl_to_rgb(hue, chroma, luma):
    h6 = hue * 6.0
    x = chroma * (1.0 - np.abs(h6 % 2.0 - 1.0))
    r, g, b = _sector_rgb(h6, chroma, x)
    m = luma - (_HCL_LUMA[0] * r + _HCL_LUMA[1] * g + _HCL_LUMA[2] * b)
    return np.stack([r + m, g + m, b + m], axis=-1)
