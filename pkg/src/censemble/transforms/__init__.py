"""Registry of image transforms.

Each entry maps an id to a pure function ``fn(pixels, seed, **params)``
returning a uint8 RGB raster, plus the rule its output dimensions follow:
``same`` (input size), ``square`` (padded to max(w, h)) or ``crop``.
"""

from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np

from ..errors import BadParams, UnknownTransform
from ..imageio import NormalizedImage
from . import color, fft, flood, fx, lines, morph

__all__ = [
    "TransformSpec", "Transform", "REGISTRY", "get", "apply_transform", "apply_pixels",
    "transform_ids", "quantize_colors", "canny_edges", "fft_pair", "flood_fill", "pixelate",
]


@dataclass(frozen=True)
class Transform:
    id: str
    fn: object
    defaults: MappingProxyType
    dims: str = "same"
    description: str = ""
    seeded: bool = False
    pre: str = None  # FFT entries: transform applied before the DFT


@dataclass(frozen=True)
class TransformSpec:
    """One configured transform: id, parameter overrides, codecs and scales."""

    id: str
    params: dict = field(default_factory=dict)
    codecs: tuple = ("gif",)
    scales: tuple = (1.0,)

    def __hash__(self):
        return hash((self.id, tuple(sorted(self.params.items())), self.codecs, self.scales))


_REG = {}


def _add(tid, fn, description, dims="same", seeded=False, pre=None, **defaults):
    _REG[tid] = Transform(tid, fn, MappingProxyType(defaults), dims, description, seeded, pre)


def _noseed(f):
    def wrapped(pixels, seed, **kw):
        return f(pixels, **kw)
    wrapped.__name__ = getattr(f, "__name__", "transform")
    return wrapped


_add("identity", _noseed(lambda p: np.array(p, copy=True)), "No-op; ratio is 1 by construction")
_add("blur10", _noseed(morph.blur), "Gaussian blur, sigma 10", sigma=10.0)
_add("blur30", _noseed(morph.blur), "Gaussian blur, sigma 30", sigma=30.0)
_add("colors_grayscale", _noseed(color.grayscale), "Integer luma grayscale")
_add("colors_quantize_bw", _noseed(color.bilevel), "Black and white at luma threshold 128")
_add("colors_quantize_bw_dither", _noseed(color.bilevel_dither), "Floyd-Steinberg black and white")
_add("colors_quantize3", _noseed(color.quantize), "Median-cut quantization to 3 colors", n=3)
_add("colors_quantize5", _noseed(color.quantize), "Median-cut quantization to 5 colors", n=5)
_add("colors_acos", _noseed(color.curve), "Channel arc cosine, rescaled to [0, 1]", kind="acos")
_add("colors_p10", _noseed(color.curve), "Channel value to the 10th power", kind="p10")
_add("colors_sqrt", _noseed(color.curve), "Channel square root", kind="sqrt")
_add("colors_round", _noseed(color.curve), "Channel rounding to 0 or 1", kind="round")
_add("colors_brightness", _noseed(color.modulate_lightness), "HSL lightness x4", factor=4.0)
_add("colors_saturate", _noseed(color.modulate_saturation), "HSL saturation x51", factor=51.0)
_add("color_chroma_divide", _noseed(color.chroma_divide), "Channels divided by HCL chroma")
_add("colors_roundchroma", _noseed(color.round_chroma), "HCL chroma rounded to 0 or 1")
_add("color_luminance_divide", _noseed(color.luminance_divide), "Channels divided by luma")
_add("color_luminance_lighten", _noseed(color.luminance_lighten), "Linear-light composite of luma")
_add("color_darken_intensity", _noseed(color.darken_intensity), "Darken with negative, then intensity")
_add("colors_add2", _noseed(color.add_self), "Modulus-add with itself", times=1)
_add("lines_bw_canny", _noseed(lines.canny_edges), "Canny edges, white on black")
_add("lines_cartoon", _noseed(morph.cartoon), "Inverted Canny multiplied with a blur", sigma=3.0)
_add("lines_division_gray", _noseed(morph.division_gray), "Grayscale over its blur", sigma=10.0)
_add("lines_edge5_gray", _noseed(lines.edge_gray), "Edge kernel on grayscale, radius 5", radius=5)
_add("lines_edge10_gray", _noseed(lines.edge_gray), "Edge kernel on grayscale, radius 10", radius=10)
_add("lines_edge1_color", _noseed(lines.edge_color), "Edge kernel per channel, radius 1", radius=1)
_add("lines_edge2_color", _noseed(lines.edge_color), "Edge kernel per channel, radius 2", radius=2)
_add("lines_hough40", _noseed(lines.hough_render), "Hough lines, 40x40 peaks, 20 votes",
     width=40, height=40, threshold=20)
_add("lines_hough50", _noseed(lines.hough_render), "Hough lines, 50x50 peaks, 70 votes",
     width=50, height=50, threshold=70)
_add("lines_color_comp", _noseed(morph.compare_despeckled), "Difference to a despeckled copy")
_add("lines_color_conv", _noseed(lines.sobel_color), "Sobel magnitude per channel")
_add("lines_edge_lat", _noseed(lines.adaptive_threshold), "Local adaptive threshold",
     size=25, offset=-0.05)
_add("emboss_gray4", _noseed(morph.emboss_gray), "Emboss on grayscale, radius 4, sigma 1",
     radius=4, sigma=1.0)
_add("emboss_col1", _noseed(morph.emboss_color), "Emboss per channel, radius 1, sigma 0.1",
     radius=1, sigma=0.1)
_add("emboss_conv_grayd", _noseed(morph.emboss_dog), "Difference-of-Gaussians relief on grayscale",
     s1=1.0, s2=2.0, gain=2.0)
_add("emboss_conv_grayp", _noseed(morph.emboss_prewitt), "Diagonal Prewitt relief on grayscale")
_add("emboss_modulate", _noseed(color.modulate_self), "Self-modulation plus despeckle")
_add("morph_pixelate10", _noseed(morph.pixelate), "Pixelate by 10", factor=10)
_add("morph_pixelate20", _noseed(morph.pixelate), "Pixelate by 20", factor=20)
_add("morph_add3_pixelate", _noseed(color.add_self), "Modulus-add with itself three times", times=3)
_add("morph_despecle10", _noseed(morph.median3), "Ten passes of a 3x3 median", passes=10)
_add("morph_oilpaint", _noseed(morph.oilpaint), "Intensity mode filter, 7x7", radius=3, bins=16)
_add("morph_squares", _noseed(morph.dilate_squares), "Square dilation, 7x7", size=7)
_add("flood_centre", _noseed(flood.flood_fill), "Flood fill from the centre", pattern="centre", fuzz=0.1)
_add("flood_hole", _noseed(flood.flood_fill), "Filled central disc", pattern="hole", fuzz=0.1)
_add("flood_corners", _noseed(flood.flood_fill), "Flood fill from the corners", pattern="corners", fuzz=0.1)
_add("flood_thirds", _noseed(flood.flood_fill), "Flood fill from the thirds", pattern="thirds", fuzz=0.1)
_add("fx_deskew_zoom", _noseed(fx.deskew_zoom), "Hough deskew and centred crop", dims="crop")
_add("fx_implode", _noseed(fx.implode), "Radial implode warp", amount=0.5)
_add("fx_noise", fx.multiplicative_noise, "Seeded multiplicative Gaussian noise", seeded=True, sigma=0.5)
_add("fx_scramble", fx.scramble, "Seeded pixel permutation", seeded=True)
_add("fx_stripes", _noseed(fx.stripes), "20 colors laid out by frequency", n=20)

for _pre in (None, "blur10", "colors_quantize3", "lines_division_gray"):
    _suffix = "" if _pre is None else f"_{_pre}"
    _on = "" if _pre is None else f" of {_pre}"
    _add(f"fft1{_suffix}", _noseed(fft.fft_magnitude), f"DFT log magnitude{_on}", dims="square", pre=_pre)
    _add(f"fft2{_suffix}", _noseed(fft.fft_phase), f"DFT phase{_on}", dims="square", pre=_pre)

REGISTRY = MappingProxyType(_REG)


def transform_ids():
    return list(REGISTRY)


def get(tid):
    try:
        return REGISTRY[tid]
    except KeyError:
        raise UnknownTransform(tid) from None


def _params(entry, overrides):
    unknown = set(overrides or {}) - set(entry.defaults)
    if unknown:
        raise BadParams(f"{entry.id}: unknown parameters {sorted(unknown)}")
    params = dict(entry.defaults)
    params.update(overrides or {})
    return params


def apply_pixels(tid, pixels, seed=0, params=None, memo=None):
    """Apply a registered transform to a raw uint8 raster.

    ``memo`` is an optional dict reused across calls on the same raster; it
    caches the outputs of transforms used as FFT pre-stages.
    """
    entry = get(tid)
    kw = _params(entry, params)
    if entry.pre is not None:
        src = _memo_apply(entry.pre, pixels, seed, memo)
    else:
        src = pixels
    try:
        out = entry.fn(src, seed, **kw)
    except (TypeError, ValueError) as exc:
        raise BadParams(f"{tid}: {exc}") from exc
    return np.ascontiguousarray(out, dtype=np.uint8)


def _memo_apply(tid, pixels, seed, memo):
    if memo is None:
        return apply_pixels(tid, pixels, seed)
    if tid not in memo:
        memo[tid] = apply_pixels(tid, pixels, seed)
    return memo[tid]


def apply_transform(spec, img, seed=0, memo=None):
    """Apply ``spec`` (a TransformSpec or id) to a NormalizedImage."""
    if isinstance(spec, str):
        spec = TransformSpec(spec)
    return NormalizedImage(apply_pixels(spec.id, img.pixels, seed, spec.params, memo))


def quantize_colors(img, n):
    return NormalizedImage(color.quantize(img.pixels, n))


def canny_edges(img, sigma=lines.CANNY_SIGMA, lo=lines.CANNY_LO, hi=lines.CANNY_HI):
    return NormalizedImage(lines.canny_edges(img.pixels, sigma, lo, hi))


def fft_pair(img):
    m, p = fft.fft_pair(img.pixels)
    return NormalizedImage(m), NormalizedImage(p)


def flood_fill(img, pattern, fuzz=0.1):
    return NormalizedImage(flood.flood_fill(img.pixels, pattern, fuzz))


def pixelate(img, factor):
    return NormalizedImage(morph.pixelate(img.pixels, factor))
