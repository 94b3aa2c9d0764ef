"""Decoding and size normalization of input images.

Everything downstream works on :class:`NormalizedImage`, an immutable
``(height, width, 3)`` uint8 raster.
"""

import io
import math
import os
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DecodeError, TooSmall, ZeroDimension

TARGET_PIXELS = 160000
ACCEPTED_FORMATS = {"PNG", "JPEG", "GIF", "BMP"}


def round_half_away(x):
    """Round half away from zero (works on scalars and arrays)."""
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def _iround(x):
    return int(round_half_away(float(x)))


@dataclass(frozen=True, eq=False)
class NormalizedImage:
    pixels: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.pixels, dtype=np.uint8)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ValueError(f"expected (h, w, 3) raster, got shape {arr.shape}")
        if arr.shape[0] == 0 or arr.shape[1] == 0:
            raise ZeroDimension(f"raster has zero dimension {arr.shape[:2]}")
        if arr is self.pixels:
            arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "pixels", arr)

    @classmethod
    def from_array(cls, arr):
        """Build from (h, w) gray, (h, w, 3) RGB or (h, w, 4) RGBA uint8 data."""
        arr = np.asarray(arr)
        if arr.dtype != np.uint8:
            raise ValueError("pixel data must be uint8")
        if arr.ndim == 2:
            arr = np.repeat(arr[:, :, None], 3, axis=2)
        elif arr.ndim == 3 and arr.shape[2] == 4:
            arr = _composite_white(arr)
        return cls(arr)

    @property
    def width(self):
        return self.pixels.shape[1]

    @property
    def height(self):
        return self.pixels.shape[0]

    @property
    def n_pixels(self):
        return self.width * self.height

    @property
    def raw_size_f(self):
        return self.width * self.height * 3

    def tobytes(self):
        return self.pixels.tobytes()

    def __eq__(self, other):
        if not isinstance(other, NormalizedImage):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and np.array_equal(self.pixels, other.pixels)

    def __hash__(self):
        return hash((self.pixels.shape, self.pixels.tobytes()))

    def __repr__(self):
        return f"NormalizedImage({self.width}x{self.height})"


def _composite_white(rgba):
    rgb = rgba[:, :, :3].astype(np.int32)
    a = rgba[:, :, 3:4].astype(np.int32)
    out = (rgb * a + 255 * (255 - a) + 127) // 255
    return out.astype(np.uint8)


def decode(data):
    """Decode encoded image bytes to an RGB uint8 array (alpha over white)."""
    try:
        im = Image.open(io.BytesIO(data))
        fmt = im.format
        im.seek(0)
        im.load()
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError, EOFError) as exc:
        raise DecodeError(f"cannot decode image: {exc}") from exc
    if fmt not in ACCEPTED_FORMATS:
        raise DecodeError(f"unsupported format {fmt!r}")
    if im.width == 0 or im.height == 0:
        raise ZeroDimension("image has zero width or height")
    has_alpha = im.mode in ("RGBA", "LA", "PA") or (
        im.mode in ("P", "L", "RGB") and "transparency" in im.info
    )
    if has_alpha:
        return _composite_white(np.asarray(im.convert("RGBA")))
    return np.asarray(im.convert("RGB"))


def _aspect_ok(dims, width, height):
    w, h = dims
    return abs(w - width * h / height) <= 1 or abs(h - height * w / width) <= 1


def normalized_dims(width, height, target_pixels=TARGET_PIXELS):
    """Dimensions after normalization; native size when already small enough."""
    if width <= 0 or height <= 0:
        raise ZeroDimension(f"invalid dimensions {width}x{height}")
    n = width * height
    if n <= target_pixels:
        return width, height
    s = math.sqrt(target_pixels / n)
    w, h = _iround(s * width), _iround(s * height)
    if w * h > target_pixels:
        fw, fh = max(1, math.floor(s * width)), max(1, math.floor(s * height))
        candidates = [(fw, h), (w, fh), (fw, fh)]
        candidates = [c for c in candidates if c[0] * c[1] <= target_pixels]
        # keep the aspect ratio within a pixel first, then take the most pixels
        w, h = max(candidates, key=lambda c: (_aspect_ok(c, width, height), c[0] * c[1], c[0]))
    if w == 0 or h == 0:
        raise ZeroDimension(f"normalization of {width}x{height} collapses a dimension")
    return w, h


def load_and_normalize(source, target_pixels=TARGET_PIXELS):
    """Decode ``source`` (path, bytes or array) and normalize its pixel count.

    Images larger than ``target_pixels`` are box-filtered down so the pixel
    count is as close to the target as possible with the aspect ratio kept.
    Smaller images keep their size; anything below half the target is
    rejected with :class:`TooSmall`.
    """
    if isinstance(source, np.ndarray):
        arr = NormalizedImage.from_array(source).pixels
    else:
        if isinstance(source, (str, os.PathLike)):
            with open(source, "rb") as fh:
                data = fh.read()
        else:
            data = bytes(source)
        arr = decode(data)
    h, w = arr.shape[:2]
    if w * h < 0.5 * target_pixels:
        raise TooSmall(f"{w}x{h} = {w * h} pixels is below half of {target_pixels}")
    nw, nh = normalized_dims(w, h, target_pixels)
    if (nw, nh) == (w, h):
        return NormalizedImage(arr)
    return NormalizedImage(_box_resize(arr, nw, nh))


def _box_resize(arr, width, height):
    im = Image.fromarray(np.ascontiguousarray(arr), mode="RGB")
    out = im.resize((width, height), resample=Image.Resampling.BOX)
    return np.asarray(out)


def resize_to(img, width, height):
    """Box-filter resample to an explicit size."""
    if width <= 0 or height <= 0:
        raise ZeroDimension(f"cannot resize to {width}x{height}")
    if (width, height) == (img.width, img.height):
        return NormalizedImage(img.pixels)
    return NormalizedImage(_box_resize(img.pixels, width, height))


def resize_fraction(img, frac):
    """Scale both sides by ``frac`` (rounded half away from zero)."""
    if not 0 < frac <= 1:
        raise ValueError(f"fraction must be in (0, 1], got {frac}")
    if frac == 1:
        return NormalizedImage(img.pixels)
    w, h = _iround(frac * img.width), _iround(frac * img.height)
    if w == 0 or h == 0:
        raise ZeroDimension(f"{img.width}x{img.height} at {frac} rounds to {w}x{h}")
    return resize_to(img, w, h)


def rotate90(img):
    """Rotate clockwise by 90 degrees."""
    return NormalizedImage(np.rot90(img.pixels, k=-1))
