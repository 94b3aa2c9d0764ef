"""In-memory encoders. Downstream code only needs the encoded byte length."""

import enum
import os
from dataclasses import dataclass

import numpy as np

from ..imageio import NormalizedImage, rotate90
from . import gif, jpeg, png


class CodecId(str, enum.Enum):
    GIF = "gif"
    PNG = "png"
    JPEG100 = "jpeg100"
    JPEG0 = "jpeg0"

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).lower())
        except ValueError:
            raise ValueError(f"unknown codec {name!r}") from None


def _pixels(img):
    return img.pixels if isinstance(img, NormalizedImage) else np.asarray(img, dtype=np.uint8)


def encode(img, codec):
    codec = CodecId.parse(codec)
    pixels = _pixels(img)
    if codec is CodecId.GIF:
        palette, index = gif.palettize(pixels)
        return gif.stream(palette, index)
    if codec is CodecId.PNG:
        return png.encode(pixels)
    return jpeg.encode(pixels, 100 if codec is CodecId.JPEG100 else 0)


def gif_size(img):
    return len(encode(img, CodecId.GIF))


def png_size(img):
    return len(encode(img, CodecId.PNG))


def jpeg_size(img, quality):
    if quality not in (0, 100):
        raise ValueError("quality must be 0 or 100")
    return len(jpeg.encode(_pixels(img), quality))


def codec_size(img, codec):
    return len(encode(img, codec))


def size_rotavg(img, codec, dump_dir=None, tag=None):
    """Mean encoded size of ``img`` and its 90-degree clockwise rotation."""
    codec = CodecId.parse(codec)
    pixels = _pixels(img)
    if dump_dir is None and codec is CodecId.GIF:
        return gif.size_rotavg_pixels(pixels)
    rotated = np.rot90(pixels, k=-1)
    a = encode(pixels, codec)
    b = encode(rotated, codec)
    if dump_dir is not None:
        _dump(dump_dir, tag or "image", codec, a, b)
    return (len(a) + len(b)) / 2.0


_EXT = {CodecId.GIF: "gif", CodecId.PNG: "png", CodecId.JPEG100: "jpg", CodecId.JPEG0: "jpg"}


def _dump(dump_dir, tag, codec, a, b):
    os.makedirs(dump_dir, exist_ok=True)
    for suffix, data in (("", a), ("_rot90", b)):
        path = os.path.join(dump_dir, f"{tag}_{codec.value}{suffix}.{_EXT[codec]}")
        with open(path, "wb") as fh:
            fh.write(data)


@dataclass(frozen=True)
class BaselineSizes:
    f: int
    b_gif: float
    b_png: float
    b_jpeg100: float
    b_jpeg0: float
    b_gif_bytes: float
    b_png_bytes: float


def baseline_sizes(img):
    f = img.raw_size_f
    sizes = {c: size_rotavg(img, c) for c in CodecId}
    return BaselineSizes(
        f=f,
        b_gif=sizes[CodecId.GIF] / f,
        b_png=sizes[CodecId.PNG] / f,
        b_jpeg100=sizes[CodecId.JPEG100] / f,
        b_jpeg0=sizes[CodecId.JPEG0] / f,
        b_gif_bytes=sizes[CodecId.GIF],
        b_png_bytes=sizes[CodecId.PNG],
    )


__all__ = [
    "CodecId", "BaselineSizes", "baseline_sizes", "encode", "gif_size", "png_size",
    "jpeg_size", "codec_size", "size_rotavg", "rotate90",
]
