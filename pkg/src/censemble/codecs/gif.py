"""GIF89a encoder (single frame, global palette, no dithering)."""

import struct

import numpy as np

from .. import kernels
from .quantize import quantize

MAX_COLORS = 256


def palettize(pixels):
    """Palette and index raster used for the GIF stream.

    Rasters with at most 256 colors keep their exact palette, so the
    encoding is lossless for them; anything else goes through median cut.
    """
    palette, index = quantize(pixels, MAX_COLORS)
    return palette, np.asarray(index, dtype=np.uint8)


def _table_bits(ncolors):
    bits = 1
    while (1 << bits) < ncolors:
        bits += 1
    return bits


def _sub_blocks(data):
    out = bytearray()
    for i in range(0, len(data), 255):
        chunk = data[i:i + 255]
        out.append(len(chunk))
        out += chunk
    out.append(0)
    return bytes(out)


def stream(palette, index):
    """Assemble a GIF89a byte stream from a palette and an index raster."""
    h, w = index.shape
    bits = _table_bits(len(palette))
    table = np.zeros((1 << bits, 3), dtype=np.uint8)
    table[: len(palette)] = palette
    min_code_size = max(2, bits)
    header = b"GIF89a" + struct.pack("<HHBBB", w, h, 0x80 | ((bits - 1) << 4) | (bits - 1), 0, 0)
    descriptor = b"\x2c" + struct.pack("<HHHHB", 0, 0, w, h, 0)
    lzw = kernels.lzw_encode(index, min_code_size)
    return b"".join(
        [header, table.tobytes(), descriptor, bytes([min_code_size]), _sub_blocks(lzw), b"\x3b"]
    )


def stream_size(palette_bits, lzw_len):
    """Byte length of a stream without building it."""
    nblocks = -(-lzw_len // 255)
    return 13 + 3 * (1 << palette_bits) + 10 + 1 + lzw_len + nblocks + 1 + 1


def encode(img):
    palette, index = palettize(img.pixels)
    return stream(palette, index)


def size(img):
    return len(encode(img))


def size_rotavg_pixels(pixels):
    """Mean GIF size of a raster and its clockwise rotation.

    The palette depends only on the color histogram, so it is computed once
    and the index raster is rotated.
    """
    palette, index = palettize(pixels)
    bits = _table_bits(len(palette))
    mcs = max(2, bits)
    a = stream_size(bits, len(kernels.lzw_encode(index, mcs)))
    b = stream_size(bits, len(kernels.lzw_encode(np.rot90(index, k=-1), mcs)))
    return (a + b) / 2.0
