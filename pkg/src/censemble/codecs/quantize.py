"""Deterministic median-cut color quantization.

Works on a 5-bit-per-channel histogram (32768 cells) so the cost is
independent of the number of distinct colors. Palette entries are the
pixel-weighted mean of the true colors that fall into each box.
"""

import numpy as np

from .. import kernels

CELL_BITS = 5
_SHIFT = 8 - CELL_BITS
_NCELLS = 1 << (3 * CELL_BITS)


def pack_rgb(pixels):
    p = pixels.astype(np.uint32)
    return (p[..., 0] << 16) | (p[..., 1] << 8) | p[..., 2]


def unpack_rgb(keys):
    keys = np.asarray(keys, dtype=np.uint32)
    return np.stack([(keys >> 16) & 0xFF, (keys >> 8) & 0xFF, keys & 0xFF], axis=-1).astype(np.uint8)


def exact_palette(pixels, limit):
    """``(palette, index)`` when the raster has at most ``limit`` colors, else None."""
    res = kernels.palette_index(pack_rgb(pixels), limit)
    if res is None:
        return None
    keys, index = res
    return unpack_rgb(keys), index


def median_cut(pixels, n):
    """Quantize to at most ``n`` colors. Returns ``(palette, index)``."""
    if n < 1:
        raise ValueError("need at least one palette entry")
    flat = pixels.reshape(-1, 3)
    cell = (
        (flat[:, 0].astype(np.int64) >> _SHIFT) << (2 * CELL_BITS)
        | (flat[:, 1].astype(np.int64) >> _SHIFT) << CELL_BITS
        | (flat[:, 2].astype(np.int64) >> _SHIFT)
    )
    counts_all = np.bincount(cell, minlength=_NCELLS)
    occupied = np.flatnonzero(counts_all)
    counts = counts_all[occupied]
    cells_val = np.stack(
        [occupied >> (2 * CELL_BITS), (occupied >> CELL_BITS) & 31, occupied & 31], axis=1
    )

    lut = np.zeros(_NCELLS, dtype=np.int64)
    lut[occupied] = kernels.median_cut_boxes(cells_val, counts, n)
    index = lut[cell]
    k = int(index.max()) + 1
    pop = np.bincount(index, minlength=k)
    palette = np.empty((k, 3), dtype=np.uint8)
    for c in range(3):
        sums = np.bincount(index, weights=flat[:, c].astype(np.float64), minlength=k)
        palette[:, c] = np.floor(sums / pop + 0.5).astype(np.uint8)
    return palette, index.reshape(pixels.shape[:2])


def quantize(pixels, n):
    """Palette + index, reusing the exact palette when it already fits."""
    exact = exact_palette(pixels, n)
    if exact is not None:
        return exact
    return median_cut(pixels, n)


def quantize_pixels(pixels, n):
    """Quantized raster with at most ``n`` distinct colors."""
    exact = exact_palette(pixels, n)
    if exact is not None:
        return pixels
    palette, index = median_cut(pixels, n)
    return palette[index]
