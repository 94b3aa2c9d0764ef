"""Baseline sequential JPEG encoder with libjpeg-compatible integer arithmetic.

Color conversion, chroma downsampling, the forward DCT ("islow") and the
quantizer all follow libjpeg's fixed-point definitions, so the output is
bit-identical on every platform. Quality 0 uses 4:2:0 subsampling, quality
100 uses 4:4:4; Huffman tables are the standard ones.
"""

import struct

import numpy as np

from .. import kernels

_LUMA_Q = np.array([
    16, 11, 10, 16, 24, 40, 51, 61,
    12, 12, 14, 19, 26, 58, 60, 55,
    14, 13, 16, 24, 40, 57, 69, 56,
    14, 17, 22, 29, 51, 87, 80, 62,
    18, 22, 37, 56, 68, 109, 103, 77,
    24, 35, 55, 64, 81, 104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101,
    72, 92, 95, 98, 112, 100, 103, 99,
])
_CHROMA_Q = np.array([
    17, 18, 24, 47, 99, 99, 99, 99,
    18, 21, 26, 66, 99, 99, 99, 99,
    24, 26, 56, 99, 99, 99, 99, 99,
    47, 66, 99, 99, 99, 99, 99, 99,
] + [99] * 32)

_DC_LUMA_BITS = [0, 1, 5, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0]
_DC_CHROMA_BITS = [0, 3, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0]
_DC_VALS = list(range(12))
_AC_LUMA_BITS = [0, 2, 1, 3, 3, 2, 4, 3, 5, 5, 4, 4, 0, 0, 1, 0x7D]
_AC_LUMA_VALS = bytes.fromhex(
    "01020300041105122131410613516107227114328191a1082342b1c11552d1f0"
    "2433627282090a161718191a25262728292a3435363738393a434445464748494a"
    "535455565758595a636465666768696a737475767778797a838485868788898a"
    "92939495969798999aa2a3a4a5a6a7a8a9aab2b3b4b5b6b7b8b9bac2c3c4c5c6"
    "c7c8c9cad2d3d4d5d6d7d8d9dae1e2e3e4e5e6e7e8e9eaf1f2f3f4f5f6f7f8f9fa"
)
_AC_CHROMA_BITS = [0, 2, 1, 2, 4, 4, 3, 4, 7, 5, 4, 4, 0, 1, 2, 0x77]
_AC_CHROMA_VALS = bytes.fromhex(
    "000102031104052131061241510761711322328108144291a1b1c109233352f0"
    "156272d10a162434e125f11718191a262728292a35363738393a434445464748"
    "494a535455565758595a636465666768696a737475767778797a828384858687"
    "88898a92939495969798999aa2a3a4a5a6a7a8a9aab2b3b4b5b6b7b8b9bac2c3"
    "c4c5c6c7c8c9cad2d3d4d5d6d7d8d9dae2e3e4e5e6e7e8e9eaf2f3f4f5f6f7f8f9fa"
)


def _zigzag():
    order = []
    for s in range(15):
        rng = range(s + 1) if s < 8 else range(s - 7, 8)
        diag = [(i, s - i) for i in rng if 0 <= s - i < 8]
        if s % 2 == 0:
            diag = [(j, i) for i, j in diag]
        order.extend(r * 8 + c for r, c in diag)
    return np.array(order)


ZIGZAG = _zigzag()


def _huffman_table(bits, vals, size):
    codes = np.zeros(size, dtype=np.uint32)
    lengths = np.zeros(size, dtype=np.int32)
    code = 0
    k = 0
    for length in range(1, 17):
        for _ in range(bits[length - 1]):
            codes[vals[k]] = code
            lengths[vals[k]] = length
            code += 1
            k += 1
        code <<= 1
    return codes, lengths


_DC_TABLES = (
    _huffman_table(_DC_LUMA_BITS, _DC_VALS, 12),
    _huffman_table(_DC_CHROMA_BITS, _DC_VALS, 12),
)
_AC_TABLES = (
    _huffman_table(_AC_LUMA_BITS, _AC_LUMA_VALS, 256),
    _huffman_table(_AC_CHROMA_BITS, _AC_CHROMA_VALS, 256),
)


def quant_table(base, quality):
    """IJG quality scaling; quality 0 is treated as 1, entries clamped to 1..255."""
    quality = min(max(int(quality), 1), 100)
    scale = 5000 // quality if quality < 50 else 200 - 2 * quality
    return np.clip((base * scale + 50) // 100, 1, 255).astype(np.int64)


_FIX = lambda x: int(x * 65536 + 0.5)  # noqa: E731
_ONE_HALF = 1 << 15
_CBCR_OFFSET = 128 << 16


def rgb_to_ycc(rgb):
    r, g, b = (rgb[..., i].astype(np.int64) for i in range(3))
    y = (_FIX(0.299) * r + _FIX(0.587) * g + _FIX(0.114) * b + _ONE_HALF) >> 16
    cb = (-_FIX(0.16874) * r - _FIX(0.33126) * g + _FIX(0.5) * b + _CBCR_OFFSET + _ONE_HALF - 1) >> 16
    cr = (_FIX(0.5) * r - _FIX(0.41869) * g - _FIX(0.08131) * b + _CBCR_OFFSET + _ONE_HALF - 1) >> 16
    return y, cb, cr


def _pad_edge(plane, rows, cols):
    h, w = plane.shape
    return np.pad(plane, ((0, rows - h), (0, cols - w)), mode="edge")


def _downsample_h2v2(plane):
    h, w = plane.shape
    s = plane[0::2, 0::2] + plane[0::2, 1::2] + plane[1::2, 0::2] + plane[1::2, 1::2]
    bias = np.tile(np.array([1, 2], dtype=np.int64), w // 4 + 1)[: w // 2]
    return (s + bias) >> 2


_C = {
    "0_298631336": 2446, "0_390180644": 3196, "0_541196100": 4433,
    "0_765366865": 6270, "0_899976223": 7373, "1_175875602": 9633,
    "1_501321110": 12299, "1_847759065": 15137, "1_961570560": 16069,
    "2_053119869": 16819, "2_562915447": 20995, "3_072711026": 25172,
}
_CONST_BITS = 13
_PASS1_BITS = 2


def _descale(x, n):
    return (x + (1 << (n - 1))) >> n


def _fdct_pass(d, first):
    """One 1-D pass of the islow DCT along the last axis."""
    d0, d1, d2, d3, d4, d5, d6, d7 = (d[..., i] for i in range(8))
    tmp0, tmp7 = d0 + d7, d0 - d7
    tmp1, tmp6 = d1 + d6, d1 - d6
    tmp2, tmp5 = d2 + d5, d2 - d5
    tmp3, tmp4 = d3 + d4, d3 - d4
    tmp10, tmp13 = tmp0 + tmp3, tmp0 - tmp3
    tmp11, tmp12 = tmp1 + tmp2, tmp1 - tmp2
    out = np.empty_like(d)
    if first:
        out[..., 0] = (tmp10 + tmp11) << _PASS1_BITS
        out[..., 4] = (tmp10 - tmp11) << _PASS1_BITS
        shift = _CONST_BITS - _PASS1_BITS
    else:
        out[..., 0] = _descale(tmp10 + tmp11, _PASS1_BITS)
        out[..., 4] = _descale(tmp10 - tmp11, _PASS1_BITS)
        shift = _CONST_BITS + _PASS1_BITS
    z1 = (tmp12 + tmp13) * _C["0_541196100"]
    out[..., 2] = _descale(z1 + tmp13 * _C["0_765366865"], shift)
    out[..., 6] = _descale(z1 - tmp12 * _C["1_847759065"], shift)
    z1 = tmp4 + tmp7
    z2 = tmp5 + tmp6
    z3 = tmp4 + tmp6
    z4 = tmp5 + tmp7
    z5 = (z3 + z4) * _C["1_175875602"]
    tmp4 = tmp4 * _C["0_298631336"]
    tmp5 = tmp5 * _C["2_053119869"]
    tmp6 = tmp6 * _C["3_072711026"]
    tmp7 = tmp7 * _C["1_501321110"]
    z1 = -z1 * _C["0_899976223"]
    z2 = -z2 * _C["2_562915447"]
    z3 = -z3 * _C["1_961570560"] + z5
    z4 = -z4 * _C["0_390180644"] + z5
    out[..., 7] = _descale(tmp4 + z1 + z3, shift)
    out[..., 5] = _descale(tmp5 + z2 + z4, shift)
    out[..., 3] = _descale(tmp6 + z2 + z3, shift)
    out[..., 1] = _descale(tmp7 + z1 + z4, shift)
    return out


def fdct_islow(blocks):
    """Forward DCT of (..., 8, 8) level-shifted samples; output scaled by 8."""
    rows = _fdct_pass(blocks.astype(np.int64), True)
    cols = _fdct_pass(np.swapaxes(rows, -1, -2), False)
    return np.swapaxes(cols, -1, -2)


def _quantize(coefs, table):
    qval = table.reshape(8, 8) * 8
    mag = (np.abs(coefs) + (qval >> 1)) // qval
    return np.where(coefs < 0, -mag, mag)


def _component_blocks(plane, bh, bw, table):
    """Quantized zigzag blocks, shape (bh, bw, 64), for a padded plane."""
    shifted = plane[: bh * 8, : bw * 8] - 128
    blocks = shifted.reshape(bh, 8, bw, 8).swapaxes(1, 2)
    q = _quantize(fdct_islow(blocks), table)
    return q.reshape(bh, bw, 64)[:, :, ZIGZAG]


def _expand_dummies(real, mh, mw, v, hz):
    """Place real blocks on the MCU grid and fill libjpeg-style dummy blocks."""
    bh, bw = real.shape[:2]
    grid = np.zeros((mh * v, mw * hz, 64), dtype=np.int64)
    grid[:bh, :bw] = real
    for r in range(bh):
        for c in range(bw, mw * hz):
            grid[r, c, 0] = grid[r, c - 1, 0]
    for r in range(bh, mh * v):
        for mx in range(mw):
            dc = grid[r - 1, mx * hz + hz - 1, 0]
            grid[r, mx * hz : mx * hz + hz, 0] = dc
    return grid


def _scan_order(y_grid, cb, cr, mh, mw, v, hz):
    """Interleave components into MCU scan order; returns (blocks, comp)."""
    ygrid = y_grid.reshape(mh, v, mw, hz, 64).transpose(0, 2, 1, 3, 4).reshape(mh, mw, v * hz, 64)
    per = v * hz + 2
    blocks = np.empty((mh, mw, per, 64), dtype=np.int64)
    blocks[:, :, : v * hz] = ygrid
    blocks[:, :, v * hz] = cb
    blocks[:, :, v * hz + 1] = cr
    comp = np.array([0] * (v * hz) + [1, 2], dtype=np.uint8)
    return blocks.reshape(-1, 64), np.tile(comp, mh * mw)


def _headers(width, height, luma_q, chroma_q, sub):
    out = bytearray(b"\xff\xd8")
    out += b"\xff\xe0" + struct.pack(">H5sBBBHHBB", 16, b"JFIF\0", 1, 1, 0, 1, 1, 0, 0)
    for tid, table in enumerate((luma_q, chroma_q)):
        out += b"\xff\xdb" + struct.pack(">HB", 67, tid) + bytes(table[ZIGZAG].astype(np.uint8))
    samp = 0x22 if sub else 0x11
    out += b"\xff\xc0" + struct.pack(">HBHHB", 17, 8, height, width, 3)
    out += bytes([1, samp, 0, 2, 0x11, 1, 3, 0x11, 1])
    for cls, tid, bits, vals in (
        (0, 0, _DC_LUMA_BITS, _DC_VALS), (1, 0, _AC_LUMA_BITS, _AC_LUMA_VALS),
        (0, 1, _DC_CHROMA_BITS, _DC_VALS), (1, 1, _AC_CHROMA_BITS, _AC_CHROMA_VALS),
    ):
        body = bytes([(cls << 4) | tid]) + bytes(bits) + bytes(vals)
        out += b"\xff\xc4" + struct.pack(">H", len(body) + 2) + body
    out += b"\xff\xda" + struct.pack(">HB", 12, 3) + bytes([1, 0x00, 2, 0x11, 3, 0x11, 0, 63, 0])
    return bytes(out)


def encode(img, quality):
    pixels = img.pixels if hasattr(img, "pixels") else img
    if quality not in (0, 100):
        raise ValueError("quality must be 0 or 100")
    h, w = pixels.shape[:2]
    sub = quality == 0
    hz = v = 2 if sub else 1
    luma_q = quant_table(_LUMA_Q, quality)
    chroma_q = quant_table(_CHROMA_Q, quality)
    y, cb, cr = rgb_to_ycc(pixels)

    mw = -(-w // (8 * hz))
    mh = -(-h // (8 * v))
    ybw, ybh = -(-w // 8), -(-h // 8)
    yq = _component_blocks(_pad_edge(y, ybh * 8, ybw * 8), ybh, ybw, luma_q)
    ygrid = _expand_dummies(yq, mh, mw, v, hz)

    if sub:
        rows = h + (h & 1)
        chroma = []
        for plane in (cb, cr):
            full = _pad_edge(plane, rows, mw * 16)
            ds = _downsample_h2v2(full)
            chroma.append(_pad_edge(ds, mh * 8, mw * 8))
    else:
        chroma = [_pad_edge(p, mh * 8, mw * 8) for p in (cb, cr)]
    cbq = _component_blocks(chroma[0], mh, mw, chroma_q)
    crq = _component_blocks(chroma[1], mh, mw, chroma_q)

    blocks, comp = _scan_order(ygrid, cbq, crq, mh, mw, v, hz)
    data = kernels.jpeg_entropy(blocks.astype(np.int32), comp, _DC_TABLES, _AC_TABLES, (0, 1, 1))
    return _headers(w, h, luma_q, chroma_q, sub) + data + b"\xff\xd9"


def size(img, quality):
    return len(encode(img, quality))
