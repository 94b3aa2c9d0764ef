"""Pure-Python implementations of the hot inner loops.

These are the reference versions of the routines in ``_kernels.pyx``. Both
backends must produce identical output for identical input; the test-suite
checks this directly.
"""

import heapq

import numpy as np

LZW_MAX_CODE = 4095


def lzw_encode(indices, min_code_size):
    """GIF-flavoured LZW. Returns the packed code stream (no sub-blocks).

    Codes are packed LSB-first. The table is cleared when it reaches
    ``LZW_MAX_CODE`` entries, following giflib.
    """
    data = bytes(np.ascontiguousarray(indices, dtype=np.uint8).ravel())
    clear = 1 << min_code_size
    eoi = clear + 1
    width = min_code_size + 1
    next_code = eoi + 1
    table = {}
    out = bytearray()
    acc = 0
    nbits = 0

    acc |= clear << nbits
    nbits += width
    while nbits >= 8:
        out.append(acc & 0xFF)
        acc >>= 8
        nbits -= 8

    if data:
        prefix = data[0]
        for sym in data[1:]:
            key = (prefix << 8) | sym
            code = table.get(key)
            if code is not None:
                prefix = code
                continue
            acc |= prefix << nbits
            nbits += width
            while nbits >= 8:
                out.append(acc & 0xFF)
                acc >>= 8
                nbits -= 8
            if next_code >= LZW_MAX_CODE:
                acc |= clear << nbits
                nbits += width
                while nbits >= 8:
                    out.append(acc & 0xFF)
                    acc >>= 8
                    nbits -= 8
                table.clear()
                width = min_code_size + 1
                next_code = eoi + 1
            else:
                if next_code >= (1 << width):
                    width += 1
                table[key] = next_code
                next_code += 1
            prefix = sym
        acc |= prefix << nbits
        nbits += width
        while nbits >= 8:
            out.append(acc & 0xFF)
            acc >>= 8
            nbits -= 8
        if next_code >= (1 << width) and width < 12:
            width += 1

    acc |= eoi << nbits
    nbits += width
    while nbits > 0:
        out.append(acc & 0xFF)
        acc >>= 8
        nbits -= 8
    return bytes(out)


def palette_index(packed, limit):
    """Exact palette of a packed 0xRRGGBB array, or None past ``limit`` colors.

    Returns ``(keys, index)`` with ``keys`` sorted ascending and ``index`` a
    uint8 array of the same shape as ``packed``.
    """
    flat = np.ascontiguousarray(packed, dtype=np.uint32).ravel()
    keys, inverse = np.unique(flat, return_inverse=True)
    if len(keys) > limit:
        return None
    return keys.astype(np.uint32), inverse.astype(np.uint8).reshape(np.shape(packed))


def jpeg_entropy(blocks, comp, dc_tables, ac_tables, tbl_sel):
    """Baseline Huffman coding of zigzag-ordered quantized blocks.

    ``blocks`` is (n, 64) int32 in scan order, ``comp`` gives each block's
    component (for DC prediction), ``tbl_sel[c]`` picks the table pair for
    component ``c``. Tables are ``(codes, lengths)`` pairs of arrays.
    Returns the entropy-coded segment with 0xFF byte stuffing.
    """
    blocks = np.asarray(blocks, dtype=np.int64)
    out = bytearray()
    acc = 0
    nbits = 0
    last_dc = [0, 0, 0, 0]

    def put(code, length):
        nonlocal acc, nbits
        acc = (acc << length) | code
        nbits += length
        while nbits >= 8:
            byte = (acc >> (nbits - 8)) & 0xFF
            out.append(byte)
            if byte == 0xFF:
                out.append(0)
            nbits -= 8
        acc &= (1 << nbits) - 1

    for b in range(blocks.shape[0]):
        c = int(comp[b])
        t = int(tbl_sel[c])
        dc_codes, dc_lens = dc_tables[t]
        ac_codes, ac_lens = ac_tables[t]
        row = blocks[b]
        diff = int(row[0]) - last_dc[c]
        last_dc[c] = int(row[0])
        mag = -diff if diff < 0 else diff
        nb = mag.bit_length()
        put(int(dc_codes[nb]), int(dc_lens[nb]))
        if nb:
            put(diff if diff >= 0 else diff - 1 & ((1 << nb) - 1), nb)
        run = 0
        for k in range(1, 64):
            v = int(row[k])
            if v == 0:
                run += 1
                continue
            while run > 15:
                put(int(ac_codes[0xF0]), int(ac_lens[0xF0]))
                run -= 16
            mag = -v if v < 0 else v
            nb = mag.bit_length()
            sym = (run << 4) | nb
            put(int(ac_codes[sym]), int(ac_lens[sym]))
            put(v if v >= 0 else v - 1 & ((1 << nb) - 1), nb)
            run = 0
        if run > 0:
            put(int(ac_codes[0]), int(ac_lens[0]))
    if nbits:
        pad = 8 - nbits
        put((1 << pad) - 1, pad)
    return bytes(out)


def fs_dither(gray):
    """Floyd-Steinberg error diffusion of a [0,1] float image to 0/255."""
    work = np.array(gray, dtype=np.float64, copy=True)
    h, w = work.shape
    out = np.zeros((h, w), dtype=np.uint8)
    for y in range(h):
        row = work[y]
        nxt = work[y + 1] if y + 1 < h else None
        for x in range(w):
            old = row[x]
            new = 1.0 if old >= 0.5 else 0.0
            if new:
                out[y, x] = 255
            err = old - new
            if x + 1 < w:
                row[x + 1] += err * 0.4375
            if nxt is not None:
                if x > 0:
                    nxt[x - 1] += err * 0.1875
                nxt[x] += err * 0.3125
                if x + 1 < w:
                    nxt[x + 1] += err * 0.0625
    return out


def _split_box(cells_val, counts, members):
    """Split one box at the count median of its widest channel."""
    vals = cells_val[members]
    cnt = counts[members]
    ranges = vals.max(axis=0) - vals.min(axis=0)
    ch = int(np.argmax(ranges))
    key = vals[:, ch]
    order = np.argsort(key, kind="stable")
    key_sorted = key[order]
    cum = np.cumsum(cnt[order])
    pos = int(np.searchsorted(cum, cum[-1] / 2.0))
    cut = key_sorted[min(pos, len(key_sorted) - 1)]
    left_mask = key <= cut
    if left_mask.all():
        left_mask = key < cut
    right_mask = ~left_mask
    return (members[left_mask], members[right_mask],
            _box_priority(vals[left_mask], cnt[left_mask]),
            _box_priority(vals[right_mask], cnt[right_mask]))


def _box_priority(vals, cnt):
    if len(vals) < 2:
        return 0
    extent = int((vals.max(axis=0) - vals.min(axis=0)).max())
    return int(cnt.sum()) * extent


def median_cut_boxes(cells_val, counts, n):
    """Box label for every histogram cell after up to ``n`` median cuts.

    ``cells_val`` is (k, 3) cell coordinates, ``counts`` their pixel counts.
    The box with the largest count * extent is split next; ties go to the
    lower box index.
    """
    cells_val = np.asarray(cells_val, dtype=np.int64)
    counts = np.asarray(counts, dtype=np.int64)
    boxes = [np.arange(len(counts))]
    heap = [(-_box_priority(cells_val, counts), 0)]
    while len(boxes) < n and heap:
        neg, best = heapq.heappop(heap)
        if neg >= 0:
            break
        left, right, p_left, p_right = _split_box(cells_val, counts, boxes[best])
        boxes[best] = left
        boxes.append(right)
        for i, prio in ((best, p_left), (len(boxes) - 1, p_right)):
            if prio > 0:
                heapq.heappush(heap, (-prio, i))
    labels = np.zeros(len(counts), dtype=np.int64)
    for i, members in enumerate(boxes):
        labels[members] = i
    return labels
