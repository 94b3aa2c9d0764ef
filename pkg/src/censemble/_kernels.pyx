# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops. Output must match ``_pykernels`` byte for byte."""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()

cdef enum:
    LZW_MAX_CODE = 4095


cdef struct BitWriter:
    unsigned char *buf
    Py_ssize_t pos
    Py_ssize_t cap
    unsigned long long acc
    int nbits


cdef int _grow(BitWriter *w, Py_ssize_t extra) except -1:
    cdef Py_ssize_t ncap
    cdef unsigned char *nbuf
    if w.pos + extra <= w.cap:
        return 0
    ncap = w.cap * 2 + extra
    nbuf = <unsigned char *> malloc(ncap)
    if nbuf == NULL:
        raise MemoryError()
    if w.pos:
        memcpy_bytes(nbuf, w.buf, w.pos)
    free(w.buf)
    w.buf = nbuf
    w.cap = ncap
    return 0


cdef inline void memcpy_bytes(unsigned char *dst, unsigned char *src, Py_ssize_t n):
    cdef Py_ssize_t i
    for i in range(n):
        dst[i] = src[i]


cdef inline int _put_lsb(BitWriter *w, unsigned int code, int width) except -1:
    w.acc |= (<unsigned long long> code) << w.nbits
    w.nbits += width
    while w.nbits >= 8:
        if w.pos >= w.cap:
            _grow(w, 1024)
        w.buf[w.pos] = <unsigned char> (w.acc & 0xFF)
        w.pos += 1
        w.acc >>= 8
        w.nbits -= 8
    return 0


def lzw_encode(indices, int min_code_size):
    cdef const unsigned char[::1] data = np.ascontiguousarray(indices, dtype=np.uint8).ravel()
    cdef Py_ssize_t n = data.shape[0]
    cdef int clear = 1 << min_code_size
    cdef int eoi = clear + 1
    cdef int width = min_code_size + 1
    cdef int next_code = eoi + 1
    cdef int *child = <int *> malloc(4096 * 256 * sizeof(int))
    cdef int *used = <int *> malloc(4096 * sizeof(int))
    cdef int nused = 0
    cdef int prefix, code, key, j
    cdef Py_ssize_t i
    cdef unsigned char sym
    cdef BitWriter w
    if child == NULL or used == NULL:
        free(child)
        free(used)
        raise MemoryError()
    for j in range(4096 * 256):
        child[j] = -1
    w.cap = n // 2 + 1024
    w.buf = <unsigned char *> malloc(w.cap)
    w.pos = 0
    w.acc = 0
    w.nbits = 0
    try:
        _put_lsb(&w, clear, width)
        if n > 0:
            prefix = data[0]
            for i in range(1, n):
                sym = data[i]
                key = (prefix << 8) | sym
                code = child[key]
                if code >= 0:
                    prefix = code
                    continue
                _put_lsb(&w, prefix, width)
                if next_code >= LZW_MAX_CODE:
                    _put_lsb(&w, clear, width)
                    for j in range(nused):
                        child[used[j]] = -1
                    nused = 0
                    width = min_code_size + 1
                    next_code = eoi + 1
                else:
                    if next_code >= (1 << width):
                        width += 1
                    child[key] = next_code
                    used[nused] = key
                    nused += 1
                    next_code += 1
                prefix = sym
            _put_lsb(&w, prefix, width)
            if next_code >= (1 << width) and width < 12:
                width += 1
        _put_lsb(&w, eoi, width)
        if w.nbits > 0:
            _put_lsb(&w, 0, 8 - w.nbits)
        return bytes(w.buf[:w.pos])
    finally:
        free(child)
        free(used)
        free(w.buf)


def palette_index(packed, int limit):
    cdef const cnp.uint32_t[::1] flat = np.ascontiguousarray(packed, dtype=np.uint32).ravel()
    cdef Py_ssize_t n = flat.shape[0]
    cdef int size = 1
    while size < 4 * (limit + 1):
        size <<= 1
    cdef int mask = size - 1
    keys_arr = np.zeros(size, dtype=np.int64)
    slot_arr = np.zeros(size, dtype=np.int32)
    cdef cnp.int64_t[::1] keys = keys_arr
    cdef cnp.int32_t[::1] slots = slot_arr
    order_arr = np.zeros(limit + 1, dtype=np.uint32)
    cdef cnp.uint32_t[::1] order = order_arr
    index_arr = np.empty(n, dtype=np.uint8)
    cdef cnp.uint8_t[::1] index = index_arr
    cdef int ncolors = 0
    cdef Py_ssize_t i
    cdef cnp.int64_t k
    cdef unsigned int hval
    for i in range(n):
        k = <cnp.int64_t> flat[i] + 1
        hval = (<unsigned int> flat[i] * 2654435761u) >> 8
        hval &= mask
        while keys[hval] != 0 and keys[hval] != k:
            hval = (hval + 1) & mask
        if keys[hval] == 0:
            if ncolors >= limit:
                return None
            keys[hval] = k
            slots[hval] = ncolors
            order[ncolors] = flat[i]
            ncolors += 1
        index[i] = <cnp.uint8_t> slots[hval]
    first_seen = order_arr[:ncolors]
    rank = np.argsort(first_seen, kind="stable")
    remap = np.empty(ncolors, dtype=np.uint8)
    remap[rank] = np.arange(ncolors, dtype=np.uint8)
    return first_seen[rank].copy(), remap[index_arr].reshape(np.shape(packed))


cdef inline int _put_msb(BitWriter *w, unsigned int code, int length) except -1:
    cdef unsigned char byte
    w.acc = (w.acc << length) | code
    w.nbits += length
    while w.nbits >= 8:
        if w.pos + 2 > w.cap:
            _grow(w, 4096)
        byte = <unsigned char> ((w.acc >> (w.nbits - 8)) & 0xFF)
        w.buf[w.pos] = byte
        w.pos += 1
        if byte == 0xFF:
            w.buf[w.pos] = 0
            w.pos += 1
        w.nbits -= 8
    w.acc &= ((<unsigned long long> 1) << w.nbits) - 1
    return 0


cdef inline int _bitlen(int v):
    cdef int nb = 0
    while v:
        nb += 1
        v >>= 1
    return nb


def jpeg_entropy(blocks, comp, dc_tables, ac_tables, tbl_sel):
    cdef const cnp.int32_t[:, ::1] blk = np.ascontiguousarray(blocks, dtype=np.int32)
    cdef const cnp.uint8_t[::1] cmp = np.ascontiguousarray(comp, dtype=np.uint8)
    dcc = np.ascontiguousarray([np.asarray(tb[0], dtype=np.uint32) for tb in dc_tables])
    dcl = np.ascontiguousarray([np.asarray(tb[1], dtype=np.int32) for tb in dc_tables])
    acc_ = np.ascontiguousarray([np.asarray(tb[0], dtype=np.uint32) for tb in ac_tables])
    acl = np.ascontiguousarray([np.asarray(tb[1], dtype=np.int32) for tb in ac_tables])
    sel = np.ascontiguousarray(tbl_sel, dtype=np.int32)
    cdef const cnp.uint32_t[:, ::1] dc_codes = dcc
    cdef const cnp.int32_t[:, ::1] dc_lens = dcl
    cdef const cnp.uint32_t[:, ::1] ac_codes = acc_
    cdef const cnp.int32_t[:, ::1] ac_lens = acl
    cdef const cnp.int32_t[::1] tsel = sel
    cdef Py_ssize_t nblocks = blk.shape[0]
    cdef Py_ssize_t b
    cdef int k, c, t, diff, mag, nb, run, v, sym
    cdef int last_dc[4]
    cdef BitWriter w
    last_dc[0] = last_dc[1] = last_dc[2] = last_dc[3] = 0
    w.cap = nblocks * 16 + 4096
    w.buf = <unsigned char *> malloc(w.cap)
    if w.buf == NULL:
        raise MemoryError()
    w.pos = 0
    w.acc = 0
    w.nbits = 0
    try:
        for b in range(nblocks):
            c = cmp[b]
            t = tsel[c]
            diff = blk[b, 0] - last_dc[c]
            last_dc[c] = blk[b, 0]
            mag = -diff if diff < 0 else diff
            nb = _bitlen(mag)
            _put_msb(&w, dc_codes[t, nb], dc_lens[t, nb])
            if nb:
                if diff < 0:
                    diff = (diff - 1) & ((1 << nb) - 1)
                _put_msb(&w, diff, nb)
            run = 0
            for k in range(1, 64):
                v = blk[b, k]
                if v == 0:
                    run += 1
                    continue
                while run > 15:
                    _put_msb(&w, ac_codes[t, 0xF0], ac_lens[t, 0xF0])
                    run -= 16
                mag = -v if v < 0 else v
                nb = _bitlen(mag)
                sym = (run << 4) | nb
                _put_msb(&w, ac_codes[t, sym], ac_lens[t, sym])
                if v < 0:
                    v = (v - 1) & ((1 << nb) - 1)
                _put_msb(&w, v, nb)
                run = 0
            if run > 0:
                _put_msb(&w, ac_codes[t, 0], ac_lens[t, 0])
        if w.nbits:
            nb = 8 - w.nbits
            _put_msb(&w, (1 << nb) - 1, nb)
        return bytes(w.buf[:w.pos])
    finally:
        free(w.buf)


def fs_dither(gray):
    work_arr = np.array(gray, dtype=np.float64, copy=True, order="C")
    cdef double[:, ::1] work = work_arr
    cdef Py_ssize_t h = work.shape[0]
    cdef Py_ssize_t w = work.shape[1]
    out_arr = np.zeros((h, w), dtype=np.uint8)
    cdef cnp.uint8_t[:, ::1] out = out_arr
    cdef Py_ssize_t y, x
    cdef double old, new, err
    for y in range(h):
        for x in range(w):
            old = work[y, x]
            new = 1.0 if old >= 0.5 else 0.0
            if new != 0.0:
                out[y, x] = 255
            err = old - new
            if x + 1 < w:
                work[y, x + 1] += err * 0.4375
            if y + 1 < h:
                if x > 0:
                    work[y + 1, x - 1] += err * 0.1875
                work[y + 1, x] += err * 0.3125
                if x + 1 < w:
                    work[y + 1, x + 1] += err * 0.0625
    return out_arr


cdef long long _seg_priority(cnp.int64_t[:, ::1] vals, cnp.int64_t[::1] counts,
                             cnp.int64_t[::1] perm, Py_ssize_t start, Py_ssize_t end):
    cdef long long lo[3]
    cdef long long hi[3]
    cdef long long total = 0, extent = 0, v
    cdef Py_ssize_t i, c
    if end - start < 2:
        return 0
    for c in range(3):
        lo[c] = 1 << 30
        hi[c] = -(1 << 30)
    for i in range(start, end):
        total += counts[perm[i]]
        for c in range(3):
            v = vals[perm[i], c]
            if v < lo[c]:
                lo[c] = v
            if v > hi[c]:
                hi[c] = v
    for c in range(3):
        if hi[c] - lo[c] > extent:
            extent = hi[c] - lo[c]
    return total * extent


def median_cut_boxes(cells_val, counts, int n):
    vals_arr = np.ascontiguousarray(cells_val, dtype=np.int64)
    cnt_arr = np.ascontiguousarray(counts, dtype=np.int64)
    cdef cnp.int64_t[:, ::1] vals = vals_arr
    cdef cnp.int64_t[::1] cnt = cnt_arr
    cdef Py_ssize_t k = cnt.shape[0]
    perm_arr = np.arange(k, dtype=np.int64)
    tmp_arr = np.empty(k, dtype=np.int64)
    cdef cnp.int64_t[::1] perm = perm_arr
    cdef cnp.int64_t[::1] tmp = tmp_arr
    cdef Py_ssize_t cap = max(n, 1)
    starts_arr = np.zeros(cap, dtype=np.int64)
    ends_arr = np.zeros(cap, dtype=np.int64)
    prio_arr = np.zeros(cap, dtype=np.int64)
    cdef cnp.int64_t[::1] starts = starts_arr
    cdef cnp.int64_t[::1] ends = ends_arr
    cdef cnp.int64_t[::1] prio = prio_arr
    cdef Py_ssize_t nbox = 1, best, i, c, ch, s, e, nl, nr
    cdef long long p, total, half2, acc, v, cut, vmax, rng, best_rng
    cdef long long hist[32]
    cdef long long lo[3]
    cdef long long hi[3]
    ends[0] = k
    prio[0] = _seg_priority(vals, cnt, perm, 0, k)
    while nbox < n:
        best = -1
        p = 0
        for i in range(nbox):
            if prio[i] > p:
                p = prio[i]
                best = i
        if best < 0:
            break
        s = starts[best]
        e = ends[best]
        for c in range(3):
            lo[c] = 1 << 30
            hi[c] = -(1 << 30)
        total = 0
        for i in range(s, e):
            total += cnt[perm[i]]
            for c in range(3):
                v = vals[perm[i], c]
                if v < lo[c]:
                    lo[c] = v
                if v > hi[c]:
                    hi[c] = v
        ch = 0
        best_rng = hi[0] - lo[0]
        for c in range(1, 3):
            rng = hi[c] - lo[c]
            if rng > best_rng:
                best_rng = rng
                ch = c
        for i in range(32):
            hist[i] = 0
        for i in range(s, e):
            hist[vals[perm[i], ch]] += cnt[perm[i]]
        # smallest key whose cumulative count reaches half the total
        acc = 0
        cut = hi[ch]
        for i in range(32):
            acc += hist[i]
            if 2 * acc >= total:
                cut = i
                break
        vmax = hi[ch]
        if cut >= vmax:
            cut = vmax - 1
        # stable partition: key <= cut to the left
        nl = 0
        for i in range(s, e):
            if vals[perm[i], ch] <= cut:
                tmp[s + nl] = perm[i]
                nl += 1
        nr = nl
        for i in range(s, e):
            if vals[perm[i], ch] > cut:
                tmp[s + nr] = perm[i]
                nr += 1
        for i in range(s, e):
            perm[i] = tmp[i]
        ends[best] = s + nl
        starts[nbox] = s + nl
        ends[nbox] = e
        prio[best] = _seg_priority(vals, cnt, perm, s, s + nl)
        prio[nbox] = _seg_priority(vals, cnt, perm, s + nl, e)
        nbox += 1
    labels_arr = np.zeros(k, dtype=np.int64)
    cdef cnp.int64_t[::1] labels = labels_arr
    for i in range(nbox):
        for s in range(starts[i], ends[i]):
            labels[perm[s]] = i
    return labels_arr
