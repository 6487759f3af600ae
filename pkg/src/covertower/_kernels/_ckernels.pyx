# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled versions of the loops in ``_pykernels``.

Every function here must return exactly what its pure-Python twin returns.
"""
import numpy as np

cimport numpy as cnp

ctypedef cnp.int64_t i64


def fanout_conflicts(const i64[::1] keys, const i64[::1] values, Py_ssize_t n_keys):
    cdef Py_ssize_t n = keys.shape[0]
    cdef Py_ssize_t t
    cdef i64 k
    cdef i64 conflicts = 0
    first_arr = np.zeros(n_keys, dtype=np.int64)
    seen_arr = np.zeros(n_keys, dtype=np.uint8)
    cdef i64[::1] first = first_arr
    cdef cnp.uint8_t[::1] seen = seen_arr
    for t in range(n):
        k = keys[t]
        if not seen[k]:
            seen[k] = 1
            first[k] = values[t]
        elif first[k] != values[t]:
            conflicts += 1
    return conflicts


def find_occurrences(const i64[::1] walk, const i64[::1] pattern):
    cdef Py_ssize_t n = walk.shape[0]
    cdef Py_ssize_t m = pattern.shape[0]
    cdef Py_ssize_t s, q
    cdef Py_ssize_t count = 0
    out_arr = np.empty(max(n - m + 1, 0), dtype=np.int64)
    cdef i64[::1] out = out_arr
    if m == 0:
        return np.arange(n + 1, dtype=np.int64)
    for s in range(n - m + 1):
        q = 0
        while q < m and walk[s + q] == pattern[q]:
            q += 1
        if q == m:
            out[count] = s
            count += 1
    return out_arr[:count].copy()


def first_invalid_step(const i64[::1] walk, const i64[::1] indptr, const i64[::1] indices):
    cdef Py_ssize_t n = walk.shape[0]
    cdef Py_ssize_t t
    cdef i64 u, v, p
    cdef bint ok
    for t in range(n - 1):
        u = walk[t]
        v = walk[t + 1]
        ok = False
        for p in range(indptr[u], indptr[u + 1]):
            if indices[p] == v:
                ok = True
                break
        if not ok:
            return t
    return -1


cdef inline void _coord(const i64[:, ::1] runs, Py_ssize_t r, i64 s,
                        const i64[::1] lengths, i64* c, i64* p):
    cdef i64 circ = runs[r, 2]
    cdef i64 pos
    if circ == 0:
        c[0] = 0
        p[0] = 0
        return
    pos = runs[r, 3] + s - runs[r, 0]
    if pos == 0 or pos == lengths[circ]:
        c[0] = 0
        p[0] = 0
    else:
        c[0] = circ
        p[0] = pos


cdef inline bint _holds(int mode, i64 cx, i64 px, i64 cy, i64 py):
    if mode == 0:
        return cx != cy or px != py
    if mode == 1:
        return cx == cy and px == py
    if mode == 2:
        return cx == 0 and cy == 0
    return cx != cy


def pair_scan(const i64[:, ::1] xs, const i64[:, ::1] ys, i64 end,
              const i64[::1] lengths, int mode, bint last):
    cdef Py_ssize_t i = 0, j = 0, q, nprobe
    cdef Py_ssize_t nx = xs.shape[0], ny = ys.shape[0]
    cdef i64 a, b, ex, ey, s, cx, px, cy, py
    cdef i64 found = -1
    cdef i64 probes[3]
    while i < nx and j < ny:
        ex = xs[i, 0] + xs[i, 1]
        ey = ys[j, 0] + ys[j, 1]
        a = xs[i, 0] if xs[i, 0] > ys[j, 0] else ys[j, 0]
        b = ex if ex < ey else ey
        if b > end:
            b = end
        if a + 1 <= b:
            nprobe = 3
            if last:
                probes[0] = b; probes[1] = b - 1; probes[2] = a
            else:
                probes[0] = a; probes[1] = a + 1; probes[2] = b
        else:
            nprobe = 1
            probes[0] = a
        for q in range(nprobe):
            s = probes[q]
            _coord(xs, i, s, lengths, &cx, &px)
            _coord(ys, j, s, lengths, &cy, &py)
            if _holds(mode, cx, px, cy, py):
                if not last:
                    return s
                if s > found:
                    found = s
                break
        if ex >= end and ey >= end:
            break
        if ex <= ey:
            i += 1
        if ey <= ex:
            j += 1
    return found
