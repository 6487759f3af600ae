"""Pure-Python fallback for the compiled kernels.

Inputs are one-dimensional int64 numpy arrays; loops run over plain lists.
"""
import numpy as np


def fanout_conflicts(keys, values, n_keys):
    """Count entries whose value differs from the first value seen for its key."""
    first = [None] * n_keys
    conflicts = 0
    for k, v in zip(keys.tolist(), values.tolist()):
        f = first[k]
        if f is None:
            first[k] = v
        elif f != v:
            conflicts += 1
    return conflicts


def find_occurrences(walk, pattern):
    """Start indices of every contiguous copy of ``pattern`` in ``walk`` (naive scan)."""
    w = walk.tolist()
    p = pattern.tolist()
    m = len(p)
    if m == 0:
        return np.arange(len(w) + 1, dtype=np.int64)
    head = p[0]
    out = [s for s in range(len(w) - m + 1) if w[s] == head and w[s:s + m] == p]
    return np.asarray(out, dtype=np.int64)


def first_invalid_step(walk, indptr, indices):
    """Index t of the first pair (walk[t], walk[t+1]) that is not an edge, or -1.

    Adjacency is given in CSR form over compact vertex indices.
    """
    ptr = indptr.tolist()
    idx = indices.tolist()
    w = walk.tolist()
    for t in range(len(w) - 1):
        u = w[t]
        if w[t + 1] not in idx[ptr[u]:ptr[u + 1]]:
            return t
    return -1


def _holds(mode, a, b):
    if mode == 0:
        return a != b
    if mode == 1:
        return a == b
    if mode == 2:
        return a[0] == 0 and b[0] == 0
    return a[0] != b[0]


def pair_scan(xs, ys, end, lengths, mode, last):
    """First (or last) probe time at which ``mode`` holds on two run tables, else -1.

    Tables have rows ``(start, length, circuit, pos)`` covering ``0..end`` or
    more. Overlaps of rows are probed at their start, start + 1 and end, which
    is exact because coordinates move in lockstep inside an overlap. Modes:
    0 differ, 1 agree, 2 both on the base, 3 different degrees.
    """
    X, Y, L = xs.tolist(), ys.tolist(), lengths.tolist()

    def coord(row, s):
        c = row[2]
        if c == 0:
            return (0, 0)
        p = row[3] + s - row[0]
        return (0, 0) if p == 0 or p == L[c] else (c, p)

    i = j = 0
    found = -1
    while i < len(X) and j < len(Y):
        rx, ry = X[i], Y[j]
        ex, ey = rx[0] + rx[1], ry[0] + ry[1]
        a, b = max(rx[0], ry[0]), min(ex, ey, end)
        if a + 1 <= b:
            probes = (b, b - 1, a) if last else (a, a + 1, b)
        else:
            probes = (a,)
        for s in probes:
            if _holds(mode, coord(rx, s), coord(ry, s)):
                if not last:
                    return s
                found = max(found, s)
                break
        if ex >= end and ey >= end:
            break
        if ex <= ey:
            i += 1
        if ey <= ex:
            j += 1
    return found
