"""Points of the inverse limit, realized as finite-depth cylinder anchors.

An anchor ``(D, i, j)`` stands for every point whose level-``D`` coordinate
is ``v_{D,i,j}`` with ``0 < j < l(D,i)``. All such points share their orbit
for the next ``remn = l(D,i) - j`` steps, which is the horizon of the anchor.
The fixed point ``p`` (all base vertices) is the only anchor with no horizon.

Orbit segments are produced as runs: maximal stretches during which the
level-N coordinate either sits on the base vertex or advances through one
traversal of a single circuit. Searches work on runs, never step by step.
"""
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .errors import HorizonExhausted
from .graph import GraphHom
from .tower import VertexRef


@dataclass(frozen=True)
class PointAnchor:
    depth: int
    circuit: int
    position: int

    @classmethod
    def fixed(cls):
        return FIXED_POINT

    @property
    def is_fixed(self):
        return self.circuit == 0

    def vertex(self):
        return VertexRef(self.depth, self.circuit, self.position)

    def __str__(self):
        if self.is_fixed:
            return "p"
        return f"{self.depth}:{self.circuit}:{self.position}"


FIXED_POINT = PointAnchor(0, 0, 0)


def make_anchor(t, depth, circuit, position):
    length = t.circuit_length(depth, circuit)
    if not 0 < position < length:
        raise ValueError(f"anchor position must satisfy 0 < {position} < {length}")
    return PointAnchor(depth, circuit, position)


def parse_anchor(t, text):
    """Parse ``"D:i:j"`` (decimal, arbitrary size) or ``"p"`` for the fixed point."""
    text = text.strip()
    if text == "p":
        return FIXED_POINT
    try:
        depth, circuit, position = (int(part) for part in text.split(":"))
    except ValueError:
        raise ValueError(f"anchor must look like D:i:j or p, got {text!r}") from None
    return make_anchor(t, depth, circuit, position)


def anchor_from_vertex(v):
    if v.is_base:
        raise ValueError("an anchor cannot sit on the base vertex")
    return PointAnchor(v.level, v.circuit, v.position)


def project_vertex(t, v, m):
    """Image of ``v`` at level ``m`` by positional descent through the templates."""
    if m > v.level:
        raise ValueError(f"cannot project level {v.level} up to level {m}")
    n, i, j = v.level, v.circuit, v.position
    while n > m and i:
        i, j = t.descend(n, i, j)
        n -= 1
    return VertexRef(m, i, j)


def thread(t, a, depth=None):
    """Coordinates ``x_0 .. x_D`` of the anchor's cylinder."""
    if a.is_fixed:
        depth = t.depth if depth is None else depth
        return tuple(VertexRef(n) for n in range(depth + 1))
    top = a.vertex()
    out = [top]
    for n in range(a.depth - 1, -1, -1):
        out.append(project_vertex(t, out[-1], n))
    return tuple(reversed(out))


def remn(t, v):
    """Steps left along ``v``'s circuit until the base vertex."""
    if v.is_base:
        raise ValueError("remn is undefined on the base vertex")
    return t.circuit_length(v.level, v.circuit) - v.position


def deg(v):
    return math.inf if v.is_base else v.circuit


def horizon(t, a):
    """Number of steps an anchor determines (infinite for the fixed point)."""
    return math.inf if a.is_fixed else remn(t, a.vertex())


class Run(NamedTuple):
    """Times ``start .. start+length`` of a level-N trace.

    ``circuit == 0`` means the base vertex throughout; otherwise the vertex at
    time ``start + s`` is position ``pos + s`` of that circuit (the base when
    that position is 0 or the circuit length). Consecutive runs share their
    boundary time, which is always a base time except at the window ends.
    """

    start: int
    length: int
    circuit: int
    pos: int


def _runs(t, n, i, lo, hi, N, t0):
    if n == N:
        yield Run(t0, hi - lo, i, lo)
        return
    tokens, starts = t.template(n - 1, i)
    k = 0
    # skip whole tokens that end at or before lo
    while starts[k + 1] <= lo:
        k += 1
    lengths = t._lengths[n - 1]
    while k < len(tokens) and starts[k] < hi:
        sym, rep = tokens[k]
        s, e = starts[k], starts[k + 1]
        a, b = max(lo, s), min(hi, e)
        if sym == 0:
            yield Run(t0 + a - lo, b - a, 0, 0)
        else:
            unit = lengths[sym]
            q = (a - s) // unit
            while True:
                rs = s + q * unit
                if rs >= b:
                    break
                sub_lo, sub_hi = max(a, rs) - rs, min(b, rs + unit) - rs
                yield from _runs(t, n - 1, sym, sub_lo, sub_hi, N, t0 + rs + sub_lo - lo)
                q += 1
        k += 1


def level_runs(t, a, N, k=None):
    """Runs covering times ``0..k`` of the level-``N`` trace of anchor ``a``.

    ``k`` defaults to the full horizon. The fixed point gives one base run.
    """
    if a.is_fixed:
        if k is None:
            raise ValueError("the fixed point has an unbounded horizon; pass k")
        yield Run(0, k, 0, 0)
        return
    if N > a.depth:
        raise ValueError(f"resolution {N} is deeper than the anchor depth {a.depth}")
    limit = remn(t, a.vertex())
    k = limit if k is None else k
    if k > limit:
        raise HorizonExhausted(k, limit)
    if k == 0:
        v = project_vertex(t, a.vertex(), N)
        yield Run(0, 0, v.circuit, v.position)
        return
    yield from _runs(t, a.depth, a.circuit, a.position, a.position + k, N, 0)


# longest horizon for which run tables are built (and cached on the tower)
TABLE_LIMIT = 1 << 20


def run_table(t, a, N):
    """Full-horizon level-N runs of ``a`` as int64 rows ``(start, length, circuit, pos)``.

    Tables are cached on the tower. Returns None for the fixed point and for
    horizons beyond ``TABLE_LIMIT``; callers then fall back to :func:`level_runs`.
    """
    key = (a.depth, a.circuit, a.position, N)
    cache = t.__dict__.setdefault("_run_tables", {})
    table = cache.get(key, False)
    if table is False:
        if a.is_fixed or remn(t, a.vertex()) > TABLE_LIMIT:
            table = None
        else:
            table = np.array(list(level_runs(t, a, N)), dtype=np.int64).reshape(-1, 4)
            table.setflags(write=False)
        cache[key] = table
    return table


def level_lengths(t, N):
    """``l(N, i)`` indexed by ``i`` (entry 0 is the loop) as an int64 array."""
    cache = t.__dict__.setdefault("_length_rows", {})
    row = cache.get(N)
    if row is None:
        row = np.array(t._lengths[N], dtype=np.int64)
        cache[N] = row
    return row


def run_vertex(t, N, run, time):
    """Level-N vertex of ``run`` at absolute ``time`` (canonical)."""
    if run.circuit == 0:
        return VertexRef(N)
    p = run.pos + time - run.start
    if p == t.circuit_length(N, run.circuit):
        return VertexRef(N)
    return VertexRef(N, run.circuit, p)


def orbit_trace(t, a, N, k):
    """Level-``N`` coordinates of ``f^0(x) .. f^k(x)`` for points ``x`` of the anchor."""
    out = []
    for run in level_runs(t, a, N, k):
        first = run.start if not out else run.start + 1
        if run.circuit == 0:
            out.extend([VertexRef(N)] * (run.start + run.length - first + 1))
        else:
            for time in range(first, run.start + run.length + 1):
                out.append(run_vertex(t, N, run, time))
    return out


def orbit_trace_stepwise(t, a, N, k):
    """Reference trace: one positional descent per step."""
    if a.is_fixed:
        return [VertexRef(N)] * (k + 1)
    limit = remn(t, a.vertex())
    if k > limit:
        raise HorizonExhausted(k, limit)
    return [project_vertex(t, t.vertex(a.depth, a.circuit, a.position + s), N)
            for s in range(k + 1)]


def trace_ids(t, trace):
    return np.array([t.vertex_id(v) for v in trace], dtype=np.int64)


def trace_csv(trace):
    lines = ["t,vertex,level,circuit,position"]
    for time, v in enumerate(trace):
        lines.append(f"{time},{v},{v.level},{v.circuit},{v.position}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class DyadicDistance:
    """``2**-exponent``; when ``exact`` is false this is only an upper bound."""

    exponent: int
    exact: bool

    @property
    def value(self):
        return Fraction(1, 2**self.exponent)

    def __str__(self):
        return f"2^-{self.exponent}" if self.exact else f"<=2^-{self.exponent}"


def distance(t, x, y):
    """Distance ``2**-m`` for the least level ``m`` where two threads differ."""
    if len(x) != len(y):
        raise ValueError("threads of different depth")
    for m, (u, v) in enumerate(zip(x, y)):
        if u != v:
            return DyadicDistance(m, True)
    return DyadicDistance(len(x), False)


def lift_anchor(t, a, which=0):
    """An anchor one level deeper inside the cylinder of ``a``.

    The result lies in ``c_{D+1,i}`` for ``a = (D, i, j)``; ``which`` picks
    among the repetitions of ``C_i`` in the rewrite of ``c_{D+1,i}``.
    """
    if a.is_fixed:
        return a
    tokens, starts = t.template(a.depth, a.circuit)
    for k, (sym, rep) in enumerate(tokens):
        if sym == a.circuit:
            if not 0 <= which < rep:
                raise IndexError(f"only {rep} preimages inside c_{{{a.depth + 1},{a.circuit}}}")
            unit = t.circuit_length(a.depth, a.circuit)
            return PointAnchor(a.depth + 1, a.circuit, starts[k] + which * unit + a.position)
    raise ValueError(f"c_{{{a.depth + 1},{a.circuit}}} does not cover c_{{{a.depth},{a.circuit}}}")


def projection_hom(t, n, m):
    """``phi_{n,m}`` between materialized levels, built pointwise by positional descent."""
    source = t.materialize_level(n)
    target = t.materialize_level(m)
    image = np.array([t.vertex_id(project_vertex(t, t.vertex_ref(n, vid), m))
                      for vid in source.vertex_ids.tolist()], dtype=np.int64)
    return GraphHom(source, target, image)
