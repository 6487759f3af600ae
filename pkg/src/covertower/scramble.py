"""Finite-horizon checks of scrambling, transitivity and the failure of equicontinuity.

Every search here works on the runs of :func:`covertower.points.level_runs`.
Inside the open interior of an overlap of two runs both level-N coordinates
either sit on the base vertex or advance in lockstep through fixed circuits,
so any predicate built from vertex equality and degree is constant there.
Checking the two endpoints and one interior time per overlap is therefore
exact, and the cost depends on the number of runs rather than on the horizon.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ExplicitLimitExceeded, HorizonExhausted, NoDivergenceWithinHorizon
from .points import (
    TABLE_LIMIT, FIXED_POINT, DyadicDistance, PointAnchor, Run, _runs, deg, horizon, level_lengths,
    level_runs, lift_anchor, project_vertex, remn, run_table, thread,
)
from .tower import VertexRef


def _run_end(run):
    return run.start + run.length


def _base_intervals(t, a, N, k):
    """Merged closed intervals of times in ``0..k`` at which the trace is on the base."""
    cur = None
    for run in level_runs(t, a, N, k):
        if run.circuit == 0:
            span = (run.start, _run_end(run))
        else:
            spans = []
            if run.pos == 0:
                spans.append((run.start, run.start))
            if run.pos + run.length == t.circuit_length(N, run.circuit):
                spans.append((_run_end(run), _run_end(run)))
            for span in spans:
                if cur is not None and span[0] <= cur[1]:
                    cur = (cur[0], max(cur[1], span[1]))
                else:
                    if cur is not None:
                        yield cur
                    cur = span
            continue
        if cur is not None and span[0] <= cur[1]:
            cur = (cur[0], max(cur[1], span[1]))
        else:
            if cur is not None:
                yield cur
            cur = span
    if cur is not None:
        yield cur


def _common_horizon(t, *anchors):
    h = min(horizon(t, a) for a in anchors)
    return 0 if h == math.inf else h


def _check_resolution(N, *anchors):
    for a in anchors:
        if not a.is_fixed and a.depth < N:
            raise ValueError(f"anchor {a} is shallower than resolution {N}")


def first_meet_base(t, a, N):
    """Least ``t`` with the level-N coordinate on the base vertex."""
    _check_resolution(N, a)
    if a.is_fixed:
        return 0
    for lo, _ in _base_intervals(t, a, N, None):
        return lo
    raise AssertionError("the anchor circuit always ends on the base vertex")


def visit_count(t, a, tau, k):
    """Number of times ``0..k`` at which the level-N coordinate equals ``tau``."""
    N = tau.level
    _check_resolution(N, a)
    if a.is_fixed:
        return k + 1 if tau.is_base else 0
    limit = remn(t, a.vertex())
    if k > limit:
        raise HorizonExhausted(k, limit)
    if tau.is_base:
        return sum(hi - lo + 1 for lo, hi in _base_intervals(t, a, N, k))
    count = 0
    for run in level_runs(t, a, N, k):
        if run.circuit == tau.circuit and run.pos <= tau.position <= run.pos + run.length:
            count += 1
    return count


def gap_at_level(t, x, y, n):
    """``j' - j`` when both level-n coordinates are in one circuit off the base, else None."""
    u = thread(t, x, n)[n] if not x.is_fixed else VertexRef(n)
    v = thread(t, y, n)[n] if not y.is_fixed else VertexRef(n)
    if u.is_base or v.is_base or u.circuit != v.circuit:
        return None
    return v.position - u.position


def same_orbit_detect(t, x, y, levels):
    """The shift ``d`` with ``y = f^d(x)`` if the gap is defined and constant over ``levels``."""
    gaps = {gap_at_level(t, x, y, n) for n in levels}
    if len(gaps) != 1:
        return None
    (d,) = gaps
    return d


def _joint_base_times(t, x, y, N, k):
    if x.is_fixed and y.is_fixed:
        yield (0, k)
        return
    if x.is_fixed or y.is_fixed:
        yield from _base_intervals(t, y if x.is_fixed else x, N, k)
        return
    xs, ys = _base_intervals(t, x, N, k), _base_intervals(t, y, N, k)
    p, q = next(xs, None), next(ys, None)
    while p is not None and q is not None:
        lo, hi = max(p[0], q[0]), min(p[1], q[1])
        if lo <= hi:
            yield (lo, hi)
        if p[1] < q[1]:
            p = next(xs, None)
        else:
            q = next(ys, None)


def joint_meet(t, x, y, N, k=None):
    """Least time at which both level-N coordinates are on the base vertex, or None."""
    _check_resolution(N, x, y)
    k = _common_horizon(t, x, y) if k is None else k
    found = _table_scan(t, x, y, N, k, both_base, False)
    if found is not NotImplemented:
        return found
    for lo, _ in _joint_base_times(t, x, y, N, k):
        return lo
    return None


def last_joint_meet(t, x, y, N, k=None):
    """Latest such time within the horizon, or None."""
    _check_resolution(N, x, y)
    k = _common_horizon(t, x, y) if k is None else k
    found = _table_scan(t, x, y, N, k, both_base, True)
    if found is not NotImplemented:
        return found
    last = None
    for _, hi in _joint_base_times(t, x, y, N, k):
        last = hi
    return last


def _merge(xs, ys, end):
    """Overlaps ``(a, b, rx, ry)`` of two run streams that both cover ``..end``."""
    rx, ry = next(xs), next(ys)
    while True:
        ex, ey = _run_end(rx), _run_end(ry)
        yield max(rx.start, ry.start), min(ex, ey), rx, ry
        if ex >= end and ey >= end:
            return
        if ex <= ey:
            rx = next(xs)
        if ey <= ex:
            ry = next(ys)


def _segments(t, x, y, N, k):
    return _merge(level_runs(t, x, N, k), level_runs(t, y, N, k), k)


def _coord(lengths, run, time):
    """``(circuit, position)`` of ``run`` at ``time``; the base is ``(0, 0)``."""
    c = run.circuit
    if c == 0:
        return (0, 0)
    p = run.pos + time - run.start
    if p == 0 or p == lengths[c]:
        return (0, 0)
    return (c, p)


def _probe(t, N, pred):
    """A predicate on coordinate pairs equivalent to ``pred`` on vertices."""
    fast = _FAST.get(pred)
    if fast is not None:
        return fast
    return lambda a, b: pred(VertexRef(N, *a), VertexRef(N, *b))


# set to False to force the run-generator searches everywhere
USE_TABLES = True


def _tables(t, x, y, N, k):
    """Run tables of both anchors at level N, or None when tables do not apply."""
    if not USE_TABLES or k > TABLE_LIMIT:
        return None
    out = []
    for a in (x, y):
        if a.is_fixed:
            out.append(np.array([[0, k, 0, 0]], dtype=np.int64))
        else:
            table = run_table(t, a, N)
            if table is None:
                return None
            out.append(table)
    return out


def _table_scan(t, x, y, N, k, pred, last):
    """Kernel scan on cached run tables; ``NotImplemented`` when tables do not apply."""
    mode = _MODES.get(pred)
    tables = None if mode is None else _tables(t, x, y, N, k)
    if tables is None:
        return NotImplemented
    found = _kernels.pair_scan(tables[0], tables[1], k, level_lengths(t, N), mode, last)
    return None if found < 0 else int(found)


def first_time(t, x, y, N, pred, k=None):
    """Least time in ``0..k`` at which ``pred(u, v)`` holds for the level-N coordinates."""
    _check_resolution(N, x, y)
    k = _common_horizon(t, x, y) if k is None else k
    found = _table_scan(t, x, y, N, k, pred, False)
    if found is not NotImplemented:
        return found
    lengths = t._lengths[N]
    test = _probe(t, N, pred)
    for a, b, rx, ry in _segments(t, x, y, N, k):
        for time in (a, a + 1, b) if a + 1 <= b else (a,):
            if test(_coord(lengths, rx, time), _coord(lengths, ry, time)):
                return time
    return None


def last_time(t, x, y, N, pred, k=None):
    """Greatest time in ``0..k`` at which ``pred(u, v)`` holds, or None."""
    _check_resolution(N, x, y)
    k = _common_horizon(t, x, y) if k is None else k
    found = _table_scan(t, x, y, N, k, pred, True)
    if found is not NotImplemented:
        return found
    lengths = t._lengths[N]
    test = _probe(t, N, pred)
    last = None
    for a, b, rx, ry in _segments(t, x, y, N, k):
        for time in (b, b - 1, a) if a + 1 <= b else (a,):
            if test(_coord(lengths, rx, time), _coord(lengths, ry, time)):
                last = time if last is None else max(last, time)
                break
    return last


def differ(u, v):
    return u != v


def agree(u, v):
    return u == v


def degree_split(u, v):
    return deg(u) != deg(v)


def both_base(u, v):
    return u.is_base and v.is_base


# kernel mode numbers of the built-in predicates
_MODES = {differ: 0, agree: 1, both_base: 2, degree_split: 3}

# the same predicates on (circuit, position) pairs; circuit 0 is the base
_FAST = {
    differ: lambda a, b: a != b,
    agree: lambda a, b: a == b,
    degree_split: lambda a, b: a[0] != b[0],
    both_base: lambda a, b: a[0] == 0 and b[0] == 0,
}


@dataclass(frozen=True)
class PairReport:
    x: PointAnchor
    y: PointAnchor
    level: int
    horizon: int
    first_joint_base: object
    first_divergence: object
    min_distance: object
    max_distance: object
    first_degree_split: object = None

    def to_record(self):
        fields = [
            ("x", self.x), ("y", self.y), ("N", self.level), ("horizon", self.horizon),
            ("joint_base", self.first_joint_base), ("divergence", self.first_divergence),
            ("min_distance", self.min_distance), ("max_distance", self.max_distance),
            ("degree_split", self.first_degree_split),
        ]
        return " ".join(f"{k}={'-' if v is None else v}" for k, v in fields)


def _pair_depth(x, y):
    depths = [a.depth for a in (x, y) if not a.is_fixed]
    if not depths:
        raise ValueError("at least one anchor must not be the fixed point")
    return min(depths)


def _sub_runs(t, n, run, a, b):
    """Level ``n-1`` runs of the level-n ``run`` over times ``a..b``."""
    if run.circuit == 0:
        return iter((Run(a, b - a, 0, 0),))
    pos = run.pos + a - run.start
    return _runs(t, n, run.circuit, pos, pos + b - a, n - 1, a)


def _least_difference(t, n, u, v):
    """Least level at which two level-n coordinates differ (``n + 1`` if equal)."""
    if u == v:
        return n + 1
    while n > 0:
        u = t.descend(n, *u) if u[0] else u
        v = t.descend(n, *v) if v[0] else v
        if u == v:
            return n
        n -= 1
    return 1


class _Profile:
    """Least differing level ``m(s)`` over a window, reduced to what a report needs.

    ``lo``/``hi`` are the extremes of ``m(s)`` and ``first`` the least time with
    ``m(s) <= N``. The window is cut top-down: a level-n overlap whose interior
    agrees has ``m = n + 1`` there; one that disagrees is split at level n-1,
    unless no time inside it can move ``lo``, ``hi`` or ``first``.
    """

    def __init__(self, t, N):
        self.t, self.N = t, N
        self.lo = math.inf
        self.hi = 0
        self.first = None

    def note(self, time, m):
        if m < self.lo:
            self.lo = m
        if m > self.hi:
            self.hi = m
        if self.first is None and m <= self.N:
            self.first = time

    def point(self, n, time, rx, ry):
        lengths = self.t._lengths[n]
        self.note(time, _least_difference(self.t, n, _coord(lengths, rx, time),
                                          _coord(lengths, ry, time)))

    def walk(self, n, pieces):
        inner = False
        for a, b, rx, ry in pieces:
            if inner:
                self.point(n, a, rx, ry)
            inner = True
            if b - a < 2:
                continue
            cx, cy = rx.circuit, ry.circuit
            if cx == cy and (cx == 0 or rx.pos - rx.start == ry.pos - ry.start):
                self.note(a + 1, n + 1)
                continue
            # every time inside differs at level n, and agrees below the smaller degree
            floor = min(cx or math.inf, cy or math.inf)
            if self.first is None and n <= self.N:
                self.first = a + 1
            want = (self.lo > floor or self.hi < n
                    or (self.first is None and floor <= self.N))
            if want:
                self.walk(n - 1, _merge(_sub_runs(self.t, n, rx, a, b),
                                        _sub_runs(self.t, n, ry, a, b), b))


def _level_profile(t, x, y, N, D, k):
    """``(lo, hi, first)``: extremes of the least differing level and the first time it is <= N."""
    levels = [_tables(t, x, y, m, k) for m in range(1, D + 1)]
    if all(tables is not None for tables in levels):
        def scan(m, mode):
            xs, ys = levels[m - 1]
            return _kernels.pair_scan(xs, ys, k, level_lengths(t, m), mode, False)

        # disagreement sets grow with the level, agreement sets shrink
        lo = next((m for m in range(1, D + 1) if scan(m, 0) >= 0), D + 1)
        hi = 1
        while hi <= D and scan(hi, 1) >= 0:
            hi += 1
        first = scan(N, 0)
        return lo, hi, (None if first < 0 else int(first))
    prof = _Profile(t, N)
    pieces = list(_segments(t, x, y, D, k))
    prof.point(D, 0, pieces[0][2], pieces[0][3])
    prof.walk(D, pieces)
    if k > 0:
        prof.point(D, k, pieces[-1][2], pieces[-1][3])
    return prof.lo, prof.hi, prof.first


def separation_report(t, x, y, N, k=None):
    """Divergence, joint base visits and distance range of two orbits over ``0..k``."""
    _check_resolution(N, x, y)
    limit = _common_horizon(t, x, y)
    k = limit if k is None else k
    if k > limit and not (x.is_fixed and y.is_fixed):
        raise HorizonExhausted(k, limit)
    D = _pair_depth(x, y)
    lo, hi, first = _level_profile(t, x, y, N, D, k)
    if lo > D:
        max_d = min_d = DyadicDistance(D + 1, False)
    else:
        max_d = DyadicDistance(lo, True)
        min_d = DyadicDistance(hi, hi <= D)
    split = None
    if _cylinder_degree(x) != _cylinder_degree(y):
        split = first_time(t, x, y, N, degree_split, k)
    return PairReport(
        x, y, N, k,
        first_joint_base=joint_meet(t, x, y, N, k),
        first_divergence=first,
        min_distance=min_d,
        max_distance=max_d,
        first_degree_split=split,
    )


def _cylinder_degree(a):
    return math.inf if a.is_fixed else a.circuit


def dense_anchor(t, N, D):
    """Depth-D anchor of the first-preimage chain over ``v_{N,1,1}``."""
    if not 1 <= N < D:
        raise ValueError(f"dense_anchor needs 1 <= N < D, got N={N}, D={D}")
    a = PointAnchor(N, 1, 1)
    while a.depth < D:
        a = lift_anchor(t, a, 0)
    return a


def coverage_check(t, a, n):
    """Whether the level-n trace over the anchor's horizon visits every vertex of ``G_n``."""
    count = t.vertex_count(n)
    if count > t.limit:
        raise ExplicitLimitExceeded(count, t.limit)
    if a.is_fixed:
        return count == 1
    _check_resolution(n, a)
    spans = {i: [] for i in range(1, n + 1)}
    base = False
    for run in level_runs(t, a, n):
        if run.circuit == 0:
            base = True
            continue
        L = t.circuit_length(n, run.circuit)
        if run.pos == 0 or run.pos + run.length == L:
            base = True
        lo, hi = max(run.pos, 1), min(run.pos + run.length, L - 1)
        if lo <= hi:
            spans[run.circuit].append((lo, hi))
    if not base:
        return False
    for i, intervals in spans.items():
        reach = 0
        for lo, hi in sorted(intervals):
            if lo > reach + 1:
                return False
            reach = max(reach, hi)
        if reach < t.circuit_length(n, i) - 1:
            return False
    return True


def is_stable(t, a):
    """The anchor's circuit is also the circuit of its projection one level down."""
    if a.is_fixed or a.depth < 2:
        return False
    return project_vertex(t, a.vertex(), a.depth - 1).circuit == a.circuit


def stabilization_level(t, a):
    """Least level from which every coordinate of the anchor's thread has the anchor's degree."""
    if a.is_fixed:
        return 0
    level = a.depth
    for v in reversed(thread(t, a)[:-1]):
        if v.circuit != a.circuit:
            break
        level = v.level
    return level


def stabilized_anchors(t, N, D):
    """Every depth-D anchor whose thread keeps one degree from level N up, in sorted order."""
    if not 1 <= N <= D:
        raise ValueError(f"need 1 <= N <= D, got N={N}, D={D}")
    out = []
    for i in range(1, N + 1):
        layer = [PointAnchor(N, i, j) for j in range(1, t.circuit_length(N, i))]
        for n in range(N, D):
            reps = next(rep for sym, rep in t.template(n, i)[0] if sym == i)
            layer = [lift_anchor(t, a, w) for a in layer for w in range(reps)]
        out.extend(layer)
    return sorted(out, key=lambda a: (a.circuit, a.position))


@dataclass(frozen=True)
class WitnessReport:
    x: PointAnchor
    y: PointAnchor
    shared: VertexRef
    shift: int
    level: int
    divergence: int

    def to_record(self):
        return (f"x={self.x} y={self.y} shared={self.shared} shift={self.shift} "
                f"N={self.level} divergence={self.divergence}")


def equicontinuity_witness(t, x, N):
    """A cylinder-mate ``y = f^shift(x)`` of ``x`` whose level-N trace separates from x's.

    ``x`` and ``y`` both lie in ``c_{D,i}`` and project to the same vertex of
    level ``D-1``: they are two of the repetitions of ``C_i`` in the rewrite
    of ``c_{D,i}``. Raises :class:`NoDivergenceWithinHorizon` if the traces
    agree at level N until one of them reaches the base at level D.
    """
    if x.is_fixed:
        raise ValueError("the fixed point has no witness")
    if not is_stable(t, x):
        raise ValueError(f"anchor {x} is not degree-stable at depth {x.depth}")
    D, i = x.depth, x.circuit
    shared = project_vertex(t, x.vertex(), D - 1)
    tokens, starts = t.template(D - 1, i)
    k = next(k for k, (sym, _) in enumerate(tokens) if sym == i)
    unit = t.circuit_length(D - 1, i)
    rep = tokens[k][1]
    q = (x.position - starts[k]) // unit
    other = q + 1 if q + 1 < rep else q - 1
    y = PointAnchor(D, i, x.position + (other - q) * unit)
    shift = y.position - x.position
    div = first_time(t, x, y, N, differ)
    if div is None:
        raise NoDivergenceWithinHorizon(
            f"{x} and {y} agree at level {N} over the common horizon; increase the depth")
    return WitnessReport(x, y, shared, shift, N, div)


def periodic_obstructions(t, depth):
    """Pairs ``(n, i)`` whose rewrite of ``c_{n+1,i}`` is one traversal of one circuit."""
    if depth + 1 > t.depth:
        raise ValueError(f"need a tower of depth >= {depth + 1}")
    bad = []
    for n in range(depth + 1):
        for i in range(1, n + 2):
            tokens = t.template(n, i)[0]
            if len(tokens) == 1 and tokens[0][1] == 1:
                bad.append((n, i))
    return bad


def no_periodic_check(t, depth):
    return not periodic_obstructions(t, depth)


@dataclass(frozen=True)
class TrendRow:
    depth: int
    x: PointAnchor
    y: PointAnchor
    horizon: int
    first_meet: object
    last_meet: object
    last_divergence: object

    def to_record(self):
        vals = [("D", self.depth), ("x", self.x), ("y", self.y), ("horizon", self.horizon),
                ("first_meet", self.first_meet), ("last_meet", self.last_meet),
                ("last_divergence", self.last_divergence)]
        return " ".join(f"{k}={'-' if v is None else v}" for k, v in vals)


def trend(t, x, y, N, depths):
    """Joint base visits and divergences of first-preimage lifts of a pair, per depth.

    Deeper lifts share the orbit prefix of shallower ones, so the first meet
    is the same once it exists; the latest meet and latest divergence inside
    the growing horizon are what move out.
    """
    rows = []
    for a, b in zip(nested_family(t, x, depths), nested_family(t, y, depths)):
        rows.append(TrendRow(
            max(a.depth, b.depth), a, b, _common_horizon(t, a, b),
            joint_meet(t, a, b, N), last_joint_meet(t, a, b, N),
            last_time(t, a, b, N, differ),
        ))
    return rows


def is_monotone(values):
    """Non-decreasing, with None (not found) only before the first value."""
    seen = None
    for v in values:
        if v is None:
            if seen is not None:
                return False
            continue
        if seen is not None and v < seen:
            return False
        seen = v
    return True


def search_lifts(t, x, y, N, pred, max_depth=None):
    """First time ``pred`` holds for first-preimage lifts of a pair, deepening as needed.

    Returns ``(depth, time)`` for the shallowest lift depth at which a time is
    found within the common horizon, or None once ``max_depth`` is passed.
    Lifting keeps each anchor inside its cylinder and only lengthens the
    horizon, so this realizes "eventually" statements about the orbits.
    """
    max_depth = t.depth if max_depth is None else max_depth
    while True:
        found = first_time(t, x, y, N, pred)
        if found is not None:
            return _pair_depth(x, y), found
        if _pair_depth(x, y) >= max_depth:
            return None
        x, y = lift_anchor(t, x, 0), lift_anchor(t, y, 0)


def nested_family(t, a, depths):
    """First-preimage lifts of ``a`` to each requested depth (ascending)."""
    out = []
    cur = a
    for D in sorted(depths):
        while cur.depth < D:
            cur = lift_anchor(t, cur, 0)
        out.append(cur)
    return out


__all__ = [
    "FIXED_POINT", "PairReport", "TrendRow", "WitnessReport", "agree", "both_base",
    "coverage_check", "degree_split", "dense_anchor", "differ", "equicontinuity_witness",
    "first_meet_base", "first_time", "gap_at_level", "is_monotone", "is_stable", "joint_meet",
    "last_joint_meet", "last_time", "nested_family", "no_periodic_check", "periodic_obstructions",
    "same_orbit_detect", "search_lifts", "separation_report", "stabilization_level",
    "stabilized_anchors", "trend", "visit_count",
]
