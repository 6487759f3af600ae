"""Invariants checked on generated towers, anchors and pairs."""
import math

from hypothesis import HealthCheck, assume, given, settings, strategies as st

from covertower.graph import check_bidirectional, check_cover
from covertower.points import PointAnchor, horizon, lift_anchor, orbit_trace, thread
from covertower.scramble import (
    both_base, differ, first_time, joint_meet, last_joint_meet, separation_report,
    stabilization_level,
)
from covertower.tower import Tower, TowerConfig, build_tower, monotonicity_violations
from covertower.walks import SymWalk, expand_explicit, gap_spectrum, project_to, scan_spectrum

from oracles import explicit_trace

TOWER = build_tower(7)
SETTINGS = settings(max_examples=60, deadline=None,
                    suppress_health_check=[HealthCheck.function_scoped_fixture])


@st.composite
def anchors(draw, min_depth=1, max_depth=6):
    D = draw(st.integers(min_depth, max_depth))
    i = draw(st.integers(1, D))
    j = draw(st.integers(1, TOWER.circuit_length(D, i) - 1))
    return PointAnchor(D, i, j)


@st.composite
def configs(draw):
    depth = draw(st.integers(1, 4))
    top = tuple(draw(st.integers(2, 4)) for _ in range(depth))
    mult = tuple(tuple(draw(st.integers(2, 3)) for _ in range(n)) for n in range(1, depth))
    return TowerConfig(depth=depth, top_length=top, mult=mult or 2)


@SETTINGS
@given(configs())
def test_every_schedule_gives_covers(cfg):
    t = Tower(cfg)
    for n in range(cfg.depth):
        h = t.materialize_cover(n)
        assert check_cover(h) and check_bidirectional(h)
    assert not monotonicity_violations(t)


@SETTINGS
@given(configs())
def test_lengths_follow_the_rewrite(cfg):
    t = Tower(cfg)
    for n in range(1, cfg.depth):
        for i in range(1, n + 1):
            expected = 2 + sum(cfg.multiplicity(n, k) * t.circuit_length(n, k)
                               for k in range(i, n + 1))
            assert t.circuit_length(n + 1, i) == expected


@SETTINGS
@given(anchors(), st.integers(0, 6))
def test_orbit_trace_matches_oracle(a, N):
    assume(N <= a.depth)
    k = horizon(TOWER, a)
    assert orbit_trace(TOWER, a, N, k) == explicit_trace(TOWER, a, N, k)


@SETTINGS
@given(anchors(max_depth=5))
def test_degree_never_increases_along_thread(a):
    degrees = [math.inf if v.is_base else v.circuit for v in thread(TOWER, a)]
    assert all(u >= v for u, v in zip(degrees, degrees[1:]))
    level = stabilization_level(TOWER, a)
    assert all(d == a.circuit for d in degrees[level:])


@SETTINGS
@given(anchors(max_depth=5), st.integers(0, 2))
def test_lift_extends_the_orbit(a, which):
    reps = next(rep for sym, rep in TOWER.template(a.depth, a.circuit)[0] if sym == a.circuit)
    b = lift_anchor(TOWER, a, which % reps)
    assert horizon(TOWER, b) > horizon(TOWER, a)
    k = horizon(TOWER, a)
    assert orbit_trace(TOWER, b, a.depth, k) == orbit_trace(TOWER, a, a.depth, k)


@SETTINGS
@given(anchors(min_depth=2, max_depth=5), anchors(min_depth=2, max_depth=5), st.integers(1, 2))
def test_pair_queries_are_symmetric(x, y, N):
    assert joint_meet(TOWER, x, y, N) == joint_meet(TOWER, y, x, N)
    assert last_joint_meet(TOWER, x, y, N) == last_joint_meet(TOWER, y, x, N)
    assert first_time(TOWER, x, y, N, differ) == first_time(TOWER, y, x, N, differ)


@SETTINGS
@given(anchors(min_depth=3, max_depth=5), anchors(min_depth=3, max_depth=5), st.integers(1, 2))
def test_divergence_persists_to_finer_levels(x, y, N):
    coarse = first_time(TOWER, x, y, N, differ)
    fine = first_time(TOWER, x, y, N + 1, differ)
    if coarse is not None:
        assert fine is not None and fine <= coarse
    r = separation_report(TOWER, x, y, N)
    assert r.max_distance.exponent <= r.min_distance.exponent
    if r.first_joint_base is not None:
        assert first_time(TOWER, x, y, N, both_base) == r.first_joint_base


@SETTINGS
@given(st.integers(1, 4), st.data())
def test_symbolic_spectrum_equals_scan(N, data):
    n = data.draw(st.integers(N + 1, 7))
    l = data.draw(st.integers(1, N))
    w = project_to(TOWER, SymWalk.circuit(n, l), N)
    assert gap_spectrum(TOWER, w, l) == scan_spectrum(TOWER, expand_explicit(TOWER, w), N, l)
