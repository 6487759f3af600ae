import itertools
import math

import pytest

from covertower import scramble
from covertower.errors import HorizonExhausted, NoDivergenceWithinHorizon
from covertower.points import FIXED_POINT, PointAnchor, horizon, lift_anchor
from covertower.scramble import (
    agree, both_base, coverage_check, degree_split, dense_anchor, differ, equicontinuity_witness,
    first_meet_base, first_time, gap_at_level, is_monotone, is_stable, joint_meet,
    last_joint_meet, last_time, nested_family, no_periodic_check, periodic_obstructions,
    same_orbit_detect, search_lifts, separation_report, stabilization_level, stabilized_anchors,
    trend, visit_count,
)
from covertower.suites import all_anchors
from covertower.tower import VertexRef

from oracles import explicit_threads, explicit_trace


def brute(t, x, y, N):
    """Separation data from explicit threads, step by step."""
    D = max(a.depth for a in (x, y))
    k = min(horizon(t, x), horizon(t, y))
    k = 0 if k == math.inf else k
    tx, ty = (explicit_threads(t, a, k) if not a.is_fixed
              else [tuple(VertexRef(m) for m in range(D + 1))] * (k + 1) for a in (x, y))
    firsts = {"differ": None, "both_base": None, "degree_split": None}
    last_base = None
    levels = []
    for s in range(k + 1):
        u, v = tx[s][N], ty[s][N]
        hits = {"differ": u != v, "both_base": u.is_base and v.is_base,
                "degree_split": u.circuit != v.circuit}
        for name, hit in hits.items():
            if hit and firsts[name] is None:
                firsts[name] = s
        if hits["both_base"]:
            last_base = s
        levels.append(next((m for m in range(D + 1) if tx[s][m] != ty[s][m]), D + 1))
    return k, firsts, last_base, min(levels), max(levels)


def sample_pairs(t, D):
    anchors = list(all_anchors(t, D))
    return list(itertools.combinations(anchors, 2))[::7] + [(a, FIXED_POINT) for a in anchors[::5]]


@pytest.mark.parametrize("use_tables", [True, False])
def test_pair_operations_match_brute_force(tower, monkeypatch, use_tables):
    monkeypatch.setattr(scramble, "USE_TABLES", use_tables)
    for D in (2, 3, 4):
        for x, y in sample_pairs(tower, D):
            for N in range(1, D + 1):
                k, firsts, last_base, lo, hi = brute(tower, x, y, N)
                assert first_time(tower, x, y, N, differ) == firsts["differ"]
                assert first_time(tower, x, y, N, degree_split) == firsts["degree_split"]
                assert joint_meet(tower, x, y, N) == firsts["both_base"]
                assert last_joint_meet(tower, x, y, N) == last_base
                r = separation_report(tower, x, y, N)
                assert r.horizon == k
                assert r.first_divergence == firsts["differ"]
                assert r.first_joint_base == firsts["both_base"]
                if lo > D:
                    assert not r.max_distance.exact
                else:
                    assert r.max_distance.exponent == lo and r.max_distance.exact
                    assert r.min_distance.exponent == hi
                    assert r.min_distance.exact == (hi <= D)


def test_last_time_matches_brute_force(tower):
    for x, y in sample_pairs(tower, 3):
        k = min(horizon(tower, x), horizon(tower, y))
        if k == math.inf:
            continue
        tx, ty = explicit_trace(tower, x, 2, k), explicit_trace(tower, y, 2, k)
        same = [s for s in range(k + 1) if tx[s] == ty[s]]
        assert last_time(tower, x, y, 2, agree) == (same[-1] if same else None)


def test_hand_pair(tower):
    x, y = PointAnchor(3, 1, 2), PointAnchor(3, 1, 8)
    r = separation_report(tower, x, y, 1)
    assert (r.horizon, r.first_joint_base, r.first_divergence) == (10, 0, 7)
    assert str(r.max_distance) == "2^-1" and str(r.min_distance) == "2^-3"
    assert r.first_degree_split is None
    assert separation_report(tower, x, y, 2).first_divergence == 6
    assert r.to_record().startswith("x=3:1:2 y=3:1:8 N=1 horizon=10")


def test_report_horizon_checks(tower):
    x, y = PointAnchor(3, 1, 2), PointAnchor(3, 1, 8)
    with pytest.raises(HorizonExhausted):
        separation_report(tower, x, y, 1, 11)
    with pytest.raises(ValueError):
        separation_report(tower, PointAnchor(1, 1, 1), y, 2)


def test_degree_split_reported_for_distinct_degrees(tower):
    r = separation_report(tower, PointAnchor(3, 1, 2), PointAnchor(3, 2, 2), 2)
    assert r.first_degree_split is not None


def test_single_orbit_queries(tower):
    a = PointAnchor(3, 1, 2)
    assert first_meet_base(tower, a, 1) == 0
    assert first_meet_base(tower, a, 2) == 5
    assert first_meet_base(tower, FIXED_POINT, 2) == 0
    trace = explicit_trace(tower, a, 1, 9)
    assert visit_count(tower, a, VertexRef(1), 9) == trace.count(VertexRef(1)) == 6
    assert visit_count(tower, a, VertexRef(1, 1, 1), 9) == trace.count(VertexRef(1, 1, 1))
    with pytest.raises(HorizonExhausted):
        visit_count(tower, a, VertexRef(1), 20)


def test_first_meet_base_within_remn(tower):
    for D in range(1, 6):
        for a in all_anchors(tower, D):
            for N in range(1, D + 1):
                trace = explicit_trace(tower, a, N, horizon(tower, a))
                assert first_meet_base(tower, a, N) == trace.index(VertexRef(N))


def test_gap_and_same_orbit(tower):
    x, y = PointAnchor(3, 1, 2), PointAnchor(3, 1, 8)
    assert gap_at_level(tower, x, y, 3) == 6
    assert gap_at_level(tower, x, y, 1) is None
    assert same_orbit_detect(tower, x, y, (3,)) == 6
    assert same_orbit_detect(tower, x, y, (2, 3)) is None


def test_predicates():
    u, v = VertexRef(2, 1, 3), VertexRef(2)
    assert differ(u, v) and not agree(u, v)
    assert degree_split(u, v) and not both_base(u, v)
    assert both_base(v, v) and not degree_split(u, VertexRef(2, 1, 4))


def test_dense_anchor_and_coverage(tower):
    assert str(dense_anchor(tower, 1, 4)) == "4:1:4"
    for n in range(1, 5):
        assert coverage_check(tower, dense_anchor(tower, 1, n + 2), n)
    # a short orbit cannot cover level 3
    assert not coverage_check(tower, PointAnchor(3, 1, 17), 3)
    with pytest.raises(ValueError):
        dense_anchor(tower, 2, 2)


def test_coverage_against_explicit_trace(tower):
    for D in range(2, 5):
        for a in all_anchors(tower, D):
            for n in range(1, D + 1):
                seen = set(explicit_trace(tower, a, n, horizon(tower, a)))
                assert coverage_check(tower, a, n) == (len(seen) == tower.vertex_count(n))


def test_stabilized_anchors_equal_filter(tower):
    for D in range(1, 6):
        for N in range(1, D + 1):
            expected = [a for a in all_anchors(tower, D) if stabilization_level(tower, a) <= N]
            assert stabilized_anchors(tower, N, D) == expected


def test_stability(tower):
    assert is_stable(tower, PointAnchor(3, 1, 2))
    assert stabilization_level(tower, PointAnchor(3, 1, 2)) == 2
    assert not is_stable(tower, PointAnchor(3, 1, 1))
    assert not is_stable(tower, FIXED_POINT)


def test_hand_witness(tower):
    w = equicontinuity_witness(tower, PointAnchor(3, 1, 2), 1)
    assert (str(w.y), str(w.shared), w.shift, w.divergence) == ("3:1:8", "v_{2,1,1}", 6, 7)
    tx = explicit_trace(tower, w.x, 1, 10)
    ty = explicit_trace(tower, w.y, 1, 10)
    assert next(s for s in range(11) if tx[s] != ty[s]) == 7


def test_witness_uses_previous_repetition_when_last(tower):
    w = equicontinuity_witness(tower, PointAnchor(3, 1, 8), 1)
    assert w.y == PointAnchor(3, 1, 2) and w.shift == -6


def test_witness_errors(tower):
    with pytest.raises(ValueError):
        equicontinuity_witness(tower, FIXED_POINT, 1)
    with pytest.raises(ValueError):
        equicontinuity_witness(tower, PointAnchor(3, 1, 1), 1)


def test_witness_without_divergence(tower):
    # circuit 2 is the base at level 1, so these orbits cannot separate there
    x = PointAnchor(3, 2, 2)
    assert first_time(tower, x, PointAnchor(3, 2, 4), 1, differ) is None
    with pytest.raises(NoDivergenceWithinHorizon):
        equicontinuity_witness(tower, x, 1)
    assert equicontinuity_witness(tower, x, 2).divergence is not None


def test_no_periodic(deep_tower):
    assert periodic_obstructions(deep_tower, 9) == []
    assert no_periodic_check(deep_tower, 9)
    with pytest.raises(ValueError):
        no_periodic_check(deep_tower, 10)


def test_search_lifts_finds_meet_for_hopeless_pair(deep_tower):
    x, y = PointAnchor(4, 1, 3), PointAnchor(4, 1, 50)
    assert joint_meet(deep_tower, x, y, 2) is None
    depth, time = search_lifts(deep_tower, x, y, 2, both_base)
    xs, ys = nested_family(deep_tower, x, [depth]), nested_family(deep_tower, y, [depth])
    assert joint_meet(deep_tower, xs[0], ys[0], 2) == time
    assert search_lifts(deep_tower, x, y, 2, both_base, max_depth=4) is None


def test_nested_family(tower):
    fam = nested_family(tower, PointAnchor(2, 1, 1), [4, 2, 3])
    assert [a.depth for a in fam] == [2, 3, 4]
    assert fam[1] == lift_anchor(tower, fam[0])


def test_trend(deep_tower):
    rows = trend(deep_tower, PointAnchor(2, 1, 1), PointAnchor(2, 1, 3), 1, [2, 3, 4, 5])
    assert [r.horizon for r in rows] == [3, 14, 49, 156]
    assert [r.first_meet for r in rows] == [0, 0, 0, 0]
    assert is_monotone([r.last_meet for r in rows])
    assert is_monotone([r.last_divergence for r in rows])
    assert rows[0].to_record().startswith("D=2 x=2:1:1 y=2:1:3 horizon=3")


def test_is_monotone():
    assert is_monotone([None, 1, 1, 3])
    assert not is_monotone([2, 1])
    assert not is_monotone([1, None, 2])
    assert is_monotone([])


def test_small_examples(tower):
    P = PointAnchor
    assert first_meet_base(tower, P(2, 1, 2), 1) == 1
    assert first_meet_base(tower, P(2, 1, 2), 2) == 4
    assert visit_count(tower, P(3, 1, 1), VertexRef(1, 1, 1), 17) == 4
    assert [str(dense_anchor(tower, 1, D)) for D in (2, 3)] == ["2:1:2", "3:1:3"]
    for N in range(1, 4):
        for D in range(N + 1, 7):
            assert dense_anchor(tower, N, D) == P(D, 1, D - N + 1)
    assert not coverage_check(tower, P(4, 2, 3), 1)
    assert joint_meet(tower, P(4, 1, 2), P(4, 2, 1), 1) is not None
    assert separation_report(tower, P(4, 1, 5), P(4, 2, 5), 2).first_divergence is not None


def test_joint_meet_needs_both_on_base(tower):
    x, y = PointAnchor(3, 1, 2), PointAnchor(3, 1, 5)
    tx, ty = explicit_trace(tower, x, 1, 13), explicit_trace(tower, y, 1, 13)
    # at t=1 only y is on the base; both are there first at t=2
    assert not tx[1].is_base and ty[1].is_base
    assert joint_meet(tower, x, y, 1) == 2
    assert joint_meet(tower, x, x, 2) == first_meet_base(tower, x, 2)
