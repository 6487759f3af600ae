"""Verifier sweeps over parameter grids, producing one Report per record line.

Each suite is a generator so the caller can stream records to a file. All
orderings are fixed, which keeps report files byte-stable across runs.
"""
import itertools
import random
from dataclasses import replace

from .errors import ExplicitLimitExceeded, NoDivergenceWithinHorizon
from .points import PointAnchor, remn
from .scramble import (
    both_base, coverage_check, dense_anchor, differ, equicontinuity_witness,
    first_meet_base, is_monotone, is_stable, periodic_obstructions, same_orbit_detect, search_lifts,
    separation_report, stabilized_anchors, trend,
)
from .tower import DEFAULT_LIMIT, Tower, monotonicity_violations
from .walks import (
    Report, SymWalk, expand_explicit, gap_spectrum, project_to, scan_spectrum,
    verify_interleaving, verify_spectrum, verify_tail,
)

SUITES = ("gaps", "scramble", "periodic")
DEFAULT_DEPTH = {"gaps": 6, "scramble": 5, "periodic": 9}
DEFAULT_LEVEL = {"gaps": 3, "scramble": 2, "periodic": 0}
DEFAULT_SEED = 20240601
# extra depth available to lift searches in the scramble suite
LIFT_HEADROOM = 5


def _tower(config, depth, limit):
    return Tower(replace(config, depth=depth), limit=limit)


def all_anchors(t, D):
    """Every anchor at depth D, ordered by circuit then position."""
    for i in range(1, D + 1):
        for j in range(1, t.circuit_length(D, i)):
            yield PointAnchor(D, i, j)


def spectrum_identity(t, n, l, N):
    """Symbolic spectrum of ``c_{N,l}`` in the image of ``c_{n,l}`` equals a substring scan."""
    params = {"n": n, "l": l, "N": N}
    walk = project_to(t, SymWalk.circuit(n, l), N)
    symbolic = gap_spectrum(t, walk, l).to_csv()
    try:
        brute = scan_spectrum(t, expand_explicit(t, walk), N, l).to_csv()
    except ExplicitLimitExceeded as exc:
        return Report("spectrum_identity", params, True, {"skipped": f"size {exc.size}"})
    same = symbolic == brute
    return Report("spectrum_identity", params, same, {"bytes": len(symbolic)})


def gaps_suite(config, depth, level, limit, seed=None):
    t = _tower(config, depth, limit)
    for N in range(1, min(level, depth - 1) + 1):
        for n in range(N + 1, depth + 1):
            for l in range(1, N + 1):
                yield spectrum_identity(t, n, l, N)
                yield verify_spectrum(t, n, l, N)
                yield verify_interleaving(t, n, l, N)
                if l < N and n >= N + 2:
                    yield verify_tail(t, n, l, N)


def _first_meet_records(t, depth):
    for D in range(1, depth + 1):
        anchors = list(all_anchors(t, D))
        for N in range(1, D + 1):
            bad = [a for a in anchors if first_meet_base(t, a, N) > remn(t, a.vertex())]
            yield Report("first_meet_base", {"D": D, "N": N}, not bad,
                         {"anchors": len(anchors), "late": len(bad)})


def _lift_records(t, depth, level, op, pairs_of, pred):
    for D in range(1, depth + 1):
        anchors = list(all_anchors(t, D))
        for N in range(1, min(level, D) + 1):
            found = deepest = 0
            missing = None
            total = 0
            for x, y in pairs_of(anchors, N):
                total += 1
                hit = search_lifts(t, x, y, N, pred)
                if hit is None:
                    missing = missing or (x, y)
                    continue
                found += 1
                deepest = max(deepest, hit[0] - D)
            details = {"pairs": total, "found": found, "max_lift": deepest}
            if missing:
                details["first_missing"] = f"{missing[0]}/{missing[1]}"
            yield Report(op, {"D": D, "N": N}, found == total, details)


def _all_pairs(anchors, N=None):
    return itertools.combinations_with_replacement(anchors, 2)


def _shift_pairs(anchors, N=None):
    """Ordered pairs ``(x, f^d x)``, ``d != 0``; with ``N``, only circuits visible at level N.

    Every circuit ``c_{n,i}`` with ``i > N`` projects onto the base vertex of
    level N, so such orbits cannot separate there.
    """
    for x in anchors:
        if N is not None and x.circuit > N:
            continue
        for y in anchors:
            if x.circuit == y.circuit and x != y:
                yield x, y


def _same_orbit_records(t, depth):
    for D in range(1, depth + 1):
        pairs = list(_shift_pairs(list(all_anchors(t, D))))
        wrong = [(x, y) for x, y in pairs
                 if same_orbit_detect(t, x, y, (D,)) != y.position - x.position]
        yield Report("same_orbit", {"D": D}, not wrong, {"pairs": len(pairs), "wrong": len(wrong)})


def _degree_records(t, depth, level):
    for D in range(1, depth + 1):
        for N in range(1, min(level, D) + 1):
            ready = stabilized_anchors(t, N, D)
            pairs = [(x, y) for x in ready for y in ready if x.circuit < y.circuit]
            misses = 0
            for x, y in pairs:
                r = separation_report(t, x, y, N)
                if r.first_divergence is None or r.first_degree_split is None:
                    misses += 1
            yield Report("degree_separation", {"D": D, "N": N}, misses == 0,
                         {"pairs": len(pairs), "misses": misses})


def _degree_sample_records(t, depth, level, seed, count=200):
    """Seeded sample of stabilized pairs with distinct degrees, two levels past ``depth``."""
    rng = random.Random(seed)
    for D in (depth + 1, depth + 2):
        for N in range(2, min(level, D) + 1):
            ready = stabilized_anchors(t, N, D)
            misses = tried = 0
            while tried < count:
                x, y = rng.choice(ready), rng.choice(ready)
                if x.circuit == y.circuit:
                    continue
                tried += 1
                if separation_report(t, x, y, N).first_divergence is None:
                    misses += 1
            yield Report("degree_separation_sample", {"D": D, "N": N, "seed": seed},
                         misses == 0, {"pairs": tried, "misses": misses})


def _coverage_records(t, depth):
    for n in range(1, depth - 1):
        a = dense_anchor(t, 1, n + 2)
        ok = coverage_check(t, a, n)
        yield Report("coverage", {"n": n}, ok, {"anchor": a})


def _witness_records(t, depth):
    for D in range(3, depth + 1):
        stable = [a for a in all_anchors(t, D) if a.circuit == 1 and is_stable(t, a)]
        latest = 0
        failures = 0
        for a in stable:
            try:
                latest = max(latest, equicontinuity_witness(t, a, 1).divergence)
            except NoDivergenceWithinHorizon:
                failures += 1
        yield Report("witness", {"D": D, "N": 1}, failures == 0,
                     {"anchors": len(stable), "failures": failures, "latest_divergence": latest})


def _trend_records(t, depth):
    base = list(all_anchors(t, 2))
    depths = list(range(2, depth + 1))
    for x, y in itertools.combinations(base, 2):
        rows = trend(t, x, y, 1, depths)
        ok = all(is_monotone([getattr(r, f) for r in rows])
                 for f in ("first_meet", "last_meet", "last_divergence"))
        yield Report("trend", {"x": x, "y": y, "N": 1}, ok,
                     {"last_meet": ",".join(str(r.last_meet) for r in rows),
                      "last_divergence": ",".join(str(r.last_divergence) for r in rows)})


def scramble_suite(config, depth, level, limit, seed=DEFAULT_SEED):
    t = _tower(config, depth + LIFT_HEADROOM, limit)
    yield from _first_meet_records(t, depth)
    yield from _lift_records(t, depth, level, "proximal", _all_pairs, both_base)
    yield from _lift_records(t, depth, level, "shift_separation", _shift_pairs, differ)
    yield from _same_orbit_records(t, depth)
    yield from _degree_records(t, depth, max(level, 1))
    yield from _degree_sample_records(t, depth, max(level, 1), seed)
    yield from _coverage_records(t, depth)
    yield from _witness_records(t, depth)
    yield from _trend_records(t, depth)


def periodic_suite(config, depth, level, limit, seed=None):
    t = _tower(config, depth + 1, limit)
    bad = periodic_obstructions(t, depth)
    yield Report("no_periodic", {"depth": depth}, not bad,
                 {"obstructions": ";".join(f"{n}.{i}" for n, i in bad) or "-"})
    mono = monotonicity_violations(t)
    yield Report("monotonicity", {"depth": depth + 1}, not mono, {"violations": len(mono)})


RUNNERS = {"gaps": gaps_suite, "scramble": scramble_suite, "periodic": periodic_suite}


def run_suite(name, config, depth=None, level=None, limit=None, seed=DEFAULT_SEED):
    depth = DEFAULT_DEPTH[name] if depth is None else depth
    level = DEFAULT_LEVEL[name] if level is None else level
    return RUNNERS[name](config, depth, level, DEFAULT_LIMIT if limit is None else limit, seed)


__all__ = ["SUITES", "all_anchors", "run_suite", "spectrum_identity"]
