"""Compare the compiled and pure-Python kernels on tower-sized inputs.

Run with ``python3 benchmarks/bench_kernels.py``. Every workload is checked
for identical results before it is timed.
"""
import argparse
import itertools
import timeit

import numpy as np

from covertower._kernels import _pykernels
from covertower.points import PointAnchor, level_lengths, run_table
from covertower.tower import build_tower
from covertower.walks import SymWalk, expand_explicit, project_to

try:
    from covertower._kernels import _ckernels
except ImportError:
    _ckernels = None


def workloads(depth):
    t = build_tower(depth)
    N = depth - 3
    walk = expand_explicit(t, project_to(t, SymWalk.circuit(depth, 1), N))
    verts = np.ascontiguousarray(walk.verts)
    pattern = np.concatenate([[0], t.circuit_ids(N, 1)]).astype(np.int64)
    g = t.materialize_level(N)
    idx = np.ascontiguousarray(g.index_of(verts))
    indptr, indices = g._csr
    h = t.materialize_cover(depth - 1)
    src = h.source.edge_index_pairs
    keys = np.ascontiguousarray(src[:, 0])
    values = np.ascontiguousarray(h.image_index[src[:, 1]])

    D = depth - 1
    anchors = [PointAnchor(D, 1, j) for j in range(1, t.circuit_length(D, 1), 97)][:30]
    lengths = level_lengths(t, 3)
    tables = [run_table(t, a, 3) for a in anchors]
    ends = {(a, b): t.circuit_length(D, 1) - max(a.position, b.position)
            for a, b in itertools.combinations(anchors, 2)}

    def scans(mod):
        out = []
        for (a, b), end in ends.items():
            xs, ys = tables[anchors.index(a)], tables[anchors.index(b)]
            out.append(mod.pair_scan(xs, ys, end, lengths, 0, True))
        return out

    return {
        "find_occurrences": lambda m: m.find_occurrences(verts, pattern).tolist(),
        "first_invalid_step": lambda m: m.first_invalid_step(idx, indptr, indices),
        "fanout_conflicts": lambda m: m.fanout_conflicts(keys, values, h.source.n_vertices),
        "pair_scan": scans,
    }


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--depth", type=int, default=10)
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args()
    if _ckernels is None:
        print("compiled kernels not built; run: python3 setup.py build_ext --inplace")
        return
    print(f"{'kernel':<20}{'python s':>12}{'cython s':>12}{'speedup':>10}")
    for name, fn in workloads(args.depth).items():
        assert fn(_pykernels) == fn(_ckernels), name
        py = min(timeit.repeat(lambda: fn(_pykernels), number=1, repeat=args.repeat))
        cy = min(timeit.repeat(lambda: fn(_ckernels), number=1, repeat=args.repeat))
        print(f"{name:<20}{py:>12.4f}{cy:>12.4f}{py / cy:>9.1f}x")


if __name__ == "__main__":
    main()
