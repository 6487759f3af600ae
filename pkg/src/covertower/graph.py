"""Finite directed graphs, graph homomorphisms, covers and walks.

Vertex ids are opaque integers local to one graph. Two graphs are never
compared by value: homomorphisms and walks refer to their graphs by identity.
"""
from enum import Enum
from functools import cached_property

import numpy as np

from . import _kernels

_I64 = np.int64


class DirectedGraph:
    """A finite set of vertices and a set of ordered vertex pairs.

    Internally vertices are kept as a sorted id array and edges as a sorted
    array of compact (index) pairs, so large materialized levels stay cheap.
    """

    def __init__(self, vertices, edges):
        vids = np.unique(np.fromiter((int(v) for v in vertices), dtype=_I64))
        pairs = np.array(sorted({(int(u), int(v)) for u, v in edges}), dtype=_I64).reshape(-1, 2)
        self._vids = vids
        self._edge_idx = self._compact(pairs.reshape(-1)).reshape(-1, 2)

    @classmethod
    def from_arrays(cls, vids, edge_idx):
        """Trusted constructor: sorted unique ``vids`` and compact edge pairs."""
        g = cls.__new__(cls)
        g._vids = np.ascontiguousarray(vids, dtype=_I64)
        e = np.ascontiguousarray(edge_idx, dtype=_I64).reshape(-1, 2)
        order = np.lexsort((e[:, 1], e[:, 0]))
        e = e[order]
        if len(e) > 1:
            keep = np.ones(len(e), dtype=bool)
            keep[1:] = np.any(e[1:] != e[:-1], axis=1)
            e = e[keep]
        g._edge_idx = e
        return g

    def _compact(self, ids):
        ids = np.asarray(ids, dtype=_I64)
        if ids.size == 0:
            return ids
        pos = np.searchsorted(self._vids, ids)
        pos_clipped = np.minimum(pos, max(len(self._vids) - 1, 0))
        if len(self._vids) == 0 or np.any(self._vids[pos_clipped] != ids):
            raise ValueError("edge or walk refers to a vertex outside the graph")
        return pos

    def index_of(self, ids):
        """Compact indices of vertex ids (raises for unknown ids)."""
        return self._compact(ids)

    @property
    def vertex_ids(self):
        return self._vids

    @property
    def edge_index_pairs(self):
        return self._edge_idx

    @cached_property
    def vertices(self):
        return frozenset(self._vids.tolist())

    @cached_property
    def edges(self):
        e = self._vids[self._edge_idx]
        return frozenset(zip(e[:, 0].tolist(), e[:, 1].tolist()))

    @property
    def n_vertices(self):
        return len(self._vids)

    @property
    def n_edges(self):
        return len(self._edge_idx)

    @cached_property
    def _csr(self):
        src = self._edge_idx[:, 0]
        counts = np.bincount(src, minlength=self.n_vertices)
        indptr = np.zeros(self.n_vertices + 1, dtype=_I64)
        np.cumsum(counts, out=indptr[1:])
        return indptr, np.ascontiguousarray(self._edge_idx[:, 1])

    def out_degrees(self):
        return np.bincount(self._edge_idx[:, 0], minlength=self.n_vertices)

    def in_degrees(self):
        return np.bincount(self._edge_idx[:, 1], minlength=self.n_vertices)

    def has_edge(self, u, v):
        return (int(u), int(v)) in self.edges

    def __repr__(self):
        return f"DirectedGraph(|V|={self.n_vertices}, |E|={self.n_edges})"


def to_dot(g, name="G"):
    """DOT text with one node per vertex and one edge per pair, ordered by id."""
    lines = [f"digraph {name} {{"]
    lines.extend(f"  {v};" for v in g.vertex_ids.tolist())
    e = g.vertex_ids[g.edge_index_pairs]
    lines.extend(f"  {u} -> {v};" for u, v in e.tolist())
    lines.append("}")
    return "\n".join(lines) + "\n"


class GraphHom:
    """A total vertex map between two graphs.

    ``vmap`` is either a mapping from source ids to target ids or an array of
    target ids aligned with ``source.vertex_ids``. The edge condition is not
    enforced here; see :func:`is_homomorphism`.
    """

    def __init__(self, source, target, vmap):
        self.source = source
        self.target = target
        if isinstance(vmap, np.ndarray):
            images = np.asarray(vmap, dtype=_I64)
            if images.shape != source.vertex_ids.shape:
                raise ValueError("vertex map array does not match the source vertices")
        else:
            try:
                images = np.fromiter((vmap[v] for v in source.vertex_ids.tolist()),
                                     dtype=_I64, count=source.n_vertices)
            except KeyError as exc:
                raise ValueError(f"vertex map is not total: {exc.args[0]} missing") from None
        self._image = target.index_of(images)

    @classmethod
    def _from_index(cls, source, target, image_idx):
        h = cls.__new__(cls)
        h.source, h.target, h._image = source, target, np.asarray(image_idx, dtype=_I64)
        return h

    @classmethod
    def identity(cls, g):
        return cls._from_index(g, g, np.arange(g.n_vertices, dtype=_I64))

    @property
    def image_index(self):
        """Target compact index of every source vertex, in source order."""
        return self._image

    @cached_property
    def vmap(self):
        return dict(zip(self.source.vertex_ids.tolist(),
                        self.target.vertex_ids[self._image].tolist()))

    def __call__(self, v):
        return int(self.target.vertex_ids[self._image[self.source.index_of([v])[0]]])

    def __repr__(self):
        return f"GraphHom({self.source!r} -> {self.target!r})"


def check_edge_surjective(g):
    """Every vertex has at least one in-edge and one out-edge."""
    return bool(np.all(g.out_degrees() > 0) and np.all(g.in_degrees() > 0))


def _image_edge_codes(h):
    e = h.source.edge_index_pairs
    nt = h.target.n_vertices
    return h._image[e[:, 0]] * nt + h._image[e[:, 1]]


def _target_edge_codes(h):
    e = h.target.edge_index_pairs
    return e[:, 0] * h.target.n_vertices + e[:, 1]


def is_homomorphism(h):
    codes = _image_edge_codes(h)
    tcodes = _target_edge_codes(h)  # sorted, since edge pairs are lexsorted
    if len(tcodes) == 0:
        return len(codes) == 0
    pos = np.minimum(np.searchsorted(tcodes, codes), len(tcodes) - 1)
    return bool(np.all(tcodes[pos] == codes))


def out_conflicts(h):
    """Number of out-edge pairs (u,v),(u,v') whose heads map apart."""
    e = h.source.edge_index_pairs
    keys = np.ascontiguousarray(e[:, 0])
    values = np.ascontiguousarray(h._image[e[:, 1]])
    return int(_kernels.fanout_conflicts(keys, values, h.source.n_vertices))


def in_conflicts(h):
    """Number of in-edge pairs (u,v),(u',v) whose tails map apart."""
    e = h.source.edge_index_pairs
    keys = np.ascontiguousarray(e[:, 1])
    values = np.ascontiguousarray(h._image[e[:, 0]])
    return int(_kernels.fanout_conflicts(keys, values, h.source.n_vertices))


def check_plus_directional(h):
    return out_conflicts(h) == 0


def check_bidirectional(h):
    return out_conflicts(h) == 0 and in_conflicts(h) == 0


def missed_target_edges(h):
    """Number of target edges not hit by the image of any source edge."""
    hit = np.unique(_image_edge_codes(h))
    return int(len(np.setdiff1d(_target_edge_codes(h), hit, assume_unique=True)))


def cover_violations(h):
    """Violation counts for each cover axiom; all zero iff ``check_cover`` holds."""
    codes = _image_edge_codes(h)
    tcodes = _target_edge_codes(h)
    if len(tcodes):
        pos = np.minimum(np.searchsorted(tcodes, codes), len(tcodes) - 1)
        non_edges = int(np.count_nonzero(tcodes[pos] != codes))
    else:
        non_edges = len(codes)
    return {
        "non_edges": non_edges,
        "out_conflicts": out_conflicts(h),
        "in_conflicts": in_conflicts(h),
        "source_not_surjective": int(not check_edge_surjective(h.source)),
        "target_not_surjective": int(not check_edge_surjective(h.target)),
        "missed_target_edges": missed_target_edges(h),
    }


def check_cover(h):
    """Homomorphism, +directional, edge-surjective graphs, every target edge hit."""
    return (
        is_homomorphism(h)
        and check_plus_directional(h)
        and check_edge_surjective(h.source)
        and check_edge_surjective(h.target)
        and missed_target_edges(h) == 0
    )


def compose(outer, inner):
    """The map ``outer ∘ inner``; ``inner.target`` must be ``outer.source``."""
    if inner.target is not outer.source:
        raise ValueError("cannot compose: inner target is not the outer source graph")
    return GraphHom._from_index(inner.source, outer.target, outer._image[inner._image])


class WalkSeq:
    """A vertex sequence ``v_0 .. v_l`` with every consecutive pair an edge."""

    def __init__(self, graph, verts, check=True):
        arr = np.ascontiguousarray(np.asarray(verts, dtype=_I64).reshape(-1))
        if len(arr) == 0:
            raise ValueError("a walk has at least one vertex")
        self.graph = graph
        self.verts = arr
        self.verts.setflags(write=False)
        if check:
            idx = np.ascontiguousarray(graph.index_of(arr))
            indptr, indices = graph._csr
            bad = _kernels.first_invalid_step(idx, indptr, indices)
            if bad >= 0:
                raise ValueError(
                    f"not a walk: ({arr[bad]}, {arr[bad + 1]}) at step {bad} is not an edge")

    @property
    def length(self):
        return len(self.verts) - 1

    def __len__(self):
        return len(self.verts)

    def __eq__(self, other):
        return (isinstance(other, WalkSeq) and self.graph is other.graph
                and np.array_equal(self.verts, other.verts))

    __hash__ = None

    def __repr__(self):
        head = self.verts[:8].tolist()
        more = ", ..." if len(self.verts) > 8 else ""
        return f"WalkSeq(length={self.length}, verts={head}{more})"


def map_walk(h, w):
    if w.graph is not h.source:
        raise ValueError("walk does not live in the source graph of the map")
    img = h.target.vertex_ids[h._image[h.source.index_of(w.verts)]]
    return WalkSeq(h.target, img, check=False)


def concat_walks(w1, w2):
    if w1.graph is not w2.graph:
        raise ValueError("walks live in different graphs")
    if w1.verts[-1] != w2.verts[0]:
        raise ValueError(f"endpoint mismatch: {w1.verts[-1]} != {w2.verts[0]}")
    return WalkSeq(w1.graph, np.concatenate([w1.verts, w2.verts[1:]]), check=False)


class WalkKind(Enum):
    WALK = "walk"
    PATH = "path"
    CYCLE = "cycle"
    CIRCUIT = "circuit"


def classify_walk(w):
    """Most specific kind: circuit, cycle, path or plain walk.

    The trivial walk of length 0 is reported as a path.
    """
    v = w.verts
    if w.length == 0:
        return WalkKind.PATH
    if v[0] == v[-1]:
        inner = v[:-1]
        if len(np.unique(inner)) == len(inner):
            return WalkKind.CIRCUIT
        return WalkKind.CYCLE
    if len(np.unique(v)) == len(v):
        return WalkKind.PATH
    return WalkKind.WALK
