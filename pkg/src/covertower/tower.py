"""The figure-8 tower of graph covers.

Level 0 is a single vertex with a loop. Level ``n >= 1`` is a wedge of the
circuits ``c_{n,1} .. c_{n,n}`` and the loop ``e_{n,0}`` at the base vertex
``v_{n,0}``. The cover from level ``n+1`` to level ``n`` sends the top
circuit ``c_{n+1,n+1}`` to the base vertex and rewrites ``c_{n+1,i}`` as::

    e + m(n,i) c_{n,i} + m(n,i+1) c_{n,i+1} + ... + m(n,n) c_{n,n} + e

Circuit lengths are exact Python integers; they leave the 64-bit range near
level 40 under the default schedule.
"""
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ExplicitLimitExceeded
from .graph import DirectedGraph, GraphHom
from .walks import SymWalk

DEFAULT_LIMIT = 10**7


def _schedule_value(schedule, n, what):
    if isinstance(schedule, int):
        return schedule
    if n < 1 or n > len(schedule):
        raise ConfigError(f"{what} schedule has no entry for level {n}")
    return schedule[n - 1]


@dataclass(frozen=True)
class TowerConfig:
    """Depth and the two schedules that determine a tower.

    ``top_length`` is ``l(c_{n,n})`` for ``n >= 1``: a constant or a tuple
    indexed from level 1. ``mult`` gives the multiplicity ``m(n,i)`` used when
    rewriting ``c_{n+1,i}``: a constant, or a tuple indexed from level 1 whose
    entries are either constants or tuples of length ``n``.
    """

    depth: int = 6
    top_length: object = 2
    mult: object = 2

    def top(self, n):
        return _schedule_value(self.top_length, n, "top_length")

    def multiplicity(self, n, i):
        row = _schedule_value(self.mult, n, "mult")
        if isinstance(row, int):
            return row
        if not 1 <= i <= len(row):
            raise ConfigError(f"mult row for level {n} has no entry {i}")
        return row[i - 1]

    def validate(self):
        if not isinstance(self.depth, int) or self.depth < 0:
            raise ConfigError(f"depth must be a non-negative integer, got {self.depth!r}")
        for n in range(1, self.depth + 1):
            if self.top(n) < 2:
                raise ConfigError(f"top_length at level {n} is {self.top(n)}; it must be >= 2")
        for n in range(1, self.depth):
            row = _schedule_value(self.mult, n, "mult")
            if not isinstance(row, int) and len(row) != n:
                raise ConfigError(f"mult row for level {n} must have {n} entries")
            for i in range(1, n + 1):
                if self.multiplicity(n, i) < 2:
                    raise ConfigError(
                        f"mult({n},{i}) is {self.multiplicity(n, i)}; it must be >= 2")
        return self


def _parse_int(text, line):
    try:
        return int(text.strip())
    except ValueError:
        raise ConfigError(f"expected an integer, got {text.strip()!r}", line) from None


def _parse_list(text, line):
    return tuple(_parse_int(part, line) for part in text.split(","))


def parse_config(text):
    """Parse the key-value config format.

    Recognised keys (``#`` starts a comment)::

        depth = 6
        top_length = 2            # or a per-level list: 2, 3, 2, ...
        mult = 2                  # or per-level constants: 2, 3, 2, ...
        mult[3] = 2, 2, 3         # explicit row for level 3 (overrides)
    """
    values = {}
    rows = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if key == "depth":
            values["depth"] = _parse_int(value, lineno)
        elif key in ("top_length", "mult"):
            parsed = _parse_list(value, lineno)
            values[key] = parsed[0] if len(parsed) == 1 and "," not in value else parsed
        elif key.startswith("mult[") and key.endswith("]"):
            level = _parse_int(key[5:-1], lineno)
            row = _parse_list(value, lineno)
            if len(row) != level:
                raise ConfigError(f"mult[{level}] needs {level} entries, got {len(row)}", lineno)
            rows[level] = row
        else:
            raise ConfigError(f"unknown key {key!r}", lineno)
    if rows:
        depth = values.get("depth", TowerConfig.depth)
        base = values.get("mult", TowerConfig.mult)
        levels = max(depth - 1, max(rows))
        values["mult"] = tuple(
            rows.get(n, _schedule_value(base, n, "mult")) for n in range(1, levels + 1))
    try:
        return TowerConfig(**values).validate()
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path):
    with open(path) as fh:
        return parse_config(fh.read())


@dataclass(frozen=True, order=True)
class VertexRef:
    """Vertex ``v_{level,circuit,position}``; circuit 0 is the base ``v_{level,0}``.

    Position 0 always means the base vertex. The other end of a circuit is
    normalized to the base by :meth:`Tower.vertex`.
    """

    level: int
    circuit: int = 0
    position: int = 0

    def __post_init__(self):
        if self.circuit == 0 or self.position == 0:
            object.__setattr__(self, "circuit", 0)
            object.__setattr__(self, "position", 0)

    @property
    def is_base(self):
        return self.circuit == 0

    def __str__(self):
        if self.is_base:
            return f"v_{{{self.level},0}}"
        return f"v_{{{self.level},{self.circuit},{self.position}}}"


class Tower:
    """Exact length table, rewrite templates and materialization for one config."""

    def __init__(self, config=None, limit=DEFAULT_LIMIT):
        config = (config or TowerConfig()).validate()
        self.config = config
        self.depth = config.depth
        self.limit = limit
        lengths = [(1,)]
        for n in range(1, self.depth + 1):
            prev = lengths[n - 1]
            row = [1]
            for i in range(1, n):
                row.append(2 + sum(config.multiplicity(n - 1, k) * prev[k] for k in range(i, n)))
            row.append(config.top(n))
            lengths.append(tuple(row))
        self._lengths = tuple(lengths)
        # _templates[n][i]: (tokens, starts) of the image of c_{n+1,i} at level n
        templates = []
        for n in range(self.depth):
            row = [None]
            for i in range(1, n + 2):
                if i == n + 1:
                    tokens = ((0, config.top(n + 1)),)
                else:
                    tokens = ((0, 1),) + tuple(
                        (k, config.multiplicity(n, k)) for k in range(i, n + 1)) + ((0, 1),)
                starts = [0]
                for sym, rep in tokens:
                    starts.append(starts[-1] + rep * lengths[n][sym])
                assert starts[-1] == lengths[n + 1][i]
                row.append((tokens, tuple(starts)))
            templates.append(tuple(row))
        self._templates = tuple(templates)
        self._levels = {}
        self._covers = {}

    def __repr__(self):
        return f"Tower(depth={self.depth}, config={self.config})"

    # -- lengths ---------------------------------------------------------

    def _check_level(self, n):
        if not 0 <= n <= self.depth:
            raise IndexError(f"level {n} outside 0..{self.depth}")

    def circuit_length(self, n, i):
        self._check_level(n)
        if not 1 <= i <= n:
            raise IndexError(f"circuit {i} does not exist at level {n}")
        return self._lengths[n][i]

    def loop_length(self, n):
        self._check_level(n)
        return 1

    def length(self, n, symbol):
        """Length of a token symbol at level n: 1 for the loop, else the circuit."""
        return self._lengths[n][symbol]

    def lengths(self, n):
        """``(l(n,1), ..., l(n,n))``."""
        self._check_level(n)
        return self._lengths[n][1:]

    # -- templates -------------------------------------------------------

    def template(self, n, i):
        """``(tokens, starts)`` for the image of ``c_{n+1,i}`` at level ``n``."""
        if not 0 <= n < self.depth or not 1 <= i <= n + 1:
            raise IndexError(f"no rewrite template for c_{{{n + 1},{i}}} in a depth-{self.depth} tower")
        return self._templates[n][i]

    def rewrite_template(self, n, i):
        return SymWalk(n, self.template(n, i)[0])

    def descend(self, n, i, j):
        """Image at level ``n-1`` of position ``j`` of ``c_{n,i}`` as (circuit, position)."""
        tokens, starts = self._templates[n - 1][i]
        t = bisect_right(starts, j) - 1
        if t >= len(tokens):
            return 0, 0
        sym, _ = tokens[t]
        if sym == 0:
            return 0, 0
        pos = (j - starts[t]) % self._lengths[n - 1][sym]
        return (sym, pos) if pos else (0, 0)

    # -- vertices --------------------------------------------------------

    def base(self, n):
        self._check_level(n)
        return VertexRef(n)

    def vertex(self, n, i, j):
        """Canonical reference for ``v_{n,i,j}`` (both circuit ends give the base)."""
        if i == 0:
            self._check_level(n)
            if j != 0:
                raise ValueError("the base vertex has no position")
            return VertexRef(n)
        length = self.circuit_length(n, i)
        if not 0 <= j <= length:
            raise ValueError(f"position {j} outside 0..{length} of c_{{{n},{i}}}")
        if j == length:
            return VertexRef(n)
        return VertexRef(n, i, j)

    def vertex_count(self, n):
        self._check_level(n)
        return 1 + sum(l - 1 for l in self.lengths(n))

    def _offsets(self, n):
        offsets = [0, 1]
        for l in self.lengths(n):
            offsets.append(offsets[-1] + l - 1)
        return offsets

    def vertex_id(self, v):
        """Integer id of ``v`` inside :meth:`materialize_level`."""
        if v.is_base:
            return 0
        return self._offsets(v.level)[v.circuit] + v.position - 1

    def vertex_ref(self, n, vid):
        if vid == 0:
            return VertexRef(n)
        offsets = self._offsets(n)
        i = bisect_right(offsets, vid) - 1
        if i > n:
            raise ValueError(f"vertex id {vid} outside level {n}")
        return VertexRef(n, i, vid - offsets[i] + 1)

    def circuit_ids(self, n, i):
        """Ids of ``v_{n,i,1} .. v_{n,i,l-1}`` followed by the base id 0."""
        start = self._offsets(n)[i]
        return np.append(np.arange(start, start + self.circuit_length(n, i) - 1, dtype=np.int64), 0)

    # -- materialization -------------------------------------------------

    def _require(self, size, limit=None):
        limit = self.limit if limit is None else limit
        if size > limit:
            raise ExplicitLimitExceeded(size, limit)

    def materialize_level(self, n):
        """``G_n`` as an explicit graph; vertex ids follow :meth:`vertex_id`."""
        if n in self._levels:
            return self._levels[n]
        count = self.vertex_count(n)
        self._require(count)
        src = [np.zeros(1, dtype=np.int64)]
        dst = [np.zeros(1, dtype=np.int64)]
        for i in range(1, n + 1):
            cyc = self.circuit_ids(n, i)
            src.append(np.concatenate([[0], cyc[:-1]]))
            dst.append(cyc)
        edges = np.stack([np.concatenate(src), np.concatenate(dst)], axis=1)
        g = DirectedGraph.from_arrays(np.arange(count, dtype=np.int64), edges)
        self._levels[n] = g
        return g

    def expand_ids(self, n, tokens, limit=None):
        """Vertex ids at level ``n`` of the walk spelled by ``tokens`` from the base."""
        size = 1 + sum(rep * self._lengths[n][sym] for sym, rep in tokens)
        self._require(size, limit)
        pieces = [np.zeros(1, dtype=np.int64)]
        cycles = {}
        for sym, rep in tokens:
            if sym == 0:
                pieces.append(np.zeros(rep, dtype=np.int64))
            else:
                if sym not in cycles:
                    cycles[sym] = self.circuit_ids(n, sym)
                pieces.append(np.tile(cycles[sym], rep))
        return np.concatenate(pieces)

    def materialize_cover(self, n):
        """The cover ``phi_n`` from level ``n+1`` to level ``n``."""
        if n in self._covers:
            return self._covers[n]
        if not 0 <= n < self.depth:
            raise IndexError(f"no cover phi_{n} in a depth-{self.depth} tower")
        source = self.materialize_level(n + 1)
        target = self.materialize_level(n)
        image = np.zeros(source.n_vertices, dtype=np.int64)
        offsets = self._offsets(n + 1)
        for i in range(1, n + 2):
            walk = self.expand_ids(n, self.template(n, i)[0])
            length = len(walk) - 1
            image[offsets[i]:offsets[i] + length - 1] = walk[1:length]
        h = GraphHom(source, target, image)
        self._covers[n] = h
        return h


def build_tower(cfg=None, limit=DEFAULT_LIMIT):
    """A tower from a :class:`TowerConfig` or, as a shorthand, a default config of depth ``cfg``."""
    if isinstance(cfg, int):
        cfg = TowerConfig(depth=cfg)
    return Tower(cfg, limit=limit)


def circuit_length(t, n, i):
    return t.circuit_length(n, i)


def materialize_level(t, n):
    return t.materialize_level(n)


def materialize_cover(t, n):
    return t.materialize_cover(n)


def rewrite_template(t, n, i):
    return t.rewrite_template(n, i)


def monotonicity_violations(t, upto=None):
    """Index tuples ``(m, n, l, l2)`` with ``m > n``, ``l <= l2 <= n`` and ``l(m,l) <= l(n,l2)``."""
    upto = t.depth if upto is None else upto
    bad = []
    for m in range(2, upto + 1):
        for n in range(1, m):
            for l in range(1, n + 1):
                for l2 in range(l, n + 1):
                    if t.circuit_length(m, l) <= t.circuit_length(n, l2):
                        bad.append((m, n, l, l2))
    return bad
