"""Symbolic walks through the tower and circuit-occurrence gap analysis.

A :class:`SymWalk` is a run-length token list at one level: symbol 0 is the
loop ``e`` and symbol ``k >= 1`` is one full traversal of ``c_{level,k}``.
Walks are never flattened here; positions are exact integers.

An occurrence of ``c_{N,l}`` is one unit repetition of a ``C_l`` token. The
gap between two consecutive occurrences is the total length of what lies
strictly between them, so ``C_l^2`` contributes a gap of 0.
"""
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .graph import WalkSeq


@dataclass(frozen=True)
class SymWalk:
    level: int
    tokens: tuple

    def __post_init__(self):
        merged = []
        for sym, rep in self.tokens:
            sym, rep = int(sym), int(rep)
            if rep <= 0:
                raise ValueError(f"token repetition must be positive, got {rep}")
            if not 0 <= sym <= self.level:
                raise ValueError(f"symbol C_{sym} does not exist at level {self.level}")
            if merged and merged[-1][0] == sym:
                merged[-1] = (sym, merged[-1][1] + rep)
            else:
                merged.append((sym, rep))
        object.__setattr__(self, "tokens", tuple(merged))

    @classmethod
    def loop(cls, level, rep=1):
        return cls(level, ((0, rep),))

    @classmethod
    def circuit(cls, level, i, rep=1):
        return cls(level, ((i, rep),))

    def __add__(self, other):
        if not isinstance(other, SymWalk):
            return NotImplemented
        if other.level != self.level:
            raise ValueError("cannot concatenate walks from different levels")
        return SymWalk(self.level, self.tokens + other.tokens)

    def __str__(self):
        parts = []
        for sym, rep in self.tokens:
            name = "E" if sym == 0 else f"C_{sym}"
            parts.append(name if rep == 1 else f"{name}^{rep}")
        return " + ".join(parts) if parts else "(empty)"


def sym_length(t, w):
    return sum(rep * t.length(w.level, sym) for sym, rep in w.tokens)


def project_one(t, w):
    """Image of ``w`` one level down."""
    n = w.level
    if n == 0:
        raise ValueError("a level-0 walk cannot be projected further")
    out = []
    for sym, rep in w.tokens:
        if sym == 0:
            out.append((0, rep))
        else:
            out.extend(t.template(n - 1, sym)[0] * rep)
    return SymWalk(n - 1, out)


def project_to(t, w, m):
    if m > w.level:
        raise ValueError(f"cannot project a level-{w.level} walk up to level {m}")
    if m < 0:
        raise ValueError("negative level")
    while w.level > m:
        w = project_one(t, w)
    return w


def r_walk(t, n, d, m):
    """``m(n,d) phi(c_{n,d}) + ... + m(n,n) phi(c_{n,n}) + e`` projected to level ``m``.

    ``d = n + 1`` is accepted and gives the single loop.
    """
    if not 1 <= d <= n + 1 or not 0 <= m <= n or n > t.depth:
        raise IndexError(f"r_walk({n},{d},{m}) out of range")
    tokens = [(k, t.config.multiplicity(n, k)) for k in range(d, n + 1)] + [(0, 1)]
    return project_to(t, SymWalk(n, tokens), m)


def r_length(t, n, d):
    """Length of ``r_walk(t, n, d, m)`` for any ``m``."""
    if not 1 <= d <= n + 1 or n > t.depth:
        raise IndexError(f"r_length({n},{d}) out of range")
    return 1 + sum(t.config.multiplicity(n, k) * t.circuit_length(n, k) for k in range(d, n + 1))


def expand_explicit(t, w, limit=None):
    """The walk spelled by ``w`` in the materialized level graph."""
    ids = t.expand_ids(w.level, w.tokens, limit=limit)
    return WalkSeq(t.materialize_level(w.level), ids, check=False)


@dataclass(frozen=True)
class GapSpectrum:
    """Occurrences of ``c_{level,circuit}`` in a walk and the gaps between them.

    ``lead`` is the stretch before the first occurrence and ``tail`` the
    stretch after the last one; with no occurrences both are ``None``.
    """

    level: int
    circuit: int
    unit: int
    occurrences: tuple
    gaps: tuple
    length: int
    lead: object = None
    tail: object = None

    def to_csv(self):
        lines = ["index,start,gap_after"]
        for k, start in enumerate(self.occurrences):
            gap = self.gaps[k] if k < len(self.gaps) else ""
            lines.append(f"{k},{start},{gap}")
        return "\n".join(lines) + "\n"

    @property
    def max_gap(self):
        return max(self.gaps) if self.gaps else None


def _spectrum_from_starts(level, circuit, unit, starts, length):
    starts = tuple(starts)
    gaps = tuple(b - (a + unit) for a, b in zip(starts, starts[1:]))
    if starts:
        lead, tail = starts[0], length - (starts[-1] + unit)
    else:
        lead = tail = None
    return GapSpectrum(level, circuit, unit, starts, gaps, length, lead, tail)


def gap_spectrum(t, w, l):
    """Spectrum of ``c_{N,l}`` in ``w`` computed on the token runs."""
    N = w.level
    if not 1 <= l <= N:
        raise IndexError(f"circuit {l} does not exist at level {N}")
    unit = t.circuit_length(N, l)
    starts = []
    pos = 0
    for sym, rep in w.tokens:
        size = t.length(N, sym)
        if sym == l:
            starts.extend(range(pos, pos + rep * unit, unit))
        pos += rep * size
    return _spectrum_from_starts(N, l, unit, starts, pos)


def scan_spectrum(t, walk, level, l):
    """Brute-force spectrum: substring scan of an explicit walk for ``c_{level,l}``."""
    pattern = np.concatenate([[0], t.circuit_ids(level, l)])
    verts = np.ascontiguousarray(walk.verts)
    starts = _kernels.find_occurrences(verts, np.ascontiguousarray(pattern, dtype=np.int64))
    return _spectrum_from_starts(level, l, t.circuit_length(level, l), starts.tolist(), walk.length)


def g_formula(t, n, l, N):
    """Largest gap between occurrences of ``c_{N,l}`` in the image of ``2 c_{n,l}``."""
    if not (1 <= l <= N < n):
        raise IndexError(f"g_formula({n},{l},{N}) needs 1 <= l <= N < n")
    return n - N + sum(r_length(t, k, l + 1) for k in range(N, n))


@dataclass
class Report:
    """Outcome of one verifier call; ``details`` values are rendered with ``str``."""

    op: str
    params: dict
    passed: bool
    details: dict = field(default_factory=dict)

    def to_record(self):
        parts = [f"op={self.op}"]
        parts += [f"{k}={v}" for k, v in self.params.items()]
        parts.append("verdict=" + ("PASS" if self.passed else "FAIL"))
        parts += [f"{k}={v}" for k, v in self.details.items()]
        return " ".join(parts)

    def __bool__(self):
        return self.passed


def _circuit_image(t, n, l, N, rep=1):
    return project_to(t, SymWalk.circuit(n, l, rep), N)


def verify_spectrum(t, n, l, N):
    """Every nonzero gap of ``c_{N,l}`` inside the image of ``c_{n,l}`` is some
    ``g(m,l,N)`` with ``N < m <= n``; the doubled walk's largest gap is ``g(n,l,N)``;
    the stretch after the last occurrence has length ``sum_{k=N}^{n-1} |r(k,l+1)|``.
    """
    params = {"n": n, "l": l, "N": N}
    allowed = {g_formula(t, m, l, N): m for m in range(N + 1, n + 1)}
    own = gap_spectrum(t, _circuit_image(t, n, l, N), l)
    details = {"occurrences": len(own.occurrences)}
    for k, gap in enumerate(own.gaps):
        if gap != 0 and gap not in allowed:
            details.update(bad_gap=gap, at=own.occurrences[k] + own.unit)
            return Report("verify_spectrum", params, False, details)
    expected_tail = sum(r_length(t, k, l + 1) for k in range(N, n))
    if own.tail != expected_tail:
        details.update(tail=own.tail, expected_tail=expected_tail)
        return Report("verify_spectrum", params, False, details)
    doubled = gap_spectrum(t, _circuit_image(t, n, l, N, rep=2), l)
    g = g_formula(t, n, l, N)
    half = len(own.occurrences)
    junction = doubled.gaps[half - 1]
    details.update(max_gap=doubled.max_gap, g=g, junction_gap=junction, tail=own.tail)
    passed = doubled.max_gap == g and junction == g
    return Report("verify_spectrum", params, passed, details)


def _g_levels(t, l, N, n):
    return {g_formula(t, m, l, N): m for m in range(N + 1, n + 1)}


def verify_interleaving(t, n, l, N):
    """Between two gaps equal to ``g(m,l,N)`` there is a gap ``g(m',l,N)`` with ``m' > m``."""
    params = {"n": n, "l": l, "N": N}
    levels = _g_levels(t, l, N, n)
    gaps = gap_spectrum(t, _circuit_image(t, n, l, N), l).gaps
    last = {}      # gap value -> index of its latest appearance
    peak = {}      # gap value -> largest g-level seen since that appearance
    pairs = 0
    for k, gap in enumerate(gaps):
        if gap == 0:
            continue
        m = levels.get(gap)
        if m is None:
            return Report("verify_interleaving", params, False, {"bad_gap": gap, "index": k})
        if gap in last:
            pairs += 1
            if peak[gap] <= m:
                return Report("verify_interleaving", params, False,
                              {"gap": gap, "first_index": last[gap], "second_index": k})
        for v in peak:
            peak[v] = max(peak[v], m)
        last[gap] = k
        peak[gap] = 0
    pattern = ",".join(str(levels[g]) for g in gaps if g) if len(gaps) <= 64 else "..."
    return Report("verify_interleaving", params, True, {"pairs": pairs, "levels": pattern or "-"})


def verify_tail(t, n, l, N):
    """After the last ``c_{N,l}`` in the image of ``c_{n,l}``, ``c_{N,l+1}`` still
    occurs, and two of its gaps equal ``g(n-1,l+1,N)`` with only smaller gaps between.

    ``lead`` reports the stretch from the last ``c_{N,l}`` to the start of the
    last such pair.
    """
    params = {"n": n, "l": l, "N": N}
    if not (1 <= l < N and n >= N + 2):
        raise ValueError(f"verify_tail needs l < N and n >= N + 2, got {params}")
    walk = _circuit_image(t, n, l, N)
    own = gap_spectrum(t, walk, l)
    cut = own.occurrences[-1] + own.unit
    nxt = gap_spectrum(t, walk, l + 1)
    starts = [s for s in nxt.occurrences if s >= cut]
    if not starts:
        return Report("verify_tail", params, False, {"reason": "no c_{N,l+1} after the last c_{N,l}"})
    unit = nxt.unit
    gaps = [b - (a + unit) for a, b in zip(starts, starts[1:])]
    target = g_formula(t, n - 1, l + 1, N)
    hits = [k for k, gap in enumerate(gaps) if gap == target]
    good = [(a, b) for a, b in zip(hits, hits[1:]) if all(g < target for g in gaps[a + 1:b])]
    details = {"suffix_occurrences": len(starts), "target_gap": target, "pairs": len(good)}
    if not good:
        return Report("verify_tail", params, False, details)
    first_gap = good[-1][0]
    details["lead"] = starts[first_gap] + unit - cut
    return Report("verify_tail", params, True, details)
