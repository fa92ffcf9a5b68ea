"""Cleaning low-degree (k-1)-sets and classifying bad/clean sets of the shadow."""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping

import numpy as np

from .hypergraph import BLUE, RED, Colouring, Edge, Hypergraph, HypergraphError


@dataclass(frozen=True)
class CleanedPair:
    original: Hypergraph
    cleaned: Hypergraph
    removed: tuple[Edge, ...]
    t: int
    colour: int | None = None  # None: whole edge set, -1: both colour classes


def _cleaning_loop(edges: Iterable[Edge], k: int, t: int) -> set[Edge]:
    """Edges deleted by repeatedly emptying the lexicographically least (k-1)-set
    whose degree lies in ``[1, t-1]``."""
    containing: dict[Edge, set[Edge]] = {}
    for e in edges:
        for i in range(k):
            containing.setdefault(e[:i] + e[i + 1:], set()).add(e)
    heap = [s for s, es in containing.items() if len(es) < t]
    heapq.heapify(heap)
    removed: set[Edge] = set()
    while heap:
        s = heapq.heappop(heap)
        doomed = containing[s]
        if not 0 < len(doomed) < t:
            continue
        for e in sorted(doomed):
            removed.add(e)
            for i in range(k):
                sub = e[:i] + e[i + 1:]
                es = containing[sub]
                es.discard(e)
                if sub != s and 0 < len(es) < t:
                    heapq.heappush(heap, sub)
    return removed


def clean(G: Hypergraph, t: int, C: Colouring | None = None, colour: int | None = None) -> CleanedPair:
    """Make every (k-1)-set have degree 0 or at least ``t``.

    With ``C`` and ``colour`` given, degrees are taken inside that colour class
    and only edges of that class can be removed.
    """
    if t < 1:
        raise HypergraphError(f"cleaning threshold must be >= 1, got {t}")
    if (C is None) != (colour is None):
        raise HypergraphError("pass both a colouring and a colour, or neither")
    pool = G.edges if C is None else [e for e in G.edges if C[e] == colour]
    removed = _cleaning_loop(pool, G.k, t)
    return CleanedPair(G, G.without(removed), tuple(sorted(removed)), t, colour)


def clean_bicolour(G: Hypergraph, C: Colouring, t: int) -> CleanedPair:
    """Clean the red and the blue class of a 2-colouring separately."""
    if C.r != 2:
        raise HypergraphError(f"clean_bicolour needs a 2-colouring, got r={C.r}")
    if t < 1:
        raise HypergraphError(f"cleaning threshold must be >= 1, got {t}")
    removed: set[Edge] = set()
    for c in (RED, BLUE):
        removed |= _cleaning_loop((e for e in G.edges if C[e] == c), G.k, t)
    return CleanedPair(G, G.without(removed), tuple(sorted(removed)), t, -1)


@dataclass
class MultiColouring:
    """Edges of ``host`` each carrying a non-empty set of usable colours."""

    host: Hypergraph
    colours: dict[Edge, frozenset[int]] = field(default_factory=dict)

    @classmethod
    def from_colouring(cls, C: Colouring) -> MultiColouring:
        return cls(C.host, {e: frozenset((C[e],)) for e in C.host.edges})

    def double_coloured(self) -> list[Edge]:
        return [e for e in self.host.edges if len(self.colours[e]) > 1]

    def usable(self, colour: int) -> list[Edge]:
        return [e for e in self.host.edges if colour in self.colours[e]]


def shadow_colouring(G: Hypergraph, C: Colouring) -> MultiColouring:
    """Colour each shadow set with the colours of the edges of ``G`` containing it.

    ``C`` may be a colouring of any super-hypergraph of ``G``.
    """
    cols: dict[Edge, set[int]] = {}
    for e in G.edges:
        c = C[e]
        for i in range(G.k):
            cols.setdefault(e[:i] + e[i + 1:], set()).add(c)
    H = Hypergraph(G.n, G.k - 1, cols)
    return MultiColouring(H, {s: frozenset(cs) for s, cs in sorted(cols.items())})


@dataclass(frozen=True)
class BadSetReport:
    bad: tuple[Edge, ...]
    clean: tuple[Edge, ...]
    epsilon: float
    caps: tuple[float, ...]

    def to_json(self) -> str:
        return json.dumps({
            "epsilon": self.epsilon,
            "caps": list(self.caps),
            "bad": [list(s) for s in self.bad],
            "clean": [list(s) for s in self.clean],
        })


def _masks(sets: Iterable[Edge]) -> np.ndarray:
    return np.array([sum(1 << v for v in s) for s in sets], dtype=np.uint64)


def classify_bad(G: Hypergraph, H: MultiColouring, epsilon: float, caps: Iterable[float] | None = None,
                 eta: float = 0.01) -> BadSetReport:
    """Bad sets have low degree in ``G`` or a double colour in ``H``; clean sets
    meet few bad sets in every intersection size."""
    if epsilon <= 0:
        raise HypergraphError(f"epsilon must be positive, got {epsilon}")
    n, k = G.n, G.k
    caps = tuple(caps) if caps is not None else tuple(eta ** 0.5 * n ** (k - 1 - j) for j in range(k))
    if len(caps) != k:
        raise HypergraphError(f"need {k} caps (one per intersection size), got {len(caps)}")
    threshold = (0.5 + epsilon / 2) * n
    everything = list(combinations(range(n), k - 1))
    bad = [s for s in everything
           if G.degree(s) < threshold or len(H.colours.get(s, ())) > 1]
    counts = _intersection_counts(everything, bad, n, k)
    clean = [s for s, row in zip(everything, counts) if all(row[j] <= caps[j] for j in range(k))]
    return BadSetReport(tuple(bad), tuple(clean), epsilon, caps)


def _intersection_counts(sets: list[Edge], bad: list[Edge], n: int, k: int) -> np.ndarray:
    """``out[i, j]`` = number of bad sets meeting ``sets[i]`` in exactly j vertices."""
    out = np.zeros((len(sets), k), dtype=np.int64)
    if not bad:
        return out
    if n <= 64:
        a, b = _masks(sets), _masks(bad)
        for lo in range(0, len(sets), 512):
            inter = np.bitwise_count(a[lo:lo + 512, None] & b[None, :])
            for j in range(k):
                out[lo:lo + 512, j] = (inter == j).sum(axis=1)
        return out
    for i, s in enumerate(sets):
        ss = set(s)
        for T in bad:
            out[i, len(ss.intersection(T))] += 1
    return out


def degree_audit(G: Hypergraph, epsilon: float) -> list[Edge]:
    """(k-1)-sets of ``G`` with degree below ``(1/2 + epsilon) n``."""
    threshold = (0.5 + epsilon) * G.n
    return [s for s, d in G.codegrees() if d < threshold]


def colour_degree(G: Hypergraph, C: Colouring | Mapping, S: Iterable[int], colour: int) -> int:
    """Degree of ``S`` counting only edges of the given colour."""
    return sum(1 for v in G.neighbours(S) if C[tuple(sorted((*S, v)))] == colour)
