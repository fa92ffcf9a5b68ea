"""Independent audits of cycles, matchings, forests and fractional matchings.

Everything here is recomputed from the raw edge list and colour lookups; no
constructor code is reused.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

from .hypergraph import Colouring, Hypergraph


class VerificationError(ValueError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class DiscrepancyReport:
    kind: str
    m: int
    counts: tuple[int, ...]
    majority: int
    surplus: float

    @property
    def r(self) -> int:
        return len(self.counts)

    @property
    def scaled(self) -> float:
        return self.r * self.surplus

    def to_dict(self) -> dict:
        return {"kind": self.kind, "m": self.m, "counts": list(self.counts), "majority": self.majority,
                "surplus": self.surplus, "scaled_discrepancy": self.scaled}


def _report(kind: str, C: Colouring, edges: Iterable[tuple[int, ...]]) -> DiscrepancyReport:
    counts = [0] * C.r
    m = 0
    for e in edges:
        counts[C[e]] += 1
        m += 1
    top = max(range(C.r), key=lambda c: (counts[c], -c))
    return DiscrepancyReport(kind, m, tuple(counts), top, counts[top] - m / C.r)


def verify_cycle(G: Hypergraph, C: Colouring, cycle) -> DiscrepancyReport:
    """Check every cyclic window of a tight Hamilton cycle against ``G``."""
    vs = list(getattr(cycle, "vertices", cycle))
    n, k = G.n, G.k
    if len(vs) != n:
        raise VerificationError(f"cycle has {len(vs)} vertices, host has {n}")
    if sorted(vs) != list(range(n)):
        missing = sorted(set(range(n)) - set(vs))
        raise VerificationError(f"cycle is not a permutation of the vertices; missing {missing}", missing)
    windows = []
    for i in range(n):
        w = tuple(sorted(vs[(i + j) % n] for j in range(k)))
        if not G.has_edge(w):
            raise VerificationError(f"window {i} {w} is not an edge", (i, w))
        windows.append(w)
    return _report("cycle", C, windows)


def verify_matching(G: Hypergraph, C: Colouring, M: Iterable[Iterable[int]], perfect: bool = True) -> DiscrepancyReport:
    owner: dict[int, tuple[int, ...]] = {}
    edges = []
    for raw in M:
        e = tuple(sorted(raw))
        if not G.has_edge(e):
            raise VerificationError(f"{e} is not an edge", e)
        for v in e:
            if v in owner:
                raise VerificationError(f"edges {owner[v]} and {e} share vertex {v}", v)
            owner[v] = e
        edges.append(e)
    if perfect and G.k * len(edges) != G.n:
        raise VerificationError(f"matching has {len(edges)} edges; a perfect one needs {G.n / G.k}",
                                sorted(set(range(G.n)) - set(owner)))
    return _report("matching", C, edges)


def verify_forest(G: Hypergraph, C: Colouring, paths: Sequence[Sequence[int]]) -> DiscrepancyReport:
    seen: set[int] = set()
    edges = []
    k = G.k
    for p in paths:
        p = list(p)
        if seen.intersection(p) or len(set(p)) != len(p):
            raise VerificationError(f"path {p} repeats a vertex", p)
        seen.update(p)
        for i in range(len(p) - k + 1):
            w = tuple(sorted(p[i:i + k]))
            if not G.has_edge(w):
                raise VerificationError(f"window {w} of path {p} is not an edge", w)
            edges.append(w)
    return _report("forest", C, edges)


def verify_pfm(x, tol: float = 1e-9) -> tuple[bool, list[str]]:
    """Re-sum every vertex constraint and check every normality bound."""
    G = x.host
    n, k, mu = G.n, G.k, x.mu
    lo, hi = mu * n ** (1 - k), n ** (1 - k) / mu
    sums: dict[int, list[float]] = defaultdict(list)
    problems = []
    for e, w in zip(G.edges, list(x.values)):
        w = float(w)
        if w < lo or w > hi:
            problems.append(f"edge {e}: weight {w!r} outside [{lo!r}, {hi!r}]")
        for v in e:
            sums[v].append(w)
    for v in range(n):
        s = math.fsum(sums[v])
        if abs(s - 1.0) > tol:
            problems.append(f"vertex {v}: weight sum {s!r}")
    return not problems, problems
