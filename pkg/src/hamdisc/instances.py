"""Instance generators: Dirac-type hosts and the colourings used in experiments."""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

import numpy as np

from .hypergraph import BLUE, RED, Colouring, Hypergraph, HypergraphError

FAMILIES = ("complete", "random_dirac", "split_colour", "near_perfect_extremal")


def gen_complete(n: int, k: int) -> Hypergraph:
    if n < k:
        raise HypergraphError(f"need n >= k, got n={n}, k={k}")
    return Hypergraph(n, k, combinations(range(n), k))


def gen_random_dirac(n: int, k: int, p: float, seed: int) -> Hypergraph:
    """Binomial random k-graph: each k-set kept independently with probability p."""
    if not 0 < p <= 1:
        raise HypergraphError(f"edge probability must lie in (0, 1], got {p}")
    if n < k:
        raise HypergraphError(f"need n >= k, got n={n}, k={k}")
    rng = np.random.default_rng(seed)
    keep = rng.random(math.comb(n, k)) < p
    return Hypergraph(n, k, (e for e, kept in zip(combinations(range(n), k), keep) if kept))


def codegree_target(n: int, epsilon: float) -> int:
    return math.ceil((0.5 + epsilon) * n)


def densify_to_codegree(G: Hypergraph, target: int) -> Hypergraph:
    """Add lexicographically least missing edges until every (k-1)-set has degree >= target.

    A single lexicographic pass suffices since adding edges never lowers a degree.
    """
    n, k = G.n, G.k
    if target > n - k + 1:
        raise HypergraphError(f"codegree {target} is impossible with n={n}, k={k}")
    nbr = {s: set(vs) for s, vs in ((s, G.neighbours(s)) for s in combinations(range(n), k - 1))}
    added = []
    for s in combinations(range(n), k - 1):
        have = nbr[s]
        v = 0
        while len(have) < target:
            if v not in have and v not in s:
                e = tuple(sorted(s + (v,)))
                added.append(e)
                for i in range(k):
                    nbr[e[:i] + e[i + 1:]].add(e[i])
            v += 1
    if not added:
        return G
    return Hypergraph(n, k, list(G.edges) + added)


def gen_dirac(n: int, k: int, p: float, seed: int, epsilon: float) -> Hypergraph:
    """Random host densified to minimum codegree ``ceil((1/2 + epsilon) n)``."""
    return densify_to_codegree(gen_random_dirac(n, k, p, seed), codegree_target(n, epsilon))


def gen_split_colouring(G: Hypergraph, A: Iterable[int]) -> Colouring:
    """Blue for edges meeting A, red for the rest."""
    a = set(A)
    bad = [v for v in a if not 0 <= v < G.n]
    if bad:
        raise HypergraphError(f"vertices {sorted(bad)} are outside [0, {G.n})")
    return Colouring(G, 2, {e: BLUE if a.intersection(e) else RED for e in G.edges})


def gen_random_colouring(G: Hypergraph, r: int, seed: int) -> Colouring:
    rng = np.random.default_rng(seed)
    cols = rng.integers(0, r, size=len(G.edges))
    return Colouring(G, r, dict(zip(G.edges, cols.tolist())))


def gen_near_perfect_extremal(n: int) -> tuple[Hypergraph, Colouring]:
    """All triples meeting both halves; red when two vertices lie in the first half."""
    if n % 2 or n < 6:
        raise HypergraphError(f"extremal example needs an even n >= 6, got {n}")
    half = n // 2
    edges, colours = [], {}
    for e in combinations(range(n), 3):
        in_a = sum(v < half for v in e)
        if in_a in (1, 2):
            edges.append(e)
            colours[e] = RED if in_a == 2 else BLUE
    G = Hypergraph(n, 3, edges)
    return G, Colouring(G, 2, colours)


@dataclass(frozen=True)
class GenSpec:
    family: str = "split_colour"
    n: int = 24
    k: int = 3
    r: int = 2
    seed: int = 0
    p: float = 1.0
    epsilon: float = 0.1
    A: tuple[int, ...] | None = None
    colouring: str = "random"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise HypergraphError(f"unknown family {self.family!r}; choose from {FAMILIES}")
        if self.n < self.k:
            raise HypergraphError(f"need n >= k, got n={self.n}, k={self.k}")
        if not 0 < self.p <= 1:
            raise HypergraphError(f"edge probability must lie in (0, 1], got {self.p}")
        if self.colouring not in ("random", "mono"):
            raise HypergraphError(f"colouring must be 'random' or 'mono', got {self.colouring!r}")
        if self.A is not None:
            if any(not 0 <= v < self.n for v in self.A):
                raise HypergraphError("split set has a vertex outside [0, n)")
            if len(set(self.A)) >= self.n:
                raise HypergraphError("split set must be a proper subset of the vertices")

    def split_set(self) -> tuple[int, ...]:
        return self.A if self.A is not None else tuple(range(self.n // 2))


def _host(spec: GenSpec) -> Hypergraph:
    if spec.p == 1:
        return gen_complete(spec.n, spec.k)
    return gen_dirac(spec.n, spec.k, spec.p, spec.seed, spec.epsilon)


def generate(spec: GenSpec) -> tuple[Hypergraph, Colouring]:
    if spec.family == "near_perfect_extremal":
        return gen_near_perfect_extremal(spec.n)
    if spec.family == "split_colour":
        G = _host(spec)
        return G, gen_split_colouring(G, spec.split_set())
    G = gen_complete(spec.n, spec.k) if spec.family == "complete" else _host(spec)
    if spec.colouring == "mono":
        return G, Colouring.constant(G, spec.r)
    return G, gen_random_colouring(G, spec.r, spec.seed + 1)


def parse_genspec(text: str, **overrides) -> GenSpec:
    """Parse ``key=value`` lines (``A`` as a comma-separated list)."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    cp.read_string("[gen]\n" + text)
    raw = dict(cp["gen"])
    raw.update({k: v for k, v in overrides.items() if v is not None})
    kw: dict = {}
    for key, val in raw.items():
        if key in ("n", "k", "r", "seed"):
            kw[key] = int(val)
        elif key in ("p", "epsilon"):
            kw[key] = float(val)
        elif key == "a":
            kw["A"] = tuple(int(x) for x in str(val).split(",") if x.strip()) if val != "" else ()
        elif key in ("family", "colouring"):
            kw[key] = str(val)
        else:
            raise HypergraphError(f"unknown generator key {key!r}")
    return GenSpec(**kw)
