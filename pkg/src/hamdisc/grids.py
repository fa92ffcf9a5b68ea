"""Grids, alternating-grid search and near-alternating gadgets.

A u-grid has u*u distinct cells; row i is a "horizontal" edge and column j a
"vertical" edge. Alternating means every horizontal is red and every vertical
blue; near-alternating tolerates one exception of each kind.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .cleaning import MultiColouring, clean_bicolour, degree_audit, shadow_colouring
from .hypergraph import BLUE, RED, Colouring, Edge, Hypergraph, HypergraphError, canon
from .ledger import Ledger

log = logging.getLogger(__name__)


class PreconditionError(HypergraphError):
    """The codegree hypothesis of the gadget search does not hold."""


@dataclass(frozen=True)
class Grid:
    cells: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        cells = tuple(tuple(row) for row in self.cells)
        object.__setattr__(self, "cells", cells)
        u = len(cells)
        if any(len(row) != u for row in cells):
            raise HypergraphError("grid cells must form a square matrix")
        flat = [v for row in cells for v in row]
        if len(set(flat)) != len(flat):
            raise HypergraphError("grid cells must be distinct")

    @property
    def size(self) -> int:
        return len(self.cells)

    def horizontals(self) -> list[Edge]:
        return [canon(row) for row in self.cells]

    def verticals(self) -> list[Edge]:
        return [canon(col) for col in zip(*self.cells)]

    def edges(self) -> list[Edge]:
        return self.horizontals() + self.verticals()

    def vertices(self) -> frozenset[int]:
        return frozenset(v for row in self.cells for v in row)

    def transposed(self) -> Grid:
        return Grid(tuple(zip(*self.cells)))

    def key(self) -> tuple:
        return (frozenset(self.horizontals()), frozenset(self.verticals()))


@dataclass(frozen=True)
class NearAlternatingGrid:
    """A k-grid of a 2-coloured k-graph with at most one non-red horizontal
    and at most one non-blue vertical edge."""

    grid: Grid
    odd_horizontal: int | None
    odd_vertical: int | None

    @classmethod
    def from_colouring(cls, grid: Grid, C: Colouring) -> NearAlternatingGrid:
        odd_h = [i for i, e in enumerate(grid.horizontals()) if C[e] != RED]
        odd_v = [j for j, e in enumerate(grid.verticals()) if C[e] != BLUE]
        if len(odd_h) > 1 or len(odd_v) > 1:
            raise HypergraphError("grid is not near-alternating under this colouring")
        return cls(grid, odd_h[0] if odd_h else None, odd_v[0] if odd_v else None)

    @property
    def cells(self):
        return self.grid.cells

    def edges(self) -> list[Edge]:
        return self.grid.edges()

    def to_dict(self) -> dict:
        return {
            "cells": [list(row) for row in self.grid.cells],
            "odd_horizontal": self.odd_horizontal,
            "odd_vertical": self.odd_vertical,
        }


@dataclass(frozen=True)
class AlmostMonochromatic:
    majority: int
    minority_size: int
    proven: bool = False  # True when no alternating grid exists in the shadow at all


def verify_grid(G: Hypergraph, C: Colouring, g: NearAlternatingGrid) -> bool:
    """Check the gadget invariants against ``G`` and ``C`` from scratch."""
    cells = g.grid.cells
    k = G.k
    if len(cells) != k or any(len(row) != k for row in cells):
        return False
    flat = [v for row in cells for v in row]
    if len(set(flat)) != k * k or any(not 0 <= v < G.n for v in flat):
        return False
    rows = [tuple(sorted(row)) for row in cells]
    cols = [tuple(sorted(col)) for col in zip(*cells)]
    if not all(G.has_edge(e) for e in rows + cols):
        return False
    odd_h = [i for i, e in enumerate(rows) if C[e] != RED]
    odd_v = [j for j, e in enumerate(cols) if C[e] != BLUE]
    if len(odd_h) > 1 or len(odd_v) > 1:
        return False
    return odd_h == ([g.odd_horizontal] if g.odd_horizontal is not None else []) and \
        odd_v == ([g.odd_vertical] if g.odd_vertical is not None else [])


# -- alternating grid search -----------------------------------------------


class _Extensions:
    """For each colour, map a sorted partial set P to the vertices v with
    ``P + v`` inside some edge usable in that colour."""

    def __init__(self, M: MultiColouring):
        self.u = M.host.k
        self.ext: dict[int, dict[Edge, set[int]]] = {RED: {}, BLUE: {}}
        self.edges: dict[int, list[Edge]] = {RED: [], BLUE: []}
        for e, cs in M.colours.items():
            for c in cs:
                self.edges[c].append(e)
                table = self.ext[c]
                for mask in range(1, 1 << self.u):
                    part = tuple(e[i] for i in range(self.u) if mask >> i & 1)
                    for i in range(len(part)):
                        table.setdefault(part[:i] + part[i + 1:], set()).add(part[i])
        for c in (RED, BLUE):
            self.edges[c].sort()

    def candidates(self, row: tuple[int, ...], col: tuple[int, ...]) -> set[int]:
        a = self.ext[RED].get(tuple(sorted(row)))
        b = self.ext[BLUE].get(tuple(sorted(col)))
        if not a or not b:
            return set()
        return a & b


@dataclass
class GridSearch:
    grids: list[Grid]
    complete: bool  # the whole search space was enumerated
    attempts: int


def exhaustive_bound(n: int, u: int) -> float:
    if n < u * u:
        return 0.0
    return math.comb(n, u * u) * math.factorial(u * u)


def _random_attempt(ext: _Extensions, rng: np.random.Generator) -> Grid | None:
    u = ext.u
    reds = ext.edges[RED]
    first = list(reds[int(rng.integers(len(reds)))])
    rng.shuffle(first)
    cells = [tuple(first)]
    used = set(first)
    for i in range(1, u):
        row: list[int] = []
        for j in range(u):
            col = tuple(cells[r][j] for r in range(i))
            cand = sorted(ext.candidates(tuple(row), col) - used)
            if not cand:
                return None
            v = cand[int(rng.integers(len(cand)))]
            row.append(v)
            used.add(v)
        cells.append(tuple(row))
    return Grid(tuple(cells))


def _exhaustive(ext: _Extensions) -> Iterator[Grid]:
    """Enumerate alternating grids in canonical form: the smallest cell is
    top-left, the first row and the first column increase."""
    u = ext.u
    for first in ext.edges[RED]:
        lo = first[0]
        cells = [first]
        used = set(first)

        def fill(i: int, j: int, row: list[int]) -> Iterator[Grid]:
            if i == u:
                yield Grid(tuple(cells))
                return
            col = tuple(cells[r][j] for r in range(i))
            cand = ext.candidates(tuple(row), col) - used
            for v in sorted(cand):
                if v <= lo or (j == 0 and v <= cells[i - 1][0]):
                    continue
                used.add(v)
                row.append(v)
                if j + 1 == u:
                    cells.append(tuple(row))
                    yield from fill(i + 1, 0, [])
                    cells.pop()
                else:
                    yield from fill(i, j + 1, row)
                row.pop()
                used.discard(v)

        yield from fill(1, 0, [])


def search_alternating_grids(M: MultiColouring, rng: np.random.Generator | None = None, *,
                             attempts: int = 100_000, stall: int | None = None,
                             ceiling: float = 1e9, limit: int = 1) -> GridSearch:
    """Randomized assembly first, then exhaustive backtracking if affordable.

    ``stall`` ends the randomized phase early after that many consecutive
    failures, but only when the exhaustive phase is within ``ceiling``.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    ext = _Extensions(M)
    u, n = ext.u, M.host.n
    if not ext.edges[RED] or not ext.edges[BLUE] or n < u * u:
        return GridSearch([], True, 0)
    affordable = exhaustive_bound(n, u) <= ceiling
    found: dict[tuple, Grid] = {}
    misses = 0
    tried = 0
    for tried in range(1, attempts + 1):
        g = _random_attempt(ext, rng)
        if g is None:
            misses += 1
            if stall is not None and affordable and misses >= stall and not found:
                break
            continue
        misses = 0
        found.setdefault(g.key(), g)
        if len(found) >= limit:
            break
    if found:
        return GridSearch(list(found.values()), False, tried)
    if not affordable:
        return GridSearch([], False, tried)
    grids = []
    for g in _exhaustive(ext):
        grids.append(g)
        if len(grids) >= limit:
            return GridSearch(grids, False, tried)
    return GridSearch(grids, True, tried)


def find_alternating_grid(M: MultiColouring, rng: np.random.Generator | None = None, **kw) -> Grid | None:
    """An alternating grid of ``M``'s uniformity, or None if the budget runs out.

    Double-coloured edges may serve either role.
    """
    res = search_alternating_grids(M, rng, limit=1, **kw)
    return res.grids[0] if res.grids else None


# -- gadgets in G -----------------------------------------------------------


def _coloured_nbrs(G: Hypergraph, C: Colouring, S: tuple[int, ...], colour: int) -> list[int]:
    return [v for v in G.neighbours(S) if C[canon((*S, v))] == colour]


def extend_to_near_alternating(G: Hypergraph, C: Colouring, epsilon: float, W: Grid,
                               budget: int = 20_000) -> NearAlternatingGrid | None:
    """Complete an alternating (k-1)-grid of the coloured shadow to a gadget of G.

    Rows of W are extended by a fresh tuple R to red edges, columns by a fresh
    tuple B to blue edges, both with codegree at least ``(1/2 + epsilon) n``;
    the corner is a common neighbour of R and B.
    """
    k = G.k
    if W.size != k - 1:
        raise HypergraphError(f"expected a {k - 1}-grid, got size {W.size}")
    if not all(len(e) == k - 1 for e in W.edges()) or any(v >= G.n for v in W.vertices()):
        raise HypergraphError("grid does not fit the host")
    threshold = (0.5 + epsilon) * G.n
    wset = W.vertices()
    rows = [canon(r) for r in W.cells]
    cols = [canon(c) for c in zip(*W.cells)]
    row_opts = [[v for v in _coloured_nbrs(G, C, r, RED) if v not in wset] for r in rows]
    col_opts = [[v for v in _coloured_nbrs(G, C, c, BLUE) if v not in wset] for c in cols]
    if not all(row_opts) or not all(col_opts):
        return None
    nodes = 0

    def tuples(opts: list[list[int]], avoid: set[int]) -> Iterator[tuple[int, ...]]:
        nonlocal nodes
        chosen: list[int] = []

        def rec(i: int) -> Iterator[tuple[int, ...]]:
            nonlocal nodes
            if i == len(opts):
                if G.degree(chosen) >= threshold:
                    yield tuple(chosen)
                return
            for v in opts[i]:
                nodes += 1
                if nodes > budget:
                    return
                if v in avoid or v in chosen:
                    continue
                chosen.append(v)
                yield from rec(i + 1)
                chosen.pop()

        yield from rec(0)

    for R in tuples(row_opts, set()):
        nr = set(G.neighbours(R))
        for B in tuples(col_opts, set(R)):
            taken = wset | set(R) | set(B)
            corner = sorted(v for v in nr.intersection(G.neighbours(B)) if v not in taken)
            if corner:
                cells = [list(row) + [R[i]] for i, row in enumerate(W.cells)]
                cells.append(list(B) + [corner[0]])
                return NearAlternatingGrid.from_colouring(Grid(tuple(map(tuple, cells))), C)
            if nodes > budget:
                return None
        if nodes > budget:
            return None
    return None


def _verdict(G: Hypergraph, C: Colouring, proven: bool) -> AlmostMonochromatic:
    sizes = C.class_sizes()
    major = RED if sizes[RED] >= sizes[BLUE] else BLUE
    return AlmostMonochromatic(major, sizes[1 - major], proven)


def find_gadget(G: Hypergraph, C: Colouring, epsilon: float, ledger: Ledger | None = None,
                rng: np.random.Generator | None = None) -> NearAlternatingGrid | AlmostMonochromatic:
    """Either a near-alternating k-grid of G or an almost-monochromatic verdict."""
    ledger = ledger or Ledger()
    rng = rng if rng is not None else np.random.default_rng(0)
    if C.r != 2:
        raise HypergraphError(f"find_gadget needs a 2-colouring, got r={C.r}")
    low = degree_audit(G, epsilon)
    allowance = ledger.zeta * G.n ** (G.k - 1)
    if len(low) > allowance:
        raise PreconditionError(
            f"{len(low)} (k-1)-sets have degree below (1/2+{epsilon})n, allowance {allowance:.1f}; "
            f"first is {low[0]} with degree {G.degree(low[0])}")
    sizes = C.class_sizes()
    if min(sizes) == 0:
        return _verdict(G, C, True)
    cleaned = clean_bicolour(G, C, ledger.clean_t).cleaned
    H = shadow_colouring(cleaned, C)
    search = search_alternating_grids(
        H, rng, attempts=ledger.grid_attempts, stall=ledger.grid_stall,
        ceiling=ledger.exhaustive_ceiling, limit=ledger.extend_tries)
    for W in search.grids:
        gadget = extend_to_near_alternating(G, C, epsilon, W, ledger.extend_budget)
        if gadget is not None:
            return gadget
    # cleaning can erase sparse gadgets, so look for an alternating k-grid in G directly
    direct = search_alternating_grids(
        MultiColouring.from_colouring(C), rng, attempts=ledger.grid_stall, stall=ledger.grid_stall,
        ceiling=ledger.exhaustive_ceiling, limit=1)
    if direct.grids:
        return NearAlternatingGrid.from_colouring(direct.grids[0], C)
    return _verdict(G, C, search.complete and not search.grids)


def collect_disjoint_gadgets(G: Hypergraph, C: Colouring, epsilon: float, m: int,
                             ledger: Ledger | None = None, rng: np.random.Generator | None = None,
                             ) -> tuple[list[NearAlternatingGrid], AlmostMonochromatic | None]:
    """Greedily extract up to ``m`` pairwise edge-disjoint gadgets.

    Each search runs on the host minus the edges of the gadgets found so far,
    with the codegree slack halved. A minority class of at most
    ``mono_fraction * n**k`` edges is reported as almost monochromatic
    without searching.
    """
    if m < 1:
        raise HypergraphError(f"gadget target must be >= 1, got {m}")
    rng = rng if rng is not None else np.random.default_rng(0)
    sizes = C.class_sizes()
    if min(sizes) <= (ledger or Ledger()).mono_fraction * G.n ** G.k:
        return [], _verdict(G, C, min(sizes) == 0)
    work, gadgets = G, []
    while len(gadgets) < m:
        try:
            res = find_gadget(work, C.restrict(work), epsilon / 2, ledger, rng)
        except PreconditionError as exc:
            log.info("gadget collection stopped after %d gadgets: %s", len(gadgets), exc)
            return gadgets, None
        if isinstance(res, AlmostMonochromatic):
            return gadgets, res
        gadgets.append(res)
        work = work.without(res.edges())
    return gadgets, None


def gadgets_to_json(gadgets: list[NearAlternatingGrid]) -> str:
    return json.dumps([g.to_dict() for g in gadgets])
