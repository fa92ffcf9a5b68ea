"""Normal perfect fractional matchings and gadget-based discrepancy boosting."""

from __future__ import annotations

import csv
import io
import logging
import math
import warnings
from dataclasses import dataclass
from typing import Iterable, NamedTuple, TextIO

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from .grids import NearAlternatingGrid, collect_disjoint_gadgets
from .hypergraph import Colouring, Edge, Hypergraph, HypergraphError, canon, merge_colours
from .ledger import Ledger

log = logging.getLogger(__name__)


class NoNormalPFM(HypergraphError):
    """No mu-normal perfect fractional matching was found."""


@dataclass(frozen=True, eq=False)
class FractionalMatching:
    """Edge weights aligned with ``host.edges``."""

    host: Hypergraph
    values: np.ndarray
    mu: float

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (len(self.host.edges),):
            raise HypergraphError("one weight per host edge is required")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "_pos", {e: i for i, e in enumerate(self.host.edges)})

    @property
    def lower(self) -> float:
        return self.mu * self.host.n ** (1 - self.host.k)

    @property
    def upper(self) -> float:
        return self.host.n ** (1 - self.host.k) / self.mu

    @property
    def weights(self) -> dict[Edge, float]:
        return dict(zip(self.host.edges, self.values.tolist()))

    def weight(self, e: Iterable[int]) -> float:
        i = self._pos.get(canon(e))
        return 0.0 if i is None else float(self.values[i])

    def vertex_sums(self) -> np.ndarray:
        return incidence(self.host) @ self.values


def incidence(G: Hypergraph) -> sparse.csr_matrix:
    m = len(G.edges)
    rows = np.fromiter((v for e in G.edges for v in e), dtype=np.int64, count=m * G.k)
    cols = np.repeat(np.arange(m), G.k)
    return sparse.csr_matrix((np.ones(m * G.k), (rows, cols)), shape=(G.n, m))


def _affine_correction(A: sparse.csr_matrix, x: np.ndarray) -> np.ndarray:
    """Least-norm ``d`` with ``A (x + d) = 1``."""
    gram = (A @ A.T).toarray()
    resid = 1.0 - A @ x
    y = np.linalg.lstsq(gram, resid, rcond=None)[0]
    return A.T @ y


def _feasible(A, x, lo, hi, tol) -> bool:
    return bool(np.all(x >= lo) and np.all(x <= hi) and np.max(np.abs(A @ x - 1.0)) <= tol)


def solve_pfm(G: Hypergraph, mu: float, tol: float = 1e-9, epsilon: float | None = None) -> FractionalMatching:
    """A mu-normal perfect fractional matching of ``G``.

    Tries the Euclidean projection of the uniform weighting onto the vertex
    constraints first; when that leaves the normality box an LP with slightly
    tightened bounds is solved and projected back onto the constraints.
    """
    n, k, m = G.n, G.k, len(G.edges)
    if not 0 < mu <= 1:
        raise HypergraphError(f"normality parameter must lie in (0, 1], got {mu}")
    if epsilon is not None and n >= k and G.min_codegree() < (0.5 + epsilon) * n:
        warnings.warn("host is below the codegree threshold; a normal PFM may not exist", stacklevel=2)
    if m == 0:
        raise NoNormalPFM("the host has no edges")
    lo, hi = mu * n ** (1 - k), n ** (1 - k) / mu
    A = incidence(G)

    x = np.full(m, n / k / m)
    x = x + _affine_correction(A, x)
    if _feasible(A, x, lo, hi, tol):
        return FractionalMatching(G, x, mu)

    margin = 1e-3 * (hi - lo)
    res = linprog(np.zeros(m), A_eq=A, b_eq=np.ones(n), bounds=(lo + margin, hi - margin),
                  method="highs", options={"primal_feasibility_tolerance": 1e-10})
    if res.status != 0:
        raise NoNormalPFM(f"LP solver reports status {res.status}: {res.message}")
    x = res.x + _affine_correction(A, res.x)
    if not _feasible(A, x, lo, hi, tol):
        raise NoNormalPFM(f"LP point could not be polished to tolerance {tol}")
    return FractionalMatching(G, x, mu)


def subset_weight(x: FractionalMatching, S: Iterable[int]) -> float:
    """Total weight of the edges containing ``S``."""
    G = x.host
    s = canon(set(S))
    if len(s) > G.k:
        raise HypergraphError(f"|S| = {len(s)} exceeds k = {G.k}")
    if len(s) == G.k:
        return x.weight(s)
    if len(s) == G.k - 1:
        return math.fsum(x.weight((*s, v)) for v in G.neighbours(s))
    members = set(s)
    return math.fsum(w for e, w in zip(G.edges, x.values.tolist()) if members.issubset(e))


def colour_weights(x: FractionalMatching, C: Colouring) -> list[float]:
    buckets: list[list[float]] = [[] for _ in range(C.r)]
    for e, w in zip(x.host.edges, x.values.tolist()):
        buckets[C[e]].append(w)
    return [math.fsum(b) for b in buckets]


def default_delta(x0: FractionalMatching) -> float:
    return x0.lower / 4


def boost_discrepancy(x0: FractionalMatching, gadgets: list[NearAlternatingGrid],
                      delta_w: float | None = None) -> FractionalMatching:
    """Shift ``delta_w`` from the vertical to the horizontal edges of every gadget.

    The result is ``x0.mu / 2``-normal provided ``delta_w <= x0.lower / 2``.
    """
    delta = default_delta(x0) if delta_w is None else delta_w
    if not 0 <= delta <= x0.lower / 2 * (1 + 1e-12):
        raise HypergraphError(f"delta_w={delta} must lie in [0, {x0.lower / 2}]")
    pos = x0._pos
    vals = x0.values.copy()
    seen: set[Edge] = set()
    for g in gadgets:
        edges = g.grid.edges()
        if seen.intersection(edges):
            raise HypergraphError("gadgets are not pairwise edge-disjoint")
        seen.update(edges)
        for e in g.grid.horizontals():
            vals[pos[e]] += delta
        for e in g.grid.verticals():
            vals[pos[e]] -= delta
    if not gadgets:
        return FractionalMatching(x0.host, vals, x0.mu)
    return FractionalMatching(x0.host, vals, x0.mu / 2)


class DiscrepantPFM(NamedTuple):
    matching: FractionalMatching
    majority: int
    mu_out: float
    weights: list[float]
    gadgets: int
    branch: str


def _score(x: FractionalMatching, C: Colouring) -> tuple[int, float, list[float]]:
    n, k, r = x.host.n, x.host.k, C.r
    w = colour_weights(x, C)
    major = max(range(r), key=lambda c: (w[c], -c))
    gain = w[major] * r * k / n - 1
    return major, min(x.mu, gain), w


def discrepant_pfm(G: Hypergraph, C: Colouring, epsilon: float, ledger: Ledger | None = None,
                   rng: np.random.Generator | None = None) -> DiscrepantPFM:
    """A normal PFM in which one colour class gets more than its fair share.

    For every colour c, c is merged against the rest and edge-disjoint gadgets
    push weight towards whichever side already holds its fair share. The trial
    with the largest ``mu_out`` is kept, where ``mu_out`` is the smaller of the
    normality and the relative surplus of the heaviest colour.
    """
    ledger = ledger or Ledger()
    rng = rng if rng is not None else np.random.default_rng(0)
    n, k, r = G.n, G.k, C.r
    x0 = solve_pfm(G, ledger.mu0, ledger.tol_pfm)
    w0 = colour_weights(x0, C)
    best: DiscrepantPFM | None = None
    for c1 in range(r):
        merged = merge_colours(C, c1)
        gadgets, verdict = collect_disjoint_gadgets(G, merged, epsilon, ledger.gadget_target, ledger, rng)
        if not gadgets:
            x, branch = x0, "averaging"
        elif w0[c1] >= n / (r * k):
            x, branch = boost_discrepancy(x0, gadgets), "boost_merged_red"
        else:
            flipped = [NearAlternatingGrid(g.grid.transposed(), g.odd_vertical, g.odd_horizontal)
                       for g in gadgets]
            x, branch = boost_discrepancy(x0, flipped), "boost_merged_blue"
        major, mu_out, w = _score(x, C)
        cand = DiscrepantPFM(x, major, mu_out, w, len(gadgets), branch)
        log.debug("colour %d: %s with %d gadgets, mu_out=%.4g", c1, branch, len(gadgets), mu_out)
        if best is None or (cand.mu_out, cand.weights[cand.majority]) > (best.mu_out, best.weights[best.majority]):
            best = cand
    assert best is not None
    return best


# -- serialization ------------------------------------------------------------


def write_pfm(x: FractionalMatching, fp: TextIO) -> None:
    """One ``v1,..,vk,weight`` row per edge; weights in round-trip repr."""
    w = csv.writer(fp, lineterminator="\n")
    for e, val in zip(x.host.edges, x.values.tolist()):
        w.writerow([*e, repr(val)])


def dumps_pfm(x: FractionalMatching) -> str:
    buf = io.StringIO()
    write_pfm(x, buf)
    return buf.getvalue()


def read_pfm(G: Hypergraph, fp: TextIO, mu: float) -> FractionalMatching:
    vals = {}
    for row in csv.reader(fp):
        if row:
            vals[canon(int(v) for v in row[:-1])] = float(row[-1])
    return FractionalMatching(G, np.array([vals.get(e, 0.0) for e in G.edges]), mu)
