"""Path forests from sampled tight paths, tight-path connectors and the full
Hamilton-cycle pipeline."""

from __future__ import annotations

import json
import logging
import math
import time
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .fractional import discrepant_pfm
from .hypergraph import (Colouring, Edge, HamiltonCycle, Hypergraph, HypergraphError, TightPath, canon,
                         ordered_tuple, reverse)
from .ledger import Ledger
from .walk import SampledPath, WalkModel, red_count, sample_tight_paths

log = logging.getLogger(__name__)


class ConnectError(HypergraphError):
    """No connecting tight path within the order limit."""


class SpanningError(HypergraphError):
    """No connecting tight path through exactly the given pool."""


class PipelineError(HypergraphError):
    def __init__(self, message: str, diagnostics: list[dict]):
        super().__init__(message)
        self.diagnostics = diagnostics


# -- auxiliary t-graph and matching -----------------------------------------


@dataclass(frozen=True)
class AuxiliaryGraph:
    """Vertex sets of retained paths; ``w2[i]`` counts red edges of ``paths[i]``."""

    t: int
    n: int
    edges: tuple[frozenset[int], ...]
    paths: tuple[TightPath, ...]
    w2: tuple[int, ...]
    dropped: int = 0

    def degrees(self) -> np.ndarray:
        d = np.zeros(self.n, dtype=np.int64)
        for e in self.edges:
            d[list(e)] += 1
        return d

    def max_degree(self) -> int:
        return int(self.degrees().max()) if self.edges else 0


def build_auxiliary(paths: Sequence[SampledPath | TightPath], C: Colouring, colour: int = 0) -> AuxiliaryGraph:
    """Drop every path whose vertex set is shared with another path."""
    tps = [p.path if isinstance(p, SampledPath) else p for p in paths]
    if not tps:
        raise HypergraphError("no paths given")
    t = tps[0].order
    if any(p.order != t for p in tps):
        raise HypergraphError("all paths must have the same order")
    groups: dict[frozenset[int], int] = defaultdict(int)
    for p in tps:
        groups[frozenset(p.vertices)] += 1
    kept = [p for p in tps if groups[frozenset(p.vertices)] == 1]
    return AuxiliaryGraph(
        t=t, n=tps[0].host.n,
        edges=tuple(frozenset(p.vertices) for p in kept),
        paths=tuple(kept),
        w2=tuple(red_count(p, C, colour) for p in kept),
        dropped=len(tps) - len(kept),
    )


@dataclass
class NibbleResult:
    matching: list[int]
    ratios: tuple[float, float]
    history: list[tuple[float, float]] = field(default_factory=list)
    passes: int = 0


def _ratios(H: AuxiliaryGraph, chosen: Iterable[int]) -> tuple[float, float]:
    chosen = list(chosen)
    delta = H.max_degree()
    w1, w2 = len(chosen), sum(H.w2[i] for i in chosen)
    tot1, tot2 = len(H.edges), sum(H.w2)
    r1 = w1 * delta / tot1 if tot1 else 0.0
    r2 = w2 * delta / tot2 if tot2 else 1.0
    return r1, r2


def nibble_matching(H: AuxiliaryGraph, rng: np.random.Generator | None = None, quality: float = 0.9,
                    passes: int = 20) -> NibbleResult:
    """Greedy matching in decreasing red weight, improved by one-for-two swaps.

    A swap removes one matched edge and inserts up to two edges inside the
    freed and uncovered vertices. It is taken only when neither the size nor
    the red weight drops and at least one of them rises, so both reported
    ratios are monotone over the run.
    """
    if not H.edges:
        raise HypergraphError("auxiliary graph has no edges")
    rng = rng if rng is not None else np.random.default_rng(0)
    m = len(H.edges)
    tie = rng.permutation(m)
    order = sorted(range(m), key=lambda i: (-H.w2[i], tie[i]))
    owner = [-1] * H.n
    chosen: set[int] = set()
    for i in order:
        if all(owner[v] < 0 for v in H.edges[i]):
            chosen.add(i)
            for v in H.edges[i]:
                owner[v] = i
    by_vertex: dict[int, list[int]] = defaultdict(list)
    for i in order:
        for v in H.edges[i]:
            by_vertex[v].append(i)

    res = NibbleResult([], _ratios(H, chosen))
    res.history.append(res.ratios)
    for p in range(passes):
        if min(res.ratios) >= quality:
            break
        improved = False
        for e in sorted(chosen, key=lambda i: tie[i]):
            if e not in chosen:
                continue
            freed = H.edges[e]
            cands = {f for v in freed for f in by_vertex[v]
                     if f != e and all(owner[u] < 0 or owner[u] == e for u in H.edges[f])}
            if not cands:
                continue
            cands = sorted(cands, key=lambda i: (-H.w2[i], tie[i]))
            best, best_key = None, (1, H.w2[e])
            for a_pos, a in enumerate(cands):
                if (1, H.w2[a]) > best_key:
                    best, best_key = (a,), (1, H.w2[a])
                for b in cands[a_pos + 1:]:
                    if H.edges[a].isdisjoint(H.edges[b]) and (2, H.w2[a] + H.w2[b]) > best_key:
                        best, best_key = (a, b), (2, H.w2[a] + H.w2[b])
            if best is None:
                continue
            size_gain, red_gain = best_key[0] - 1, best_key[1] - H.w2[e]
            if size_gain < 0 or red_gain < 0 or (size_gain == 0 and red_gain == 0):
                continue
            chosen.discard(e)
            for v in freed:
                owner[v] = -1
            for f in best:
                chosen.add(f)
                for v in H.edges[f]:
                    owner[v] = f
            improved = True
        for f in order:
            if f not in chosen and all(owner[v] < 0 for v in H.edges[f]):
                chosen.add(f)
                for v in H.edges[f]:
                    owner[v] = f
                improved = True
        res.passes = p + 1
        res.ratios = _ratios(H, chosen)
        res.history.append(res.ratios)
        if not improved:
            break
    res.matching = sorted(chosen)
    return res


# -- path forests -------------------------------------------------------------


@dataclass(frozen=True)
class PathForest:
    paths: tuple[TightPath, ...]
    uncovered: frozenset[int]

    def __post_init__(self):
        seen: set[int] = set()
        for p in self.paths:
            if seen.intersection(p.vertices):
                raise HypergraphError("forest paths are not vertex-disjoint")
            seen.update(p.vertices)
        if self.paths:
            n = self.paths[0].host.n
            if seen | self.uncovered != set(range(n)) or seen & self.uncovered:
                raise HypergraphError("uncovered set does not complement the forest")


@dataclass(frozen=True)
class PipelineParams:
    epsilon: float = 0.1
    t: int = 5
    beta: float = 0.3
    mu_reserve: float = 0.12
    sample_factor: float = 3.0
    seed: int = 0
    ledger: Ledger = field(default_factory=Ledger)

    def __post_init__(self):
        for name in ("epsilon", "beta", "mu_reserve"):
            val = getattr(self, name)
            if not 0 < val < 1:
                raise HypergraphError(f"{name} must lie in (0, 1), got {val}")
        if self.sample_factor <= 0:
            raise HypergraphError("sample_factor must be positive")

    @classmethod
    def from_ledger(cls, ledger: Ledger, seed: int = 0, **over) -> PipelineParams:
        kw = dict(epsilon=ledger.epsilon, t=ledger.path_order, beta=ledger.beta,
                  mu_reserve=ledger.mu_reserve, sample_factor=ledger.sample_factor, seed=seed, ledger=ledger)
        kw.update(over)
        return cls(**kw)

    def sample_count(self, n: int) -> int:
        return max(1, math.ceil(self.sample_factor * n * math.log(max(n, 2))))

    def as_dict(self) -> dict:
        d = asdict(self)
        d["ledger"] = self.ledger.as_dict()
        return d


class ForestResult(NamedTuple):
    forest: PathForest
    majority: int
    red: int
    ratios: tuple[float, float]
    mu_out: float
    samples: int
    dropped: int


def path_forest(G: Hypergraph, C: Colouring, params: PipelineParams,
                rng: np.random.Generator | None = None) -> ForestResult:
    """Disjoint tight paths of order ``t`` rich in the colour favoured by the PFM."""
    if params.t < G.k:
        raise HypergraphError(f"path order t={params.t} must be >= k={G.k}")
    rng = rng if rng is not None else np.random.default_rng(params.seed)
    led = params.ledger
    disc = discrepant_pfm(G, C, params.epsilon, led, rng)
    model = WalkModel(disc.matching)
    count = params.sample_count(G.n)
    paths = sample_tight_paths(disc.matching, params.t, count, rng, max_attempts=led.max_attempts, model=model)
    H = build_auxiliary(paths, C, disc.majority)
    if not H.edges:
        forest = PathForest((), frozenset(range(G.n)))
        return ForestResult(forest, disc.majority, 0, (0.0, 0.0), disc.mu_out, count, H.dropped)
    nib = nibble_matching(H, rng, led.nibble_quality, led.nibble_passes)
    chosen = [H.paths[i] for i in nib.matching]
    covered = {v for p in chosen for v in p.vertices}
    forest = PathForest(tuple(chosen), frozenset(set(range(G.n)) - covered))
    red = sum(H.w2[i] for i in nib.matching)
    return ForestResult(forest, disc.majority, red, nib.ratios, disc.mu_out, count, H.dropped)


# -- connecting paths ---------------------------------------------------------


def _check_ends(G: Hypergraph, pool: Iterable[int], A: Sequence[int], B: Sequence[int]) -> tuple:
    A = ordered_tuple(A, G.k)
    B = ordered_tuple(B, G.k)
    if set(A) & set(B):
        raise HypergraphError(f"end tuples {A} and {B} share a vertex")
    pool = sorted(set(pool) - set(A) - set(B))
    return A, B, pool


def _closes(G: Hypergraph, seq: list[int], tail: tuple[int, ...], k: int) -> bool:
    """Every window meeting ``tail`` after ``seq`` is an edge."""
    full = seq[-(k - 1):] + list(tail)
    return all(G.has_edge(full[i:i + k]) for i in range(len(full) - k + 1))


def connect(G: Hypergraph, pool: Iterable[int], A: Sequence[int], B: Sequence[int],
            max_order: int, budget: int = 2_000_000) -> TightPath:
    """Shortest tight path starting with ``A`` and ending with ``reverse(B)``.

    Interior vertices come from ``pool``. Among shortest paths the one with the
    lexicographically least interior is returned.
    """
    k = G.k
    A, B, pool = _check_ends(G, pool, A, B)
    tail = reverse(B)
    nodes = 0

    def search(seq: list[int], used: set[int], left: int) -> list[int] | None:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise ConnectError(f"search budget {budget} exhausted")
        if left == 0:
            return seq if _closes(G, seq, tail, k) else None
        for v in G.neighbours(seq[-(k - 1):]):
            if v in used or v not in pool_set:
                continue
            used.add(v)
            seq.append(v)
            found = search(seq, used, left - 1)
            if found is not None:
                return found
            seq.pop()
            used.discard(v)
        return None

    pool_set = set(pool)
    for interior in range(0, max_order - 2 * (k - 1) + 1):
        if interior > len(pool):
            break
        found = search(list(A), set(A), interior)
        if found is not None:
            return TightPath(tuple(found) + tail, G)
    raise ConnectError(f"no tight path of order <= {max_order} from {A} to {B}")


def spanning_connect(G: Hypergraph, pool: Iterable[int], A: Sequence[int], B: Sequence[int],
                     budget: int = 200_000, rng: np.random.Generator | None = None) -> TightPath:
    """Tight path from ``A`` to ``reverse(B)`` using every pool vertex.

    Backtracking extends by the candidate with the fewest onward options
    first; ties are broken by vertex id, or randomly when ``rng`` is given.
    """
    k = G.k
    A, B, pool = _check_ends(G, pool, A, B)
    tail = reverse(B)
    rank = {v: i for i, v in enumerate(rng.permutation(pool).tolist() if rng is not None else pool)}
    remaining = set(pool)
    seq = list(A)
    nodes = 0

    def options(last: list[int]) -> list[int]:
        return [v for v in G.neighbours(last) if v in remaining]

    def search() -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise SpanningError(f"search budget {budget} exhausted")
        if not remaining:
            return _closes(G, seq, tail, k)
        last = seq[-(k - 1):]
        cands = options(last)
        if not cands:
            return False
        scored = []
        for v in cands:
            remaining.discard(v)
            onward = len(options(last[1:] + [v])) if remaining else 0
            remaining.add(v)
            if remaining - {v} and onward == 0:
                continue
            scored.append((onward, rank[v], v))
        for _, _, v in sorted(scored):
            remaining.discard(v)
            seq.append(v)
            if search():
                return True
            seq.pop()
            remaining.add(v)
        return False

    if not search():
        raise SpanningError(f"no tight path from {A} to {B} covers the pool of {len(pool)} vertices")
    return TightPath(tuple(seq) + tail, G)


# -- pipeline -----------------------------------------------------------------


def relabel_colouring(C: Colouring, sub: Hypergraph, labels: Sequence[int]) -> Colouring:
    return Colouring(sub, C.r, {e: C[tuple(labels[v] for v in e)] for e in sub.edges})


class HamiltonResult(NamedTuple):
    cycle: HamiltonCycle
    counts: list[int]
    report: dict


def _interior(path: TightPath, k: int) -> list[int]:
    return list(path.vertices[k - 1:len(path.vertices) - k + 1])


def _close_gaps(G: Hypergraph, paths: list[TightPath], reservoir: set[int], params: PipelineParams,
                rng: np.random.Generator) -> list[int]:
    """Join ``paths`` into a cyclic vertex order through every reservoir vertex.

    Consecutive paths are linked by shortest connectors. The leftover
    reservoir is then split into chunks of at most the spanning ceiling; the
    closing gap takes the first chunk and further chunks are absorbed by
    re-routing earlier gaps through their connector interior plus the chunk.
    """
    k, led = G.k, params.ledger
    m = len(paths)
    free = set(reservoir)
    gaps: list[list[int]] = [[] for _ in range(m)]
    for i in range(m - 1):
        A, B = paths[i].vertices[-(k - 1):], reverse(paths[i + 1].vertices[:k - 1])
        q = connect(G, free, A, B, led.connect_max_order)
        gaps[i] = _interior(q, k)
        free -= set(gaps[i])
    extra = rng.permutation(sorted(free)).tolist()
    pools: dict[int, list[int]] = {}
    for i in [m - 1] + list(range(m - 1)):
        room = max(led.spanning_ceiling - len(gaps[i]), 0)
        take, extra = extra[:room], extra[room:]
        if i == m - 1 or take:
            pools[i] = gaps[i] + take
    if extra:
        raise SpanningError(f"{len(extra)} reservoir vertices exceed the spanning capacity of {m} gaps")
    for i, pool in pools.items():
        A, B = paths[i].vertices[-(k - 1):], reverse(paths[(i + 1) % m].vertices[:k - 1])
        gaps[i] = _interior(spanning_connect(G, pool, A, B, led.spanning_budget, rng), k)
    order_out: list[int] = []
    for i in range(m):
        order_out += list(paths[i].vertices) + gaps[i]
    return order_out


def hamilton_with_discrepancy(G: Hypergraph, C: Colouring, params: PipelineParams) -> HamiltonResult:
    """Tight Hamilton cycle whose majority colour comes from a rich path forest.

    A random reservoir is set aside, a path forest is built on the rest, and
    the paths are chained through the reservoir and the uncovered vertices.
    Failed attempts are retried with fresh randomness.
    """
    n, k = G.n, G.k
    if n < 3 * k:
        raise HypergraphError(f"pipeline needs n >= {3 * k}, got {n}")
    if G.min_codegree() < (0.5 + params.epsilon) * n:
        raise HypergraphError(f"minimum codegree {G.min_codegree()} is below (1/2 + {params.epsilon}) n")
    diagnostics: list[dict] = []
    for attempt in range(params.ledger.pipeline_retries + 1):
        rng = np.random.default_rng([params.seed, attempt])
        timings: dict[str, float] = {}
        stage = "reserve"
        try:
            t0 = time.perf_counter()
            reserve = {v for v, u in enumerate(rng.random(n).tolist()) if u < params.mu_reserve}
            sub, labels = G.induced(set(range(n)) - reserve)
            Csub = relabel_colouring(C, sub, labels)
            timings["reserve"] = time.perf_counter() - t0

            stage = "forest"
            t0 = time.perf_counter()
            fr = path_forest(sub, Csub, params, rng)
            timings["forest"] = time.perf_counter() - t0
            paths = [TightPath(tuple(labels[v] for v in p.vertices), G) for p in fr.forest.paths]
            if not paths:
                raise HypergraphError("path forest is empty")
            reservoir = reserve | {labels[v] for v in fr.forest.uncovered}

            stage = "connect"
            t0 = time.perf_counter()
            order = _close_gaps(G, paths, reservoir, params, rng)
            timings["connect"] = time.perf_counter() - t0

            stage = "verify"
            cycle = HamiltonCycle(tuple(order), G)
            counts = [0] * C.r
            for e in cycle.edges():
                counts[C[e]] += 1
            report = {
                "n": n, "k": k, "r": C.r,
                "params": params.as_dict(),
                "attempt": attempt,
                "retries": attempt,
                "reserve_size": len(reserve),
                "forest_paths": len(paths),
                "forest_uncovered": len(fr.forest.uncovered),
                "forest_red": fr.red,
                "forest_colour": fr.majority,
                "nibble_ratios": list(fr.ratios),
                "mu_out": fr.mu_out,
                "samples": fr.samples,
                "dropped": fr.dropped,
                "counts": counts,
                "surplus": max(counts) - n / C.r,
                "timings": timings,
                "failures": diagnostics,
                "cycle": list(cycle.vertices),
            }
            return HamiltonResult(cycle, counts, report)
        except HypergraphError as exc:
            log.info("attempt %d failed in %s: %s", attempt, stage, exc)
            diagnostics.append({"attempt": attempt, "stage": stage, "error": str(exc)})
    raise PipelineError(f"pipeline failed after {len(diagnostics)} attempts", diagnostics)


def report_json(report: dict) -> str:
    """Run report without timings, so equal runs give equal bytes."""
    return json.dumps({k: v for k, v in report.items() if k != "timings"}, sort_keys=True)


def cycle_to_matchings(cycle: HamiltonCycle) -> list[list[Edge]]:
    """Split a tight Hamilton cycle into k perfect matchings by window start mod k."""
    vs, k = cycle.vertices, cycle.host.k
    n = len(vs)
    if n % k:
        raise HypergraphError(f"k={k} does not divide n={n}")
    return [[canon(vs[(i + j) % n] for j in range(k)) for i in range(s, n, k)] for s in range(k)]
