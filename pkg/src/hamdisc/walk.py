"""Random walk on ordered (k-1)-tuples driven by a fractional matching, and a
rejection sampler for self-avoiding tight paths."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations
from typing import Iterable, TextIO

import numpy as np

from .fractional import FractionalMatching
from .hypergraph import Colouring, HypergraphError, TightPath, canon


class DeadStateError(HypergraphError):
    def __init__(self, prefix: tuple[int, ...]):
        super().__init__(f"walk reached a state of zero weight after {prefix}")
        self.prefix = prefix


class SamplingBudgetError(HypergraphError):
    def __init__(self, attempts: int):
        super().__init__(f"no self-avoiding walk in {attempts} attempts")
        self.attempts = attempts


@dataclass(frozen=True)
class WalkState:
    z: tuple[int, ...]
    matching: FractionalMatching


@dataclass(frozen=True)
class SampledPath:
    path: TightPath
    attempts: int


class WalkModel:
    """Dense transition tables indexed by sorted (k-1)-sets.

    ``prob[s, v]`` is the probability of stepping to ``v`` from any ordering of
    the set with index ``s``; ``cum`` holds row-wise cumulative sums with the
    last entry pinned to 1 so inverse-CDF draws never fall off the end.
    """

    def __init__(self, x: FractionalMatching):
        G = x.host
        n, k = G.n, G.k
        if np.any(x.values < 0):
            raise HypergraphError("fractional matching has a negative weight")
        self.x, self.n, self.k = x, n, k
        sets: dict[tuple[int, ...], int] = {}
        for e in G.edges:
            for i in range(k):
                sets.setdefault(e[:i] + e[i + 1:], len(sets))
        self.sets = sorted(sets)
        self.index = {s: i for i, s in enumerate(self.sets)}
        ext = np.zeros((len(self.sets), n))
        for e, w in zip(G.edges, x.values.tolist()):
            for i in range(k):
                ext[self.index[e[:i] + e[i + 1:]], e[i]] += w
        self.set_weight = ext.sum(axis=1)
        if np.any(self.set_weight <= 0):
            bad = self.sets[int(np.argmin(self.set_weight))]
            raise DeadStateError(bad)
        self.prob = ext / self.set_weight[:, None]
        cum = np.cumsum(self.prob, axis=1)
        cum[:, -1] = 1.0
        self.cum = cum
        self.set_prob = self.set_weight / self.set_weight.sum()
        self.set_cum = np.cumsum(self.set_prob)
        self.set_cum[-1] = 1.0
        # lookup from sorted (k-1)-tuples to set index via a mixed-radix code
        self._code = n ** np.arange(k - 2, -1, -1)
        self._lookup = None
        if n ** (k - 1) <= 5_000_000:
            table = np.full(n ** (k - 1), -1, dtype=np.int64)
            codes = np.array(self.sets, dtype=np.int64) @ self._code
            table[codes] = np.arange(len(self.sets))
            self._lookup = table

    def set_index(self, z: Iterable[int]) -> int:
        return self.index.get(canon(z), -1)

    def _indices(self, states: np.ndarray) -> np.ndarray:
        srt = np.sort(states, axis=1)
        if self._lookup is not None:
            return self._lookup[srt @ self._code]
        return np.array([self.index.get(tuple(row), -1) for row in srt.tolist()], dtype=np.int64)

    def sample(self, t: int, size: int, rng: np.random.Generator) -> np.ndarray:
        """``size`` independent walks of length ``t`` as an integer array."""
        k = self.k
        if t < k - 1:
            raise HypergraphError(f"walk length must be >= k-1 = {k - 1}, got {t}")
        out = np.empty((size, t), dtype=np.int64)
        s = np.searchsorted(self.set_cum, rng.random(size), side="right")
        start = np.array(self.sets, dtype=np.int64)[s]
        order = np.argsort(rng.random((size, k - 1)), axis=1)
        out[:, :k - 1] = np.take_along_axis(start, order, axis=1)
        for i in range(k - 1, t):
            u = rng.random(size)
            nxt = (self.cum[s] <= u[:, None]).sum(axis=1)
            out[:, i] = nxt
            if i + 1 < t:
                s = self._indices(out[:, i - k + 2:i + 1])
                if np.any(s < 0):
                    j = int(np.argmax(s < 0))
                    raise DeadStateError(tuple(out[j, :i + 1].tolist()))
        return out


def initial_probability(x: FractionalMatching, S: Iterable[int]) -> float:
    from .fractional import subset_weight

    k, n = x.host.k, x.host.n
    return subset_weight(x, S) / (math.factorial(k - 1) * n)


def initial_distribution(x: FractionalMatching) -> dict[tuple[int, ...], float]:
    """Probability of every ordered (k-1)-tuple of distinct vertices."""
    model = WalkModel(x)
    k, n = x.host.k, x.host.n
    denom = math.factorial(k - 1) * n
    out = {}
    for S in permutations(range(n), k - 1):
        i = model.set_index(S)
        out[S] = 0.0 if i < 0 else float(model.set_weight[i]) / denom
    return out


def transition(state: WalkState, model: WalkModel | None = None) -> np.ndarray:
    """Next-vertex probabilities from ``state`` as a length-n vector."""
    x = state.matching
    z = tuple(state.z)
    if len(z) != x.host.k - 1 or len(set(z)) != len(z):
        raise HypergraphError(f"{z} is not an ordered tuple of {x.host.k - 1} distinct vertices")
    model = model or WalkModel(x)
    i = model.set_index(z)
    if i < 0:
        raise DeadStateError(z)
    return model.prob[i].copy()


def sample_walk(x: FractionalMatching, t: int, rng: np.random.Generator,
                model: WalkModel | None = None) -> list[int]:
    model = model or WalkModel(x)
    return model.sample(t, 1, rng)[0].tolist()


def sample_walks(x: FractionalMatching, t: int, size: int, rng: np.random.Generator,
                 model: WalkModel | None = None) -> np.ndarray:
    return (model or WalkModel(x)).sample(t, size, rng)


def _self_avoiding(walks: np.ndarray) -> np.ndarray:
    srt = np.sort(walks, axis=1)
    return np.all(srt[:, 1:] != srt[:, :-1], axis=1)


def _oriented(vs: list[int], k: int) -> tuple[int, ...]:
    back = vs[::-1]
    return tuple(vs if vs[:k - 1] <= back[:k - 1] else back)


def sample_tight_paths(x: FractionalMatching, t: int, count: int, rng: np.random.Generator, *,
                       max_attempts: int = 1000, batch: int = 4096,
                       model: WalkModel | None = None) -> list[SampledPath]:
    """``count`` independent draws of the walk conditioned on being self-avoiding.

    Walks are drawn in fixed-size batches and scanned in order, so the output
    is a deterministic function of the generator state.
    """
    k = x.host.k
    if t < k - 1:
        raise HypergraphError(f"path order must be >= k-1 = {k - 1}, got {t}")
    if max_attempts < 1:
        raise HypergraphError("max_attempts must be >= 1")
    model = model or WalkModel(x)
    out: list[SampledPath] = []
    since = 0
    while len(out) < count:
        walks = model.sample(t, batch, rng)
        ok = _self_avoiding(walks)
        for row, good in zip(walks.tolist(), ok.tolist()):
            since += 1
            if good:
                out.append(SampledPath(TightPath(_oriented(row, k), x.host), since))
                since = 0
                if len(out) == count:
                    break
            elif since >= max_attempts:
                raise SamplingBudgetError(since)
    return out


def sample_tight_path(x: FractionalMatching, t: int, max_attempts: int, rng: np.random.Generator,
                      model: WalkModel | None = None) -> SampledPath:
    """Redraw walks one at a time until the first ``t`` vertices are distinct."""
    k = x.host.k
    if t < k - 1:
        raise HypergraphError(f"path order must be >= k-1 = {k - 1}, got {t}")
    if max_attempts < 1:
        raise HypergraphError("max_attempts must be >= 1")
    model = model or WalkModel(x)
    for attempt in range(1, max_attempts + 1):
        row = model.sample(t, 1, rng)[0].tolist()
        if len(set(row)) == t:
            return SampledPath(TightPath(_oriented(row, k), x.host), attempt)
    raise SamplingBudgetError(max_attempts)


def red_count(path: TightPath, C: Colouring, colour: int) -> int:
    return sum(1 for e in path.edges() if C[e] == colour)


def red_edge_expectation_audit(x: FractionalMatching, C: Colouring, t: int, samples: int,
                               rng: np.random.Generator, colour: int = 0, max_attempts: int = 1000) -> float:
    """Mean number of ``colour`` edges over ``samples`` accepted paths."""
    paths = sample_tight_paths(x, t, samples, rng, max_attempts=max_attempts)
    return math.fsum(red_count(p.path, C, colour) for p in paths) / samples


def write_paths(paths: Iterable[SampledPath], fp: TextIO) -> None:
    for p in paths:
        fp.write(" ".join(map(str, p.path.vertices)) + "\n")
