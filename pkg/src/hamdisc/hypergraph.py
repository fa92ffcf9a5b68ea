"""k-uniform hypergraphs, edge colourings and tight paths/cycles.

Vertices are dense integer ids ``0..n-1``. Edges are stored as sorted tuples
and the edge list is kept in lexicographic order, so every iteration over a
hypergraph is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Mapping, Sequence, TextIO

Edge = tuple[int, ...]

INDEX_CAP = 128


class HypergraphError(ValueError):
    """Invalid input to a hypergraph query or constructor."""


def canon(vertices: Iterable[int]) -> Edge:
    return tuple(sorted(vertices))


class Hypergraph:
    """An immutable k-uniform hypergraph on ``range(n)``.

    Codegree queries are answered from a neighbour index keyed by sorted
    (k-1)-tuples. The index is built eagerly when ``n <= index_cap`` and
    filled lazily otherwise.
    """

    __slots__ = ("n", "k", "edges", "_edge_set", "_nbr", "_eager")

    def __init__(self, n: int, k: int, edges: Iterable[Iterable[int]] = (), *, index_cap: int = INDEX_CAP):
        if k < 2:
            raise HypergraphError(f"uniformity must be >= 2, got {k}")
        if n < 0:
            raise HypergraphError(f"vertex count must be >= 0, got {n}")
        seen = set()
        for raw in edges:
            e = canon(raw)
            if len(e) != k or len(set(e)) != k:
                raise HypergraphError(f"edge {raw!r} does not have {k} distinct vertices")
            if e[0] < 0 or e[-1] >= n:
                raise HypergraphError(f"edge {raw!r} has a vertex outside [0, {n})")
            seen.add(e)
        self.n = n
        self.k = k
        self.edges: tuple[Edge, ...] = tuple(sorted(seen))
        self._edge_set = frozenset(seen)
        self._nbr: dict[Edge, tuple[int, ...]] = {}
        self._eager = n <= index_cap
        if self._eager:
            nbr: dict[Edge, list[int]] = {}
            for e in self.edges:
                for i in range(k):
                    nbr.setdefault(e[:i] + e[i + 1:], []).append(e[i])
            self._nbr = {s: tuple(sorted(vs)) for s, vs in nbr.items()}

    # -- basic read API -------------------------------------------------

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self) -> Iterator[Edge]:
        return iter(self.edges)

    def __contains__(self, e: object) -> bool:
        return isinstance(e, tuple) and canon(e) in self._edge_set

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return (self.n, self.k, self.edges) == (other.n, other.k, other.edges)

    def __hash__(self) -> int:
        return hash((self.n, self.k, self.edges))

    def __repr__(self) -> str:
        return f"Hypergraph(n={self.n}, k={self.k}, edges={len(self.edges)})"

    def has_edge(self, vertices: Iterable[int]) -> bool:
        return canon(vertices) in self._edge_set

    @property
    def vertices(self) -> range:
        return range(self.n)

    def _check_set(self, S: Iterable[int], max_size: int) -> Edge:
        s = canon(set(S))
        if len(s) > max_size:
            raise HypergraphError(f"set {s} is larger than {max_size}")
        if s and (s[0] < 0 or s[-1] >= self.n):
            raise HypergraphError(f"set {s} has a vertex outside [0, {self.n})")
        return s

    def _neighbours(self, s: Edge) -> tuple[int, ...]:
        if self._eager:
            return self._nbr.get(s, ())
        hit = self._nbr.get(s)
        if hit is None:
            members = set(s)
            hit = tuple(sorted(
                next(v for v in e if v not in members)
                for e in self.edges
                if members.issubset(e)
            ))
            self._nbr[s] = hit
        return hit

    def neighbours(self, S: Iterable[int]) -> tuple[int, ...]:
        """Vertices ``v`` outside the (k-1)-set ``S`` with ``S + v`` an edge."""
        s = self._check_set(S, self.k - 1)
        if len(s) != self.k - 1:
            raise HypergraphError(f"neighbours needs a {self.k - 1}-set, got {s}")
        return self._neighbours(s)

    def degree(self, S: Iterable[int]) -> int:
        """Number of edges containing ``S`` (``|S| <= k``)."""
        s = self._check_set(S, self.k)
        if len(s) == self.k:
            return int(s in self._edge_set)
        if len(s) == self.k - 1:
            return len(self._neighbours(s))
        members = set(s)
        return sum(1 for e in self.edges if members.issubset(e))

    def codegrees(self) -> Iterator[tuple[Edge, int]]:
        """Yield ``(S, degree(S))`` for every (k-1)-subset, lexicographically."""
        for s in combinations(range(self.n), self.k - 1):
            yield s, len(self._neighbours(s))

    def min_codegree(self) -> int:
        if self.n < self.k:
            raise HypergraphError(f"min_codegree needs n >= k, got n={self.n}, k={self.k}")
        return min(d for _, d in self.codegrees())

    def shadow(self) -> Hypergraph:
        return Hypergraph(self.n, self.k - 1, (
            e[:i] + e[i + 1:] for e in self.edges for i in range(self.k)
        ))

    # -- derived hypergraphs ---------------------------------------------

    def without(self, removed: Iterable[Iterable[int]]) -> Hypergraph:
        drop = {canon(e) for e in removed}
        return Hypergraph(self.n, self.k, (e for e in self.edges if e not in drop))

    def restrict(self, kept: Iterable[Iterable[int]]) -> Hypergraph:
        keep = {canon(e) for e in kept}
        return Hypergraph(self.n, self.k, (e for e in self.edges if e in keep))

    def induced(self, vertices: Iterable[int]) -> tuple[Hypergraph, tuple[int, ...]]:
        """Induced sub-hypergraph relabelled to ``0..m-1``.

        Returns the new hypergraph and ``labels`` with ``labels[i]`` the
        original id of new vertex ``i``.
        """
        labels = tuple(sorted(set(vertices)))
        pos = {v: i for i, v in enumerate(labels)}
        sub = Hypergraph(len(labels), self.k, (
            tuple(pos[v] for v in e) for e in self.edges if all(v in pos for v in e)
        ))
        return sub, labels


class Colouring:
    """A total map from the edges of ``host`` to colours ``0..r-1``."""

    __slots__ = ("host", "r", "_of")

    def __init__(self, host: Hypergraph, r: int, assignment: Mapping[Sequence[int], int]):
        if r < 2:
            raise HypergraphError(f"colour count must be >= 2, got {r}")
        of = {}
        for e, c in assignment.items():
            ce = canon(e)
            if ce not in host._edge_set:
                raise HypergraphError(f"coloured set {ce} is not an edge of the host")
            if not 0 <= c < r:
                raise HypergraphError(f"colour {c} of edge {ce} is outside [0, {r})")
            of[ce] = int(c)
        if len(of) != len(host.edges):
            missing = next(e for e in host.edges if e not in of)
            raise HypergraphError(f"edge {missing} has no colour")
        self.host = host
        self.r = r
        self._of = of

    @classmethod
    def constant(cls, host: Hypergraph, r: int, colour: int = 0) -> Colouring:
        return cls(host, r, {e: colour for e in host.edges})

    def __getitem__(self, e: Iterable[int]) -> int:
        return self._of[canon(e)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Colouring):
            return NotImplemented
        return self.r == other.r and self.host == other.host and self._of == other._of

    def __repr__(self) -> str:
        return f"Colouring(r={self.r}, sizes={self.class_sizes()})"

    def colours(self) -> list[int]:
        """Colours in the canonical edge order of the host."""
        return [self._of[e] for e in self.host.edges]

    def class_of(self, c: int) -> list[Edge]:
        return [e for e in self.host.edges if self._of[e] == c]

    def class_sizes(self) -> list[int]:
        sizes = [0] * self.r
        for c in self._of.values():
            sizes[c] += 1
        return sizes

    def restrict(self, host: Hypergraph) -> Colouring:
        """The colouring of a sub-hypergraph of the current host."""
        return Colouring(host, self.r, {e: self._of[e] for e in host.edges})

    def swapped(self) -> Colouring:
        """Exchange colours 0 and 1 of a 2-colouring."""
        if self.r != 2:
            raise HypergraphError("swapped() is only defined for 2-colourings")
        return Colouring(self.host, 2, {e: 1 - c for e, c in self._of.items()})


RED, BLUE = 0, 1


def degree(G: Hypergraph, S: Iterable[int]) -> int:
    return G.degree(S)


def min_codegree(G: Hypergraph) -> int:
    return G.min_codegree()


def shadow(G: Hypergraph) -> Hypergraph:
    return G.shadow()


def neighbours(G: Hypergraph, S: Iterable[int]) -> tuple[int, ...]:
    return G.neighbours(S)


def merge_colours(C: Colouring, kept: int) -> Colouring:
    """Two-colouring with ``kept`` as red (0) and every other colour as blue (1)."""
    if not 0 <= kept < C.r:
        raise HypergraphError(f"colour {kept} is outside [0, {C.r})")
    return Colouring(C.host, 2, {e: RED if c == kept else BLUE for e, c in C._of.items()})


def reverse(T: Sequence[int]) -> tuple[int, ...]:
    return tuple(reversed(T))


def ordered_tuple(vertices: Iterable[int], k: int) -> tuple[int, ...]:
    """Validate an ordered (k-1)-tuple of distinct vertices."""
    t = tuple(vertices)
    if len(t) != k - 1 or len(set(t)) != len(t):
        raise HypergraphError(f"{t} is not an ordered tuple of {k - 1} distinct vertices")
    return t


@dataclass(frozen=True)
class TightPath:
    """A vertex sequence whose consecutive k-windows are all edges of ``host``."""

    vertices: tuple[int, ...]
    host: Hypergraph

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        problem = self.violation()
        if problem:
            raise HypergraphError(problem)

    def violation(self) -> str | None:
        vs, k = self.vertices, self.host.k
        if len(vs) < k - 1:
            return f"a tight path needs at least {k - 1} vertices, got {len(vs)}"
        if len(set(vs)) != len(vs):
            return f"path {vs} repeats a vertex"
        for i in range(len(vs) - k + 1):
            if not self.host.has_edge(vs[i:i + k]):
                return f"window {vs[i:i + k]} at position {i} is not an edge"
        return None

    @property
    def order(self) -> int:
        return len(self.vertices)

    @property
    def ends(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        k = self.host.k
        return self.vertices[:k - 1], tuple(reversed(self.vertices[len(self.vertices) - k + 1:]))

    def edges(self) -> list[Edge]:
        k, vs = self.host.k, self.vertices
        return [canon(vs[i:i + k]) for i in range(len(vs) - k + 1)]


@dataclass(frozen=True)
class HamiltonCycle:
    """A cyclic ordering of all host vertices with every cyclic k-window an edge."""

    vertices: tuple[int, ...]
    host: Hypergraph

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        vs, n, k = self.vertices, self.host.n, self.host.k
        if sorted(vs) != list(range(n)):
            raise HypergraphError("a Hamilton cycle must visit every vertex exactly once")
        for i in range(n):
            w = tuple(vs[(i + j) % n] for j in range(k))
            if not self.host.has_edge(w):
                raise HypergraphError(f"cyclic window {w} at position {i} is not an edge")

    def edges(self) -> list[Edge]:
        vs, n, k = self.vertices, len(self.vertices), self.host.k
        return [canon(vs[(i + j) % n] for j in range(k)) for i in range(n)]


# -- text format --------------------------------------------------------


def write_instance(G: Hypergraph, C: Colouring, fp: TextIO) -> None:
    """Header ``k n r`` then one ``v1 .. vk colour`` line per edge."""
    fp.write(f"{G.k} {G.n} {C.r}\n")
    for e in G.edges:
        fp.write(" ".join(map(str, e)) + f" {C[e]}\n")


def dumps_instance(G: Hypergraph, C: Colouring) -> str:
    from io import StringIO

    buf = StringIO()
    write_instance(G, C, buf)
    return buf.getvalue()


def read_instance(fp: TextIO) -> tuple[Hypergraph, Colouring]:
    lines = [ln for ln in fp.read().split("\n") if ln.strip()]
    if not lines:
        raise HypergraphError("empty instance file")
    try:
        k, n, r = map(int, lines[0].split())
        rows = [list(map(int, ln.split())) for ln in lines[1:]]
    except ValueError as exc:
        raise HypergraphError(f"malformed instance file: {exc}") from None
    for row in rows:
        if len(row) != k + 1:
            raise HypergraphError(f"edge line {row} should have {k} vertices and a colour")
    G = Hypergraph(n, k, (row[:k] for row in rows))
    if len(G.edges) != len(rows):
        raise HypergraphError("instance file lists a duplicate edge")
    C = Colouring(G, r, {tuple(row[:k]): row[k] for row in rows})
    return G, C


def loads_instance(text: str) -> tuple[Hypergraph, Colouring]:
    from io import StringIO

    return read_instance(StringIO(text))
