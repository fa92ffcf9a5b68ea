"""Brute-force reference implementations used only by the tests.

Each oracle works from plain edge sets and shares no search code with the
package.
"""

from __future__ import annotations

import math
from collections import defaultdict
from fractions import Fraction
from itertools import combinations, permutations


def has_edge(edges: set, vs) -> bool:
    return tuple(sorted(vs)) in edges


def alternating_grid_exists(red: set, blue: set, n: int, u: int) -> bool:
    """Some u x u array with red rows and blue columns.

    Rows form an unordered set of disjoint red edges; the first row keeps
    its sorted order and the others are tried in every order.
    """
    reds = sorted(red)
    for rows in combinations(reds, u):
        flat = [v for r in rows for v in r]
        if len(set(flat)) != u * u:
            continue
        for perms in _row_orders(rows[1:]):
            cells = [rows[0]] + perms
            if all(tuple(sorted(col)) in blue for col in zip(*cells)):
                return True
    return False


def _row_orders(rows):
    if not rows:
        yield []
        return
    for p in permutations(rows[0]):
        for rest in _row_orders(rows[1:]):
            yield [p] + rest


def shortest_connection(edges: set, k: int, pool, A, B, max_order: int):
    """Minimum-order tight path A + interior + reversed(B), lexicographically
    least interior; None when no such path has order <= max_order."""
    tail = tuple(reversed(B))
    pool = sorted(set(pool) - set(A) - set(B))
    for length in range(0, max_order - 2 * (k - 1) + 1):
        for interior in permutations(pool, length):
            seq = tuple(A) + interior + tail
            if all(has_edge(edges, seq[i:i + k]) for i in range(len(seq) - k + 1)):
                return seq
    return None


def exact_walk_marginals(weights: dict, n: int, k: int, steps: int):
    """Exact law of the fractional-matching walk by forward propagation.

    Returns per-position vertex marginals and per-window edge marginals as
    lists of dicts, using exact rational arithmetic on the given weights.
    """
    w = {e: Fraction(x) for e, x in weights.items()}
    sub = defaultdict(Fraction)
    for e, x in w.items():
        for i in range(k):
            sub[e[:i] + e[i + 1:]] += x
    total = math.factorial(k - 1) * n
    dist = {}
    for S in permutations(range(n), k - 1):
        p = sub.get(tuple(sorted(S)), Fraction(0)) / total
        if p:
            dist[S] = p
    vertex = [defaultdict(Fraction) for _ in range(steps)]
    edge = [defaultdict(Fraction) for _ in range(max(steps - k + 1, 0))]
    for S, p in dist.items():
        for i, v in enumerate(S):
            vertex[i][v] += p
    for pos in range(k - 1, steps):
        nxt = defaultdict(Fraction)
        for S, p in dist.items():
            base = sub[tuple(sorted(S))]
            for v in range(n):
                e = tuple(sorted(S + (v,)))
                if v in S or e not in w:
                    continue
                q = p * w[e] / base
                vertex[pos][v] += q
                edge[pos - k + 1][e] += q
                nxt[S[1:] + (v,)] += q
        dist = nxt
    return vertex, edge


def exact_path_law(weights: dict, n: int, k: int, t: int) -> dict:
    """Law of the walk's first t vertices conditioned on being distinct,
    keyed by the unordered path (smaller end first)."""
    w = {e: float(x) for e, x in weights.items()}
    sub = defaultdict(float)
    for e, x in w.items():
        for i in range(k):
            sub[e[:i] + e[i + 1:]] += x
    total = math.factorial(k - 1) * n
    law = defaultdict(float)

    def extend(seq, p):
        if len(seq) == t:
            back = seq[::-1]
            key = seq if seq[:k - 1] <= back[:k - 1] else back
            law[key] += p
            return
        S = seq[-(k - 1):]
        base = sub[tuple(sorted(S))]
        for v in range(n):
            e = tuple(sorted(S + (v,)))
            if v not in seq and e in w:
                extend(seq + (v,), p * w[e] / base)

    for S in permutations(range(n), k - 1):
        p = sub.get(tuple(sorted(S)), 0.0) / total
        if p:
            extend(S, p)
    z = sum(law.values())
    return {key: p / z for key, p in law.items()}


def bad_and_clean(edges: set, shadow_colours: dict, n: int, k: int, epsilon: float, caps):
    def deg(S):
        return sum(1 for v in range(n) if v not in S and tuple(sorted(S + (v,))) in edges)

    sets = list(combinations(range(n), k - 1))
    bad = [S for S in sets if deg(S) < (0.5 + epsilon / 2) * n or len(shadow_colours.get(S, ())) > 1]
    clean = []
    for S in sets:
        counts = [0] * k
        for T in bad:
            counts[len(set(S) & set(T))] += 1
        if all(counts[j] <= caps[j] for j in range(k)):
            clean.append(S)
    return bad, clean


def matchings_of_size(edges, size: int):
    """Every matching with ``size`` edges, as tuples of edges in sorted order."""
    edges = sorted(edges)

    def rec(start, used, chosen):
        if len(chosen) == size:
            yield tuple(chosen)
            return
        for i in range(start, len(edges)):
            e = edges[i]
            if used.isdisjoint(e):
                chosen.append(e)
                yield from rec(i + 1, used | set(e), chosen)
                chosen.pop()

    yield from rec(0, frozenset(), [])


def cleaning_reference(edges: set, k: int, t: int) -> set:
    """Edges left after repeatedly deleting every edge through the
    lexicographically least (k-1)-set of degree in [1, t-1]."""
    left = set(edges)
    while True:
        deg = defaultdict(list)
        for e in left:
            for i in range(k):
                deg[e[:i] + e[i + 1:]].append(e)
        low = sorted(S for S, es in deg.items() if 0 < len(es) < t)
        if not low:
            return left
        left -= set(deg[low[0]])


def near_alternating_exists(colour_of: dict, n: int, k: int) -> bool:
    """Some k x k array whose rows and columns are edges, with at most one
    non-red (0) row and at most one non-blue (1) column."""
    edges = sorted(colour_of)
    for rows in combinations(edges, k):
        if len({v for r in rows for v in r}) != k * k:
            continue
        if sum(colour_of[r] != 0 for r in rows) > 1:
            continue
        for perms in _row_orders(rows[1:]):
            cells = [rows[0]] + perms
            cols = [tuple(sorted(c)) for c in zip(*cells)]
            if all(c in colour_of for c in cols) and sum(colour_of[c] != 1 for c in cols) <= 1:
                return True
    return False
