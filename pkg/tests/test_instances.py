from itertools import combinations

import pytest

from hamdisc.hypergraph import BLUE, RED, HypergraphError
from hamdisc.instances import (GenSpec, codegree_target, gen_complete, gen_dirac, gen_near_perfect_extremal,
                               gen_random_dirac, gen_split_colouring, generate, parse_genspec)


@pytest.mark.parametrize("n,k,m", [(4, 3, 4), (5, 3, 10), (3, 3, 1), (4, 4, 1)])
def test_complete_sizes(n, k, m):
    assert len(gen_complete(n, k).edges) == m


def test_complete_rejects_small_n():
    with pytest.raises(HypergraphError):
        gen_complete(2, 3)


def test_random_dirac_p_one_is_complete():
    assert gen_random_dirac(7, 3, 1.0, 5) == gen_complete(7, 3)


def test_random_dirac_deterministic_and_scanned():
    a = gen_random_dirac(20, 3, 0.9, 11)
    assert a == gen_random_dirac(20, 3, 0.9, 11)
    edges = set(a.edges)
    scan = min(sum(1 for v in range(20) if v not in S and tuple(sorted(S + (v,))) in edges)
               for S in combinations(range(20), 2))
    assert a.min_codegree() == scan


def test_densified_host_meets_target():
    for seed in range(5):
        G = gen_dirac(24, 3, 0.5, seed, 0.1)
        assert G.min_codegree() >= codegree_target(24, 0.1)
        assert set(gen_random_dirac(24, 3, 0.5, seed).edges) <= set(G.edges)


def test_split_colouring_examples():
    G = gen_complete(5, 3)
    assert gen_split_colouring(G, []).class_sizes() == [10, 0]
    assert gen_split_colouring(G, range(5)).class_sizes() == [0, 10]
    assert gen_split_colouring(G, [2]).class_sizes()[BLUE] == 6
    with pytest.raises(HypergraphError):
        gen_split_colouring(G, [7])


def test_extremal_example_counts():
    G, C = gen_near_perfect_extremal(6)
    assert len(G.edges) == 18
    assert C.class_sizes() == [9, 9]
    for e in G.edges:
        inside = sum(v < 3 for v in e)
        assert inside in (1, 2)
        assert C[e] == (RED if inside == 2 else BLUE)
    with pytest.raises(HypergraphError):
        gen_near_perfect_extremal(7)


def test_generate_is_deterministic():
    spec = GenSpec(family="random_dirac", n=18, p=0.7, seed=4, r=3)
    assert generate(spec) == generate(spec)


def test_parse_genspec():
    spec = parse_genspec("family = split_colour\nn = 12\nA = 0,1,2\np = 0.9\n")
    assert spec.n == 12 and spec.split_set() == (0, 1, 2) and spec.p == 0.9
    assert parse_genspec("", n=30).n == 30
    with pytest.raises(HypergraphError):
        parse_genspec("bogus = 1")
    with pytest.raises(HypergraphError):
        GenSpec(family="nope")
