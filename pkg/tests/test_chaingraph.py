"""Tests for chains, recurrence, the cyclic decomposition, and exact-length
paths, cross-checked against cycle-enumeration oracles."""
import random
from fractions import Fraction

import pytest

from chainchaos import systems as sy
from chainchaos.chaingraph import (ChainGraph, chain_recurrent_set,
                                   cyclic_decomposition, find_chain,
                                   reachability_threshold, verify_chain)
from chainchaos.errors import InputError

from oracles import (check_decomposition_invariants, exact_length_reach,
                     oracle_decomposition, random_digraph)

F = Fraction


def three_cycle():
    return ChainGraph.from_edges(3, [(0, 1), (1, 2), (2, 0)])


def test_verify_chain_self_loop():
    g = ChainGraph.from_edges(1, [(0, 0)])
    assert verify_chain(g, [0, 0], closed=True)


def test_verify_chain_doubling_path():
    g = sy.discretize(sy.doubling_map(), 4, F(0))
    assert verify_chain(g, [0, 1, 2])          # f(B1) = [1/2,1) covers B2
    assert not verify_chain(g, [0, 2])


def test_verify_chain_errors_and_misses():
    g = three_cycle()
    assert not verify_chain(g, [0, 2])
    assert not verify_chain(g, [0, 1], closed=True)
    with pytest.raises(InputError):
        verify_chain(g, [0])
    with pytest.raises(InputError):
        verify_chain(g, [0, 7])


def test_chain_recurrent_set_identity_all():
    g = ChainGraph.from_edges(4, [(i, i) for i in range(4)])
    assert chain_recurrent_set(g) == frozenset(range(4))


def test_chain_recurrent_set_path_with_sink_loop():
    g = ChainGraph.from_edges(3, [(0, 1), (1, 2), (2, 2)])
    assert chain_recurrent_set(g) == frozenset({2})


def test_chain_recurrent_set_doubling_all():
    g = sy.discretize(sy.doubling_map(), 8, F(0))
    assert chain_recurrent_set(g) == frozenset(range(8))


def test_decomposition_three_cycle():
    dec = cyclic_decomposition(three_cycle())
    assert len(dec.components) == 1
    comp = dec.components[0]
    assert comp.period == 3
    assert comp.classes == (frozenset({0}), frozenset({1}), frozenset({2}))


def test_decomposition_doubling_period_one():
    dec = cyclic_decomposition(sy.discretize(sy.doubling_map(), 8, F(0)))
    assert len(dec.components) == 1
    assert dec.components[0].period == 1


def test_decomposition_two_disjoint_two_cycles():
    g = ChainGraph.from_edges(4, [(0, 1), (1, 0), (2, 3), (3, 2)])
    dec = cyclic_decomposition(g)
    assert [c.period for c in dec.components] == [2, 2]
    assert dec.components[0].vertices == frozenset({0, 1})


def test_decomposition_matches_oracle_on_random_digraphs():
    rng = random.Random(20240817)
    for _ in range(60):
        g = random_digraph(rng)
        dec = cyclic_decomposition(g)
        expected = oracle_decomposition(g)
        got = [(c.period, c.classes) for c in dec.components]
        assert got == expected


def test_decomposition_invariants_on_random_digraphs():
    rng = random.Random(7)
    for _ in range(25):
        g = random_digraph(rng, max_n=9)
        check_decomposition_invariants(g, cyclic_decomposition(g), rng=rng)


def test_find_chain_three_cycle():
    g = three_cycle()
    assert find_chain(g, 0, 0, 3) == [0, 1, 2, 0]
    assert find_chain(g, 0, 1, 2) is None       # lengths to v1 are 1 mod 3


def test_find_chain_doubling_diameter():
    g = sy.discretize(sy.doubling_map(), 8, F(0))
    for u in range(8):
        for v in range(8):
            path = find_chain(g, u, v, 3)
            assert path is not None and len(path) == 4
            assert verify_chain(g, path)


def test_find_chain_matches_exact_reach_oracle():
    rng = random.Random(99)
    for _ in range(40):
        g = random_digraph(rng, max_n=8)
        for _ in range(12):
            u = rng.randrange(g.n)
            v = rng.randrange(g.n)
            length = rng.randint(1, 8)
            path = find_chain(g, u, v, length)
            exists = v in exact_length_reach(g, u, length)
            assert (path is not None) == exists
            if path is not None:
                assert path[0] == u and path[-1] == v and len(path) == length + 1
                assert verify_chain(g, path)


def test_reachability_threshold_three_cycle():
    g = three_cycle()
    dec = cyclic_decomposition(g)
    table = reachability_threshold(g, dec, 0)
    assert table == {(0, 0): 1, (1, 1): 1, (2, 2): 1}


def test_reachability_threshold_doubling_small():
    g = sy.discretize(sy.doubling_map(), 8, F(0))
    dec = cyclic_decomposition(g)
    table = reachability_threshold(g, dec, 0)
    assert len(table) == 64
    assert all(n <= 8 for n in table.values())


def test_reachability_threshold_two_cycle_no_cross_pairs():
    g = ChainGraph.from_edges(2, [(0, 1), (1, 0)])
    dec = cyclic_decomposition(g)
    table = reachability_threshold(g, dec, 0)
    assert set(table) == {(0, 0), (1, 1)}       # classes are singletons


def test_every_cycle_sits_inside_one_component():
    rng = random.Random(5)
    from oracles import simple_cycles
    for _ in range(20):
        g = random_digraph(rng, max_n=8)
        dec = cyclic_decomposition(g)
        for cyc in simple_cycles(g):
            comps = {dec.component_of(v) for v in cyc}
            assert len(comps) == 1 and None not in comps


def test_period_divides_every_cycle_length():
    rng = random.Random(13)
    from math import gcd
    from oracles import simple_cycles
    for _ in range(20):
        g = random_digraph(rng, max_n=9)
        dec = cyclic_decomposition(g)
        cycles = simple_cycles(g)
        for comp in dec.components:
            lengths = [len(c) for c in cycles if set(c) <= comp.vertices]
            assert lengths
            agg = 0
            for ln in lengths:
                agg = gcd(agg, ln)
            assert comp.period == agg


def test_decomposition_json_shape():
    dec = cyclic_decomposition(three_cycle())
    js = dec.to_json()
    assert '"period": 3' in js and '"components"' in js
