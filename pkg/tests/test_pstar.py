"""Tests for separated cycle pairs and product-orbit recurrence."""
import random
from fractions import Fraction

import pytest

from chainchaos import systems as sy
from chainchaos.chaingraph import ChainGraph, verify_chain
from chainchaos.errors import InputError
from chainchaos.pstar import omega_product, separated_cycles
from chainchaos.symbolic import ShiftPoint

from oracles import random_digraph

F = Fraction


def test_full_shift_fixed_words_witness():
    g = sy.discretize(sy.full_shift(2, 1), 1)
    w = separated_cycles(g, 0, 1, F(1, 2))
    assert w is not None
    assert w.length == 1
    assert w.cycle1 == (0, 0) and w.cycle2 == (1, 1)
    assert min(w.separations) == 1
    assert w.adjusted_margin == F(1, 2)


def test_radius_beyond_diameter_absent():
    g = sy.discretize(sy.full_shift(2, 1), 1)
    assert separated_cycles(g, 0, 1, F(2)) is None


def test_three_cycle_rotating_witness():
    g = ChainGraph.from_edges(3, [(0, 1), (1, 2), (2, 0)])
    w = separated_cycles(g, 0, 1, F(1, 2))
    assert w is not None and w.length == 3
    assert w.cycle1 == (0, 1, 2, 0)
    assert w.cycle2 == (1, 2, 0, 1)


def test_endpoints_too_close_absent():
    g = ChainGraph.from_edges(2, [(0, 0), (1, 1), (0, 1), (1, 0)])
    assert separated_cycles(g, 0, 0, F(0)) is None    # dist(u,u) = 0, not > 0


def test_witness_reverifies_independently():
    g = sy.discretize(sy.golden_mean_shift(2), 2)
    w = separated_cycles(g, 0, 1, F(1, 4))
    assert w is not None
    assert verify_chain(g, w.cycle1, closed=True)
    assert verify_chain(g, w.cycle2, closed=True)
    for a, b in zip(w.cycle1, w.cycle2):
        assert g.separation(a, b) > F(1, 4)


def test_matches_product_graph_scc_characterization():
    rng = random.Random(424242)
    hits = misses = 0
    for _ in range(40):
        g = random_digraph(rng, max_n=6)
        r = F(1, 2)
        # explicit product graph restricted to separated pairs
        pairs = [(a, b) for a in range(g.n) for b in range(g.n)
                 if g.separation(a, b) > r]
        idx = {p: i for i, p in enumerate(pairs)}
        edges = [(idx[(a, b)], idx[(c, d)])
                 for (a, b) in pairs for c in g.adj[a] for d in g.adj[b]
                 if (c, d) in pairs]
        product = ChainGraph.from_edges(len(pairs), edges)
        from chainchaos.chaingraph import chain_recurrent_set
        recurrent = chain_recurrent_set(product)
        for (a, b) in pairs:
            expected = idx[(a, b)] in recurrent
            got = separated_cycles(g, a, b, r) is not None
            assert got == expected, (a, b)
            hits += got
            misses += not got
    assert hits > 10 and misses > 10


def test_omega_product_fixed_point():
    d = sy.doubling_map()
    out = omega_product(d, F(0), F(0), horizon=16, grid=8)
    assert out == {(0, 0)}


def test_omega_product_eventually_periodic_shift():
    s = sy.full_shift(2, 1)
    x = ShiftPoint((0,), (1,))
    y = ShiftPoint((), (1,))
    out = omega_product(s, x, y, horizon=16, grid=1)
    assert out == {(1, 1)}


def test_omega_product_doubling_period_two():
    d = sy.doubling_map()
    out = omega_product(d, F(1, 3), F(2, 3), horizon=16, grid=6)
    assert out == {(2, 4), (4, 2)}     # boxes of 1/3 and 2/3 on a 6-grid


def test_omega_product_horizon_validation():
    with pytest.raises(InputError):
        omega_product(sy.doubling_map(), F(0), F(0), horizon=0, grid=4)
