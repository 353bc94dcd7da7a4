"""Tests for the block construction, schedule arithmetic, statistics, and
certificates, with independent recounts at small horizons."""
import random
from fractions import Fraction

import numpy as np
import pytest

from chainchaos import dc1, systems as sy
from chainchaos.chaingraph import verify_chain
from chainchaos.errors import InputError, PreconditionError, SearchError
from chainchaos.relation import related_at
from chainchaos.symbolic import ShiftPoint

F = Fraction

ZERO = ShiftPoint((), (0,))
ONE = ShiftPoint((), (1,))
ALT = ShiftPoint((), (0, 1))


def full_blocks(n_max=4):
    return dc1.gather_blocks(sy.full_shift(2, 1), ZERO, ONE, F(1, 2), n_max)


def test_gather_blocks_full_shift_frozen():
    blocks = full_blocks(3)
    for b in blocks:
        assert b.a == 1
        assert b.gamma0 == (0, 0) and b.gamma1 == (1, 1)
        assert b.alpha == (0, 1) and b.beta == (1, 0)
        assert b.separation == 1


def test_gather_blocks_golden_mean():
    spec = sy.golden_mean_shift(2)
    blocks = dc1.gather_blocks(spec, ZERO, ALT, F(1, 4), 2)
    g = sy.discretize(spec, 2)
    for b in blocks:
        assert b.a == 2
        assert set(b.gamma0) == {0}            # cycles through word 00
        assert set(b.gamma1) == {1, 2}         # cycles through words 01, 10
        assert verify_chain(g, b.alpha) and verify_chain(g, b.beta)


def test_gather_blocks_unrelated_pair_refused():
    rot = sy.circle_map(1, F(1, 3))
    grids = [dc1.GridSpec(3, F(0))] * 2
    with pytest.raises(PreconditionError) as err:
        dc1.gather_blocks(rot, F(0), F(1, 3), F(1, 4), 2, grids=grids)
    assert "level 1" in str(err.value)


def test_gather_blocks_identity_no_witness():
    ident = sy.identity_map()
    grids = [dc1.GridSpec(8, F(0))] * 1
    with pytest.raises(PreconditionError):
        # distinct boxes of the identity are never related
        dc1.gather_blocks(ident, F(1, 10), F(7, 10), F(1, 4), 1, grids=grids)


def test_minimal_repetition_spot_values():
    # constant block length 4: the second and third counts
    assert dc1.minimal_repetition(4, 8, 2) == 6
    assert dc1.minimal_repetition(4, 32, 3) == 22
    # constant block length 1
    assert dc1.minimal_repetition(1, 2, 2) == 6


def _stub_blocks(a_values):
    blocks = []
    for n, a in enumerate(a_values, start=1):
        blocks.append(dc1.BlockSet(
            n=n, a=a, gamma0=(0,) * (a + 1), gamma1=(1,) * (a + 1),
            alpha=(0,) * a + (1,), beta=(1,) * a + (0,),
            grid=dc1.GridSpec(1, F(1)), separation=F(1), defect_bound=F(1, n)))
    return blocks


def test_build_schedule_minimality_and_inequality():
    rng = random.Random(11)
    for _ in range(10):
        n_max = 50
        a_values = [rng.randint(1, 20) for _ in range(n_max)]
        sched = dc1.build_schedule(_stub_blocks(a_values), r=F(1))
        assert sched.m_at(1) == 2
        for n in range(2, n_max + 1):
            a, b, m = sched.a(n), sched.b(n), sched.m_at(n)
            assert F(a * (m - 2) + 1, b + a * m + 1) > 1 - F(1, n)
            if m > 2:
                assert not F(a * (m - 3) + 1, b + a * (m - 1) + 1) > 1 - F(1, n), \
                    "repetition count is not minimal"


def test_schedule_checkpoint_arithmetic():
    sched = dc1.build_schedule(_stub_blocks([1, 1, 1]), r=F(1))
    assert sched.m == (2, 6, 22)
    assert [sched.b(n) for n in (1, 2, 3)] == [0, 2, 8]
    assert [sched.c(n) for n in (1, 2, 3)] == [3, 9, 31]


def test_build_block_orbit_lengths_and_patterns():
    blocks = full_blocks(3)
    sched = dc1.build_schedule(blocks, r=F(1, 2))
    g = sy.discretize(sy.full_shift(2, 1), 1)
    xi0 = dc1.build_block_orbit([0], sched, graph=g)
    assert list(xi0.ids) == [0, 0, 0]                       # a1*m1 = 2 entries plus closing z
    xi01 = dc1.build_block_orbit([0, 1], sched, graph=g)
    # level 2 with bit 1: alpha gamma1^(m2-2) beta = z w w w w w z at word level
    assert list(xi01.ids) == [0, 0] + [0, 1, 1, 1, 1, 1] + [0]
    assert len(xi01.ids) == sched.b(3) + 1
    for bits in ([0, 1, 0], [1, 1, 0], [1, 0, 1]):
        xi = dc1.build_block_orbit(bits, sched, graph=g)
        assert len(xi.ids) == sched.b(4) + 1


def test_block_orbit_is_a_valid_walk():
    blocks = full_blocks(4)
    sched = dc1.build_schedule(blocks, r=F(1, 2))
    g = sy.discretize(sy.full_shift(2, 1), 1)
    xi = dc1.build_block_orbit([1, 0, 1, 1], sched, graph=g)
    ids = list(xi.ids)
    assert verify_chain(g, ids)


def test_window_invariants_small_levels():
    """Entrywise equality on matching levels, strict separation on the bulk
    of differing levels, recounted from materialized arrays."""
    spec = sy.full_shift(2, 1)
    blocks = full_blocks(4)
    sched = dc1.build_schedule(blocks, r=F(1, 2))
    g = sy.discretize(spec, 1)
    u, v = (0, 0, 1, 0), (0, 1, 1, 1)
    xi_u = dc1.build_block_orbit(u, sched, graph=g)
    xi_v = dc1.build_block_orbit(v, sched, graph=g)
    for n in range(1, 5):
        b, a, m = sched.b(n), sched.a(n), sched.m_at(n)
        if u[n - 1] == v[n - 1]:
            assert (xi_u.ids[b:b + a * m + 1] == xi_v.ids[b:b + a * m + 1]).all()
        else:
            lo, hi = b + a, b + a + a * (m - 2)
            for i in range(lo, hi + 1):
                wu = g.labels[int(xi_u.ids[i])]
                wv = g.labels[int(xi_v.ids[i])]
                from chainchaos.symbolic import word_distance
                assert word_distance(wu, wv) > F(1, 2)


def test_statistics_identical_points():
    sched = dc1.build_schedule(full_blocks(2), r=F(1, 2))
    spec = sy.full_shift(2, 1)
    stats = dc1.dc1_statistics(spec, ZERO, ZERO, sched, n_levels=2)
    for cp in stats.checkpoints:
        assert all(p == 1 for p in cp.phi.values())
        assert all(p == 0 for p in cp.psi.values())


def test_statistics_fixed_points_always_separated():
    sched = dc1.build_schedule(full_blocks(2), r=F(1, 2))
    spec = sy.full_shift(2, 1)
    stats = dc1.dc1_statistics(spec, ZERO, ONE, sched, n_levels=2)
    for cp in stats.checkpoints:
        assert all(p == 1 for s, p in cp.psi.items() if s < 1)
        assert all(p == 0 for p in cp.phi.values())


def test_certify_input_errors():
    spec = sy.full_shift(2, 1)
    sched = dc1.build_schedule(full_blocks(4), r=F(1, 2))
    with pytest.raises(InputError):
        dc1.certify_dc1(spec, sched, [0, 0], [0, 0])
    with pytest.raises(InputError):
        dc1.certify_dc1(spec, sched, [0, 1], [1, 0])     # no matching level
    with pytest.raises(PreconditionError):
        dc1.certify_dc1(sy.doubling_map(), sched, [0, 0], [0, 1])


def test_certificate_counts_match_naive_recount():
    """The vectorized counts equal a pointwise exact recount at 5 levels."""
    spec = sy.full_shift(2, 1)
    sched = dc1.build_schedule(full_blocks(5), r=F(1, 2))
    u, v = (0, 0, 0, 0, 0), (0, 1, 0, 1, 0)
    cert = dc1.certify_dc1(spec, sched, u, v)
    x0, x1 = cert.shadow_u, cert.shadow_v
    horizon = sched.c(5)
    naive = []
    a, b = x0, x1
    for _ in range(horizon):
        naive.append(a.distance(b, cap=40))
        a, b = a.shift(), b.shift()
    for lv in cert.levels:
        window = naive[:lv.checkpoint]
        if lv.matched:
            expected = sum(1 for d in window if d < F(1, 2))
        else:
            expected = sum(1 for d in window if d > F(1, 6))
        assert lv.measured == expected
        assert lv.margin == F(lv.measured, lv.checkpoint) - (1 - F(1, lv.n))
        assert lv.passed


def test_certify_golden_mean_positive_margins():
    spec = sy.golden_mean_shift(2)
    sched, cert = dc1.dc1_pipeline(spec, ZERO, ALT, F(1, 4),
                                   [0] * 6, [i % 2 for i in range(6)], n_max=6)
    assert cert.all_passed
    assert all(lv.margin > 0 for lv in cert.levels)
    assert cert.tracking_bound == F(1, 4)


def test_certified_shadow_points_are_admissible():
    spec = sy.golden_mean_shift(2)
    sched, cert = dc1.dc1_pipeline(spec, ZERO, ALT, F(1, 4),
                                   [0, 0, 1], [0, 1, 1], n_max=3)
    cert.shadow_u.validate(spec.adjacency)
    cert.shadow_v.validate(spec.adjacency)


def test_factor_construct_full_shift():
    spec = sy.full_shift(2, 1)
    factor = dc1.factor_construct(spec, ZERO, ONE, F(1, 4))
    assert factor.a == 1
    assert factor.chains[(0, 1)] == (0, 1)
    sample = factor.sample([0] * 6)
    assert sample.within and sample.point == ZERO
    bound = dc1.entropy_lower_bound(factor)
    assert bound["a"] == 1
    assert abs(bound["bound"] - bound["true_entropy"]) < 1e-12


def test_factor_construct_golden_mean():
    spec = sy.golden_mean_shift(2)
    factor = dc1.factor_construct(spec, ZERO, ALT, F(1, 5))
    assert factor.a == 2
    bound = dc1.entropy_lower_bound(factor)
    import math
    assert bound["bound"] == pytest.approx(math.log(2) / 2)
    assert bound["true_entropy"] == pytest.approx(math.log((1 + 5 ** 0.5) / 2))
    assert bound["bound"] <= bound["true_entropy"] + 1e-12


def test_factor_epsilon_precondition():
    spec = sy.full_shift(2, 1)
    with pytest.raises(PreconditionError):
        dc1.factor_construct(spec, ZERO, ONE, F(1, 2))
    with pytest.raises(PreconditionError):
        dc1.factor_construct(sy.doubling_map(), F(0), F(1, 2), F(1, 8))


def test_factor_constant_bits_anchor_at_x():
    spec = sy.full_shift(2, 1)
    factor = dc1.factor_construct(spec, ZERO, ONE, F(1, 4))
    for n in (1, 3, 5):
        sample = factor.sample([0] * n)
        assert all(d == 0 for d in sample.distances)


def test_approximate_dc1_near_full_shift_fixed_points():
    spec = sy.full_shift(2, 1)
    res = dc1.approximate_dc1_near(spec, ZERO, ONE, F(1, 4), n_max=5)
    assert res.z == ZERO and res.w == ONE
    assert res.within_epsilon
    assert res.certificate.all_passed


def test_approximate_dc1_near_golden_mean():
    spec = sy.golden_mean_shift(2)
    res = dc1.approximate_dc1_near(spec, ZERO, ALT, F(1, 8), n_max=4)
    assert res.within_epsilon
    assert res.z.distance(ZERO) <= F(1, 8)
    assert res.w.distance(ALT) <= F(1, 8)
    assert res.certificate.all_passed


def test_approximate_dc1_near_unrelated_pair_errors():
    spec = sy.sft([[1, 1, 0, 0], [1, 1, 0, 0], [0, 0, 1, 1], [0, 0, 1, 1]], 1)
    with pytest.raises(PreconditionError):
        dc1.approximate_dc1_near(spec, ShiftPoint((), (0,)), ShiftPoint((), (2,)),
                                 F(1, 4), n_max=2)


def test_block_tracking_averages_decay():
    """Against per-level periodic reference points, the tracking average at
    the checkpoints is bounded by (level count) * 2 / checkpoint."""
    from chainchaos.shadowing import PseudoOrbit, shadow_sft, tracking_average
    spec = sy.full_shift(2, 1)
    g = sy.discretize(spec, 1)
    sched = dc1.build_schedule(full_blocks(4), r=F(1, 2))
    bits = (0, 1, 0, 1)
    xi = dc1.build_block_orbit(bits, sched, graph=g)
    y = shadow_sft(xi.pseudo_orbit(), 1)
    # reference points: each level's entries come from its own periodic block
    pts = []
    for n in range(1, 5):
        pattern = xi.level_pattern(n)
        syms = tuple(int(g.labels[int(i)][0]) for i in pattern)
        block_point = ShiftPoint(syms, (0,))
        for t in range(len(pattern)):
            pts.append(block_point.shift(t))
    pts.append(ZERO)
    po = PseudoOrbit(points=pts)
    eps = tracking_average(spec, y, po, len(pts))
    checks = [eps[sched.c(n) - 1] for n in range(1, 5)]
    for n, e in enumerate(checks, start=1):
        assert e <= F(2 * n, sched.c(n))
    assert all(b <= a for a, b in zip(checks, checks[1:]))
