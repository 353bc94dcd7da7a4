"""Block construction and finite-scale certificates for type-1
distributional chaos.

Given a related pair of recurrent boxes (z, w) that admits uniformly
separated equal-length cycles, the construction assembles, per level n,
four chains of one common length a_n:

    gamma0_n : cycle through z      gamma1_n : cycle through w
    alpha_n  : chain z -> w         beta_n   : chain w -> z

with gamma0_n and gamma1_n more than r apart index by index.  Repetition
counts m_n are chosen minimal with m_1 = 2 and, for n > 1,

    (a_n * (m_n - 2) + 1) / (b_n + a_n * m_n + 1) > 1 - 1/n,

where b_n is the total length of the previous levels.  A bit string u then
selects per level either the block gamma0^m (bit 0) or alpha gamma1^(m-2)
beta (bit 1); concatenating the blocks yields a pseudo-orbit whose defects
shrink level by level.  For two bit strings the assembled orbits agree
entrywise across level n when the bits match and stay separated by more
than r on the bulk of level n when they differ, which forces the orbit
pair of the shadow points to be close on a (1 - 1/n) fraction of the time
at matching checkpoints and separated on a (1 - 1/n) fraction at differing
checkpoints.  Certificates check exactly those per-checkpoint counts; the
limit statement is never claimed.

Statistics run on numpy symbol arrays: orbit distances on a shift are
2^(-gap) where gap is the distance to the next symbol disagreement, so
threshold counts reduce to histogramming an integer gap array.  Checkpoint
c_10 is around 2 * 10^7 indices, far beyond pointwise exact arithmetic.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .chaingraph import ChainGraph, CyclicDecomposition, cyclic_decomposition
from .errors import InputError, PreconditionError, SearchError
from .pstar import SeparationWitness, separated_cycles
from .relation import MutualChains, mutual_chains, related_at
from .shadowing import PseudoOrbit, shadow_sft, tracking_supremum_bound
from .symbolic import ShiftPoint, word_distance
from .systems import (SFT, SystemSpec, box_cover, discretize, evaluate,
                      metric, point_to_box)

Bits = Tuple[int, ...]

#: default dyadic threshold grids for closeness and separation profiles
DEFAULT_GRID = tuple(Fraction(1, 2 ** t) for t in range(1, 11))

#: padding (symbols past the horizon) for gap computations; distances that
#: stay below 2^(-GAP_CAP) are recorded at that cap
GAP_CAP = 24


# -- grids ----------------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """Discretization parameters for one level: box count (or word depth)
    and edge tolerance."""
    boxes: int
    delta: Fraction


def default_grids(spec: SystemSpec, n_max: int) -> List[GridSpec]:
    """Per-level grids: constant at the system depth for shifts, box size
    1/(2n) for numeric systems so a chain step plus box slack stays within 1/n."""
    if spec.kind == SFT:
        return [GridSpec(spec.depth, Fraction(1, 2 ** spec.depth))] * n_max
    return [GridSpec(max(4, 2 * n), Fraction(1, 2 * n)) for n in range(1, n_max + 1)]


# -- gathered blocks ---------------------------------------------------------------


@dataclass(frozen=True)
class BlockSet:
    """The four equal-length chains of one level."""
    n: int
    a: int
    gamma0: Tuple[int, ...]
    gamma1: Tuple[int, ...]
    alpha: Tuple[int, ...]
    beta: Tuple[int, ...]
    grid: GridSpec
    separation: Fraction       # min certified separation of (gamma0, gamma1) pairs
    defect_bound: Fraction     # chain step tolerance plus box slack

    def validate(self, g: ChainGraph, r: Fraction) -> None:
        from .chaingraph import verify_chain

        z, w = self.gamma0[0], self.gamma1[0]
        if not (verify_chain(g, self.gamma0, closed=True)
                and verify_chain(g, self.gamma1, closed=True)
                and verify_chain(g, self.alpha) and verify_chain(g, self.beta)):
            raise SearchError(f"invalid chains at level {self.n}")
        if not (self.alpha[0] == z and self.alpha[-1] == w
                and self.beta[0] == w and self.beta[-1] == z):
            raise SearchError(f"chain endpoints broken at level {self.n}")
        if not len(self.gamma0) == len(self.gamma1) == len(self.alpha) == len(self.beta) == self.a + 1:
            raise SearchError(f"length mismatch at level {self.n}")
        for p, q in zip(self.gamma0, self.gamma1):
            if not g.separation(p, q) > r:
                raise SearchError(f"separation failure at level {self.n}")


def gather_blocks(spec: SystemSpec, z, w, r, n_max: int,
                  grids: Optional[Sequence[GridSpec]] = None) -> List[BlockSet]:
    """Per-level separated cycles and connecting chains for the pair (z, w).

    Preconditions checked per level: the boxes of z and w must be in a
    common class of the cyclic decomposition, and a separated cycle pair
    through them must exist at radius r.  Cycle pairs are repeated and the
    connecting chains searched at multiples of the witness length until one
    common length works for all four chains.
    """
    r = Fraction(r)
    if n_max < 1:
        raise InputError("n_max must be >= 1")
    grids = list(grids) if grids is not None else default_grids(spec, n_max)
    if len(grids) < n_max:
        raise InputError("need one grid per level")
    cache: Dict[GridSpec, Tuple[ChainGraph, CyclicDecomposition]] = {}
    blocks: List[BlockSet] = []
    for n in range(1, n_max + 1):
        grid = grids[n - 1]
        if grid not in cache:
            g = discretize(spec, grid.boxes, grid.delta)
            cache[grid] = (g, cyclic_decomposition(g))
        g, dec = cache[grid]
        cover = box_cover(spec, grid.boxes)
        bz = point_to_box(spec, cover, z)
        bw = point_to_box(spec, cover, w)
        if not related_at(dec, bz, bw):
            raise PreconditionError(
                f"level {n}: boxes of z and w are not related at this resolution")
        witness = separated_cycles(g, bz, bw, r)
        if witness is None:
            raise SearchError(
                f"level {n}: no separated cycle pair at radius {r} "
                f"(endpoint separation {g.separation(bz, bw)})")
        comp = dec.components[dec.class_of(bz)[0]]
        within = comp.vertices
        k = witness.length
        from .chaingraph import find_chain

        alpha = beta = None
        a = None
        reps = 0
        max_reps = max(2 * comp.period * max(len(cl) for cl in comp.classes) ** 2 // k + 2,
                       8)
        for j in range(1, max_reps + 1):
            alpha = find_chain(g, bz, bw, j * k, within=within)
            beta = find_chain(g, bw, bz, j * k, within=within)
            if alpha is not None and beta is not None:
                a = j * k
                reps = j
                break
        if a is None:
            raise SearchError(
                f"level {n}: no common length multiple of {k} connects z and w "
                f"both ways (period {comp.period})")
        gamma0 = witness.cycle1[:-1] * reps + (witness.cycle1[0],)
        gamma1 = witness.cycle2[:-1] * reps + (witness.cycle2[0],)
        block = BlockSet(
            n=n, a=a, gamma0=gamma0, gamma1=gamma1,
            alpha=tuple(alpha), beta=tuple(beta), grid=grid,
            separation=min(witness.separations),
            defect_bound=grid.delta + g.diam,
        )
        block.validate(g, r)
        blocks.append(block)
    return blocks


# -- the repetition schedule ---------------------------------------------------------


@dataclass(frozen=True)
class DC1Schedule:
    r: Fraction
    blocks: Tuple[BlockSet, ...]
    m: Tuple[int, ...]

    @property
    def n_max(self) -> int:
        return len(self.m)

    def a(self, n: int) -> int:
        return self.blocks[n - 1].a

    def m_at(self, n: int) -> int:
        return self.m[n - 1]

    def b(self, n: int) -> int:
        """Total length of levels before n."""
        return sum(self.a(i) * self.m_at(i) for i in range(1, n))

    def c(self, n: int) -> int:
        """Checkpoint horizon of level n."""
        return self.b(n) + self.a(n) * self.m_at(n) + 1

    def ratio(self, n: int) -> Fraction:
        return Fraction(self.a(n) * (self.m_at(n) - 2) + 1, self.c(n))

    def to_json(self) -> str:
        return json.dumps({
            "r": str(self.r),
            "levels": [
                {"n": n, "a": self.a(n), "m": self.m_at(n),
                 "b": self.b(n), "c": self.c(n),
                 "gamma0": list(self.blocks[n - 1].gamma0),
                 "gamma1": list(self.blocks[n - 1].gamma1),
                 "alpha": list(self.blocks[n - 1].alpha),
                 "beta": list(self.blocks[n - 1].beta)}
                for n in range(1, self.n_max + 1)
            ],
        }, indent=2, sort_keys=True) + "\n"


def minimal_repetition(a: int, b: int, n: int) -> int:
    """Smallest integer m with (a(m-2)+1)/(b+am+1) > 1 - 1/n, and m >= 2.

    The inequality is linear in m, so the bound is closed-form; scanning
    from 2 is hopeless once b grows (m reaches 10^60 within dozens of
    levels).
    """
    if n <= 1:
        return 2
    num = (n - 1) * (b + 1) + n * (2 * a - 1)
    return max(2, num // a + 1)


def build_schedule(blocks: Sequence[BlockSet],
                   n_max: Optional[int] = None,
                   r: Optional[Fraction] = None) -> DC1Schedule:
    """Choose the minimal repetition counts for gathered blocks."""
    blocks = tuple(blocks)
    n_max = n_max if n_max is not None else len(blocks)
    if n_max > len(blocks):
        raise InputError("not enough blocks for requested n_max")
    blocks = blocks[:n_max]
    if r is None:
        r = min(b.separation for b in blocks)
    m: List[int] = []
    b_total = 0
    for i, blk in enumerate(blocks, start=1):
        if i == 1:
            m_i = 2
        else:
            m_i = minimal_repetition(blk.a, b_total, i)
        m.append(m_i)
        b_total += blk.a * m_i
    sched = DC1Schedule(Fraction(r), blocks, tuple(m))
    verify_schedule(sched)
    return sched


def verify_schedule(sched: DC1Schedule) -> None:
    """Check the defining inequality verbatim, with exact arithmetic."""
    if sched.m_at(1) != 2:
        raise SearchError("m_1 must be 2")
    for n in range(2, sched.n_max + 1):
        if not sched.ratio(n) > 1 - Fraction(1, n):
            raise SearchError(f"schedule inequality fails at level {n}")


# -- assembled pseudo-orbits ------------------------------------------------------------


@dataclass
class BlockOrbit:
    """The pseudo-orbit selected by a bit prefix.

    Entries are vertex ids of the shared graph when all levels were
    gathered on one grid (always the case for shifts); otherwise they are
    per-level box center points.  Each level contributes exactly
    a_n * m_n entries; the final closing vertex is appended once.
    """
    bits: Bits
    schedule: DC1Schedule
    ids: Optional[np.ndarray] = None
    graph: Optional[ChainGraph] = None
    points: Optional[List] = None

    def __len__(self) -> int:
        return len(self.ids) if self.ids is not None else len(self.points)

    def pseudo_orbit(self) -> PseudoOrbit:
        if self.ids is not None:
            return PseudoOrbit(kind="blockwise", words=self.ids, graph=self.graph)
        return PseudoOrbit(kind="blockwise", points=self.points)

    def level_pattern(self, n: int) -> np.ndarray:
        """The a_n * m_n entry ids contributed by level n."""
        blk = self.schedule.blocks[n - 1]
        m = self.schedule.m_at(n)
        if self.bits[n - 1] == 0:
            return np.tile(np.array(blk.gamma0[:-1], dtype=np.int32), m)
        return np.concatenate([
            np.array(blk.alpha[:-1], dtype=np.int32),
            np.tile(np.array(blk.gamma1[:-1], dtype=np.int32), m - 2),
            np.array(blk.beta[:-1], dtype=np.int32),
        ])


def build_block_orbit(bits: Sequence[int], sched: DC1Schedule,
                      graph: Optional[ChainGraph] = None) -> BlockOrbit:
    """Assemble the pseudo-orbit for a bit prefix.

    Chains are concatenated by dropping the duplicated junction point:
    every block ends where the next begins (at z), so each level
    contributes its first a_n * m_n entries and the final z closes the
    prefix.
    """
    bits = tuple(int(b) for b in bits)
    if any(b not in (0, 1) for b in bits):
        raise InputError("bits must be 0 or 1")
    if len(bits) > sched.n_max:
        raise InputError("bit prefix longer than the schedule")
    if not bits:
        raise InputError("empty bit prefix")
    orbit = BlockOrbit(bits, sched, graph=graph)
    shared_grid = all(b.grid == sched.blocks[0].grid for b in sched.blocks[:len(bits)])
    if not shared_grid:
        raise InputError("mixed-grid block orbits are not assembled; "
                         "gather blocks on a constant grid to build one")
    parts = [orbit.level_pattern(n) for n in range(1, len(bits) + 1)]
    # every block starts and ends at z, so the single closing entry is z
    parts.append(np.array([sched.blocks[len(bits) - 1].gamma0[0]], dtype=np.int32))
    orbit.ids = np.concatenate(parts)
    assert len(orbit.ids) == sched.b(len(bits) + 1) + 1
    return orbit


# -- statistics -----------------------------------------------------------------------


def _threshold_exponents(values: Sequence[Fraction], mode: str, cap: int) -> List[int]:
    """For '<': smallest g with 2^-g < value.  For '>': largest g with 2^-g > value
    (-1 when none)."""
    out = []
    for val in values:
        val = Fraction(val)
        if mode == "<":
            g = 0
            while Fraction(1, 2 ** g) >= val:
                g += 1
                if g > cap:
                    raise InputError(f"threshold {val} below resolution 2^-{cap}")
            out.append(g)
        else:
            g = -1
            while g + 1 <= cap and Fraction(1, 2 ** (g + 1)) > val:
                g += 1
            out.append(g)
    return out


@dataclass(frozen=True)
class CheckpointStats:
    n: int
    c: int
    matched: Optional[bool]
    phi: Dict[Fraction, Fraction]       # proportion of i < c with d_i < delta
    psi: Dict[Fraction, Fraction]       # proportion of i < c with d_i > s
    closeness_count: Optional[int]      # at the certification closeness threshold
    separation_count: Optional[int]     # at the certification separation threshold
    required: Optional[Fraction]        # c * (1 - 1/n - tracking terms)
    epsilon: Tuple[Fraction, Fraction] = (Fraction(0), Fraction(0))


@dataclass(frozen=True)
class PairStatistics:
    horizon: int
    close_threshold: Fraction
    sep_threshold: Fraction
    checkpoints: Tuple[CheckpointStats, ...]

    def to_csv(self) -> str:
        lines = ["n,c,matched,phi_close,psi_sep,required,margin"]
        for cp in self.checkpoints:
            phi = cp.closeness_count
            psi = cp.separation_count
            measured = phi if cp.matched else psi
            margin = ""
            if cp.required is not None and measured is not None:
                margin = str(Fraction(measured) - cp.required)
            lines.append(
                f"{cp.n},{cp.c},{'' if cp.matched is None else int(cp.matched)},"
                f"{phi},{psi},{cp.required if cp.required is not None else ''},{margin}")
        return "\n".join(lines) + "\n"


def _gap_array(sym0: np.ndarray, sym1: np.ndarray, horizon: int, cap: int) -> np.ndarray:
    """gap[i] = min(j - i) over symbol disagreements j >= i, clipped to cap."""
    total = len(sym0)
    neq = sym0 != sym1
    idx = np.arange(total, dtype=np.int32)
    nxt = np.where(neq, idx, total + cap)
    np.minimum.accumulate(nxt[::-1], out=nxt[::-1])
    gap = nxt[:horizon] - idx[:horizon]
    np.clip(gap, 0, cap, out=gap)
    return gap.astype(np.int32)


def _checkpoint_gap_hists(gap: np.ndarray, checkpoints: Sequence[int], cap: int) -> np.ndarray:
    """Cumulative histograms of gap values at each checkpoint (one bincount
    per segment, summed)."""
    hists = np.zeros((len(checkpoints), cap + 1), dtype=np.int32)
    prev = 0
    acc = np.zeros(cap + 1, dtype=np.int32)
    for row, c in enumerate(checkpoints):
        seg = gap[prev:c]
        acc = acc + np.bincount(seg, minlength=cap + 1)
        hists[row] = acc
        prev = c
    return hists


def orbit_symbols(x, length: int) -> np.ndarray:
    if not isinstance(x, ShiftPoint):
        raise InputError("symbol statistics need shift points")
    return x.symbols(length)


def dc1_statistics(spec: SystemSpec, x0, x1, sched: DC1Schedule,
                   u: Optional[Sequence[int]] = None, v: Optional[Sequence[int]] = None,
                   delta_grid: Sequence[Fraction] = DEFAULT_GRID,
                   s_grid: Sequence[Fraction] = DEFAULT_GRID,
                   epsilons: Optional[Tuple[Fraction, Fraction]] = None,
                   n_levels: Optional[int] = None) -> PairStatistics:
    """Closeness and separation profiles of an orbit pair at the schedule
    checkpoints.

    When the bit prefixes u, v are supplied, each checkpoint also carries
    the count required by the level's bound: c_n * (1 - 1/n) minus the
    tracking correction 2/delta (respectively 3/r) times the supplied
    tracking averages.  Counts are exact.
    """
    n_levels = n_levels if n_levels is not None else (len(u) if u else sched.n_max)
    checkpoints = [sched.c(n) for n in range(1, n_levels + 1)]
    horizon = checkpoints[-1]
    k = spec.depth if spec.kind == SFT else None
    close_thr = Fraction(1, 2 ** k) if k else Fraction(sched.r) / 2
    sep_thr = Fraction(sched.r) / 3
    eps = epsilons if epsilons is not None else (Fraction(0), Fraction(0))

    if spec.kind == SFT:
        pad = GAP_CAP + 1
        sym0 = orbit_symbols(x0, horizon + pad)
        sym1 = orbit_symbols(x1, horizon + pad)
        gap = _gap_array(sym0, sym1, horizon, GAP_CAP)
        hists = _checkpoint_gap_hists(gap, checkpoints, GAP_CAP)
        suffix = np.cumsum(hists[:, ::-1], axis=1)[:, ::-1]  # counts of gap >= g

        def count_lt(row: int, g_min: int) -> int:
            return int(suffix[row, g_min]) if g_min <= GAP_CAP else 0

        def count_gt(row: int, g_max: int) -> int:
            if g_max < 0:
                return 0
            total = int(hists[row].sum())
            return total - (int(suffix[row, g_max + 1]) if g_max + 1 <= GAP_CAP else 0)

        close_exps = _threshold_exponents(list(delta_grid), "<", GAP_CAP)
        sep_exps = _threshold_exponents(list(s_grid), ">", GAP_CAP)
        cert_close = _threshold_exponents([close_thr], "<", GAP_CAP)[0]
        cert_sep = _threshold_exponents([sep_thr], ">", GAP_CAP)[0]

        stats = []
        for row, n in enumerate(range(1, n_levels + 1)):
            c = checkpoints[row]
            matched = None
            required = None
            if u is not None and v is not None:
                matched = int(u[n - 1]) == int(v[n - 1])
                base = Fraction(c) * (1 - Fraction(1, n))
                if matched:
                    required = base - Fraction(c) * 2 * (eps[0] + eps[1]) / close_thr
                else:
                    required = base - Fraction(c) * 3 * (eps[0] + eps[1]) / Fraction(sched.r)
            phi = {d: Fraction(count_lt(row, g), c)
                   for d, g in zip(delta_grid, close_exps)}
            psi = {s: Fraction(count_gt(row, g), c)
                   for s, g in zip(s_grid, sep_exps)}
            stats.append(CheckpointStats(
                n=n, c=c, matched=matched, phi=phi, psi=psi,
                closeness_count=count_lt(row, cert_close),
                separation_count=count_gt(row, cert_sep),
                required=required, epsilon=eps))
        return PairStatistics(horizon, close_thr, sep_thr, tuple(stats))

    # numeric systems: exact pointwise loop, guarded
    if horizon > 200_000:
        raise InputError("pointwise statistics beyond 200000 steps; "
                         "only shift systems support long horizons")
    ds: List[Fraction] = []
    a, b = x0, x1
    for _ in range(horizon):
        ds.append(metric(spec, a, b))
        a, b = evaluate(spec, a), evaluate(spec, b)
    stats = []
    for n in range(1, n_levels + 1):
        c = sched.c(n)
        window = ds[:c]
        matched = None if u is None or v is None else int(u[n - 1]) == int(v[n - 1])
        phi = {d: Fraction(sum(1 for x in window if x < d), c) for d in delta_grid}
        psi = {s: Fraction(sum(1 for x in window if x > s), c) for s in s_grid}
        stats.append(CheckpointStats(
            n=n, c=c, matched=matched, phi=phi, psi=psi,
            closeness_count=sum(1 for x in window if x < close_thr),
            separation_count=sum(1 for x in window if x > sep_thr),
            required=None, epsilon=eps))
    return PairStatistics(horizon, close_thr, sep_thr, tuple(stats))


# -- certification ------------------------------------------------------------------------


@dataclass(frozen=True)
class LevelCheck:
    n: int
    checkpoint: int
    matched: bool
    threshold: Fraction
    measured: int
    required: Fraction
    margin: Fraction

    @property
    def passed(self) -> bool:
        return Fraction(self.measured) > self.required


@dataclass(frozen=True)
class DC1Certificate:
    bits_u: Bits
    bits_v: Bits
    r: Fraction
    depth: int
    tracking_bound: Fraction
    epsilons: Tuple[Fraction, Fraction]
    levels: Tuple[LevelCheck, ...]
    statistics: PairStatistics
    shadow_u: ShiftPoint
    shadow_v: ShiftPoint

    @property
    def all_passed(self) -> bool:
        return all(lv.passed for lv in self.levels)

    @property
    def verdict(self) -> str:
        if self.all_passed:
            return (f"finite-scale DC1 evidence to level {len(self.levels)}; "
                    "no claim about the infinite-time statistics")
        failed = [lv.n for lv in self.levels if not lv.passed]
        return f"bounds violated at levels {failed}"

    def to_json(self) -> str:
        return json.dumps({
            "u": "".join(map(str, self.bits_u)),
            "v": "".join(map(str, self.bits_v)),
            "r": str(self.r),
            "depth": self.depth,
            "tracking_bound": str(self.tracking_bound),
            "epsilons": [str(e) for e in self.epsilons],
            "verdict": self.verdict,
            "levels": [
                {"n": lv.n, "checkpoint": lv.checkpoint,
                 "bound": "closeness" if lv.matched else "separation",
                 "threshold": str(lv.threshold),
                 "measured_count": lv.measured,
                 "required_count": str(lv.required),
                 "margin": str(lv.margin),
                 "passed": lv.passed}
                for lv in self.levels
            ],
        }, indent=2, sort_keys=True) + "\n"


def certify_dc1(spec: SystemSpec, sched: DC1Schedule,
                u: Sequence[int], v: Sequence[int],
                graph: Optional[ChainGraph] = None) -> DC1Certificate:
    """Assemble, shadow, measure, and check both level bounds.

    Only shift systems are certifiable: their read-off points track the
    assembled pseudo-orbits exactly, so the bounds apply with vanishing
    tracking terms.  Numeric systems are refused rather than certified
    with guessed tracking numbers.
    """
    if spec.kind != SFT:
        raise PreconditionError("no exact shadowing available for this system; "
                                "certificates are issued for shifts only")
    bits_u = tuple(int(b) for b in u)
    bits_v = tuple(int(b) for b in v)
    if len(bits_u) != len(bits_v):
        raise InputError("bit prefixes must have equal length")
    if bits_u == bits_v:
        raise InputError("no separation checkpoints: the bit prefixes are identical")
    if all(a != b for a, b in zip(bits_u, bits_v)):
        raise InputError("no closeness checkpoints: the bit prefixes differ everywhere")
    n_levels = len(bits_u)
    if n_levels > sched.n_max:
        raise InputError("bit prefixes longer than the schedule")

    if graph is None:
        grid = sched.blocks[0].grid
        graph = discretize(spec, grid.boxes, grid.delta)
    k = len(graph.labels[0])

    xi_u = build_block_orbit(bits_u, sched, graph=graph)
    xi_v = build_block_orbit(bits_v, sched, graph=graph)
    x0 = shadow_sft(xi_u.pseudo_orbit(), k)
    x1 = shadow_sft(xi_v.pseudo_orbit(), k)
    bound0 = tracking_supremum_bound(graph, x0, xi_u.ids)
    bound1 = tracking_supremum_bound(graph, x1, xi_v.ids)
    # the read-off orbit sits inside every entry cylinder, so the Birkhoff
    # tracking averages against the entry boxes vanish identically
    eps = (Fraction(0), Fraction(0))

    stats = dc1_statistics(spec, x0, x1, sched, u=bits_u, v=bits_v,
                           epsilons=eps, n_levels=n_levels)
    levels = []
    for cp in stats.checkpoints:
        if cp.matched:
            measured = cp.closeness_count
            threshold = stats.close_threshold
        else:
            measured = cp.separation_count
            threshold = stats.sep_threshold
        margin = Fraction(measured, cp.c) - (1 - Fraction(1, cp.n))
        levels.append(LevelCheck(cp.n, cp.c, bool(cp.matched), threshold,
                                 measured, cp.required, margin))
    return DC1Certificate(bits_u, bits_v, sched.r, k, max(bound0, bound1),
                          eps, tuple(levels), stats, x0, x1)


def dc1_pipeline(spec: SystemSpec, z, w, r, u: Sequence[int], v: Sequence[int],
                 n_max: Optional[int] = None,
                 grids: Optional[Sequence[GridSpec]] = None):
    """gather -> schedule -> certify, returning (schedule, certificate)."""
    n_max = n_max if n_max is not None else max(len(u), len(v))
    blocks = gather_blocks(spec, z, w, r, n_max, grids=grids)
    sched = build_schedule(blocks, r=Fraction(r))
    cert = certify_dc1(spec, sched, u, v)
    return sched, cert


# -- the two-symbol factor --------------------------------------------------------------


@dataclass(frozen=True)
class SampleCheck:
    bits: Bits
    point: ShiftPoint
    distances: Tuple[Fraction, ...]
    within: bool


@dataclass(frozen=True)
class TwoShiftFactor:
    """Chains realizing a semiconjugacy of the a-th power onto the full
    2-shift: bit strings select anchor targets every a steps."""
    spec: SystemSpec
    graph: ChainGraph
    x: ShiftPoint
    y: ShiftPoint
    epsilon: Fraction
    a: int
    chains: Dict[Tuple[int, int], Tuple[int, ...]]   # keyed by bit pairs
    ball_guaranteed: bool

    def sample(self, bits: Sequence[int]) -> SampleCheck:
        """Shadow point of the chain concatenation for a finite bit string,
        with measured anchor distances d(f^((i-1)a) x(s), anchor_i)."""
        bits = tuple(int(b) for b in bits)
        if not bits:
            raise InputError("empty bit string")
        k = len(self.graph.labels[0])
        if len(bits) == 1:
            anchor = self.x if bits[0] == 0 else self.y
            ids = np.array([point_to_box(self.spec, box_cover(self.spec, k), anchor)],
                           dtype=np.int32)
        else:
            parts = []
            for s, t in zip(bits, bits[1:]):
                parts.append(np.array(self.chains[(s, t)][:-1], dtype=np.int32))
            last = self.chains[(bits[-2], bits[-1])][-1]
            parts.append(np.array([last], dtype=np.int32))
            ids = np.concatenate(parts)
        po = PseudoOrbit(kind="finite", words=ids, graph=self.graph)
        point = shadow_sft(po, k)
        dists = []
        ok = True
        for i, bit in enumerate(bits):
            anchor = self.x if bit == 0 else self.y
            d = point.shift(i * self.a).distance(anchor)
            dists.append(d)
            ok = ok and d <= self.epsilon
        return SampleCheck(bits, point, tuple(dists), ok)

    def anchor_orbit(self, bit: int) -> ShiftPoint:
        """Periodic point tracking the constant-bit chain cycle."""
        cyc = self.chains[(bit, bit)]
        symbols = tuple(self.graph.labels[i][0] for i in cyc[:-1])
        p = ShiftPoint((), symbols)
        p.validate(self.spec.adjacency)
        return p

    def entropy_lower_bound(self) -> Dict[str, float]:
        """log(2)/a from the factor, next to the true shift entropy."""
        rho = float(max(abs(np.linalg.eigvals(
            np.array(self.spec.adjacency, dtype=float)))))
        return {
            "a": self.a,
            "bound": math.log(2.0) / self.a,
            "true_entropy": math.log(rho),
            "spectral_radius": rho,
        }


def factor_construct(spec: SystemSpec, x: ShiftPoint, y: ShiftPoint,
                     epsilon) -> TwoShiftFactor:
    """Common length a and four connecting chains between the boxes of a
    related pair, packaged as a sampler onto bit strings.

    Works at the system's configured word depth: the read-off construction
    tracks within the cylinder diameter 2^(-depth) there.  When epsilon is
    at least that diameter the anchor condition holds a priori
    (ball_guaranteed); otherwise each sample reports its measured anchor
    distances.
    """
    epsilon = Fraction(epsilon)
    if spec.kind != SFT:
        raise PreconditionError("factor construction needs exact shadowing (shift systems)")
    d = metric(spec, x, y)
    if not epsilon < d / 2:
        raise PreconditionError(f"epsilon {epsilon} is not below half the pair distance {d}")
    g = discretize(spec, spec.depth)
    dec = cyclic_decomposition(g)
    cover = box_cover(spec, spec.depth)
    bx = point_to_box(spec, cover, x)
    by = point_to_box(spec, cover, y)
    if not related_at(dec, bx, by):
        raise PreconditionError("the pair is not related at the system resolution")
    mut = mutual_chains(g, bx, by, dec)
    if mut is None:
        raise SearchError("no common chain length connects the pair")
    chains = {
        (0, 0): tuple(mut.chains[(bx, bx)]),
        (0, 1): tuple(mut.chains[(bx, by)]),
        (1, 0): tuple(mut.chains[(by, bx)]),
        (1, 1): tuple(mut.chains[(by, by)]),
    }
    ball = Fraction(1, 2 ** spec.depth) <= epsilon
    return TwoShiftFactor(spec, g, x, y, epsilon, mut.length, chains, ball)


def entropy_lower_bound(factor: TwoShiftFactor) -> Dict[str, float]:
    return factor.entropy_lower_bound()


# -- locating certified pairs near a related pair ------------------------------------------


@dataclass(frozen=True)
class NearbyDC1Result:
    z: ShiftPoint
    w: ShiftPoint
    distances: Tuple[Fraction, Fraction]   # d(z, x), d(w, y)
    within_epsilon: bool
    factor: TwoShiftFactor
    schedule: DC1Schedule
    certificate: DC1Certificate


def approximate_dc1_near(spec: SystemSpec, x: ShiftPoint, y: ShiftPoint,
                         epsilon, n_max: int = 6,
                         u: Optional[Sequence[int]] = None,
                         v: Optional[Sequence[int]] = None) -> NearbyDC1Result:
    """Certified-evidence pair next to a related pair.

    Builds the two-shift factor at the pair, takes the periodic anchor
    orbits over the constant bit strings, extracts the recurrent product
    pair (exact, both anchors are periodic), and runs the block pipeline
    at that pair.  The result carries the measured distances to (x, y).
    """
    epsilon = Fraction(epsilon)
    factor = factor_construct(spec, x, y, epsilon)
    p = factor.anchor_orbit(0)
    q = factor.anchor_orbit(1)
    lcm = len(p.cycle) * len(q.cycle) // math.gcd(len(p.cycle), len(q.cycle))
    lcm = max(lcm, 1)
    best = None
    for t in range(lcm):
        zc, wc = p.shift(t), q.shift(t)
        score = max(zc.distance(x), wc.distance(y))
        if best is None or score < best[0]:
            best = (score, t, zc, wc)
    _, _, z, w = best
    dzx, dwy = z.distance(x), w.distance(y)
    sep = z.distance(w)
    if sep == 0:
        raise SearchError("anchor orbits collapse to a single point")
    r = sep / 2
    bits_u = tuple(u) if u is not None else tuple([0] * n_max)
    bits_v = tuple(v) if v is not None else tuple((i % 2) for i in range(n_max))
    sched, cert = dc1_pipeline(spec, z, w, r, bits_u, bits_v, n_max=n_max)
    return NearbyDC1Result(z, w, (dzx, dwy), dzx <= epsilon and dwy <= epsilon,
                           factor, sched, cert)
