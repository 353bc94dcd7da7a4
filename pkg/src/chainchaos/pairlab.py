"""Finite-horizon pair classification and recovery of separated recurrent
pairs from chaotic-pair evidence.

Proximal, distal, and Li-Yorke are infinite-time notions; this module only
ever reports evidence labels against explicit thresholds at an explicit
horizon.  From a pair with Li-Yorke evidence it extracts a recurrent
product pair along times deep inside long separation runs (the separation
times of such a pair form a set with arbitrarily long runs, and revisits of
those runs are the recurrence being exploited), snaps the visited pattern
to its periodic core when one exists, and re-verifies the resulting pair:
separated cycle witness plus relation verdicts.  Distal pairs skip the run
selection and use their own product recurrence directly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .chaingraph import cyclic_decomposition
from .dc1 import GAP_CAP, DC1Schedule, GridSpec, _gap_array
from .errors import InputError, PreconditionError
from .pstar import SeparationWitness, separated_cycles
from .relation import RelationVerdict, related_at, relate_schedule
from .symbolic import ShiftPoint
from .systems import (SFT, SystemSpec, box_cover, discretize, evaluate,
                      metric, point_to_box)

DEFAULT_LOW = Fraction(1, 256)
DEFAULT_HIGH = Fraction(1, 4)

PROXIMAL = "proximal-evidence"
DISTAL = "distal-evidence"
LIYORKE = "LiYorke-evidence"


@dataclass(frozen=True)
class PairClass:
    horizon: int
    low: Fraction
    high: Fraction
    min_distance: Fraction       # over [0, H)
    tail_min: Fraction           # over [H/2, H), a liminf proxy
    tail_max: Fraction           # over [H/2, H), a limsup proxy
    labels: frozenset

    def to_json(self) -> str:
        return json.dumps({
            "horizon": self.horizon,
            "low": str(self.low), "high": str(self.high),
            "min_distance": str(self.min_distance),
            "tail_min": str(self.tail_min),
            "tail_max": str(self.tail_max),
            "labels": sorted(self.labels),
        }, indent=2, sort_keys=True) + "\n"


def _labels(min_d: Fraction, tail_max: Fraction, low: Fraction, high: Fraction) -> frozenset:
    labels = set()
    if min_d < low:
        labels.add(PROXIMAL)
        if tail_max > high:
            labels.add(LIYORKE)
    elif min_d > low:
        labels.add(DISTAL)
    return frozenset(labels)


def classify_pair(spec: SystemSpec, x, y, horizon: int,
                  low: Fraction = DEFAULT_LOW,
                  high: Fraction = DEFAULT_HIGH) -> PairClass:
    """Evidence labels for a pair from its orbit-distance extremes.

    Shift pairs are handled on symbol arrays (distances below the gap cap
    are counted as the cap value, which only strengthens the proximal
    verdict since the cap is far below any sensible threshold).
    """
    if horizon < 2:
        raise InputError("horizon must be >= 2")
    low, high = Fraction(low), Fraction(high)
    half = horizon // 2
    if spec.kind == SFT:
        pad = GAP_CAP + 1
        g = _gap_array(x.symbols(horizon + pad), y.symbols(horizon + pad),
                       horizon, GAP_CAP)
        min_d = Fraction(1, 2 ** int(g.max()))
        tail = g[half:]
        tail_min = Fraction(1, 2 ** int(tail.max()))
        tail_max = Fraction(1, 2 ** int(tail.min()))
    else:
        if horizon > 200_000:
            raise InputError("pointwise classification beyond 200000 steps")
        ds: List[Fraction] = []
        a, b = x, y
        for _ in range(horizon):
            ds.append(metric(spec, a, b))
            a, b = evaluate(spec, a), evaluate(spec, b)
        min_d = min(ds)
        tail = ds[half:]
        tail_min, tail_max = min(tail), max(tail)
    return PairClass(horizon, low, high, min_d, tail_min, tail_max,
                     _labels(min_d, tail_max, low, high))


# -- thick sets -------------------------------------------------------------------


@dataclass(frozen=True)
class ThickProfile:
    horizon: int
    max_run: int

    def has_run(self, n: int) -> bool:
        return self.max_run >= n

    def levels(self, upto: int) -> List[bool]:
        if upto > 1_000_000:
            raise InputError("level list too long; query has_run instead")
        return [self.has_run(n) for n in range(1, upto + 1)]


def _runs(bits: np.ndarray) -> List[Tuple[int, int]]:
    """(start, length) of every maximal run of True."""
    b = np.asarray(bits, dtype=bool)
    if b.size == 0:
        return []
    edges = np.diff(b.astype(np.int8))
    starts = list(np.flatnonzero(edges == 1) + 1)
    ends = list(np.flatnonzero(edges == -1) + 1)
    if b[0]:
        starts = [0] + starts
    if b[-1]:
        ends = ends + [b.size]
    return [(s, e - s) for s, e in zip(starts, ends)]


def thick_profile(bits, horizon: Optional[int] = None) -> ThickProfile:
    """Longest run of consecutive True values, as a thickness profile."""
    b = np.asarray(bits, dtype=bool)
    horizon = horizon if horizon is not None else b.size
    if b.size < horizon:
        raise InputError("bit sequence shorter than the horizon")
    runs = _runs(b[:horizon])
    return ThickProfile(horizon, max((ln for _, ln in runs), default=0))


def separation_bits(spec: SystemSpec, x, y, horizon: int, threshold) -> np.ndarray:
    """Indicator of d(f^i x, f^i y) > threshold for i < horizon."""
    threshold = Fraction(threshold)
    if spec.kind == SFT:
        pad = GAP_CAP + 1
        g = _gap_array(x.symbols(horizon + pad), y.symbols(horizon + pad),
                       horizon, GAP_CAP)
        g_max = -1
        while g_max + 1 <= GAP_CAP and Fraction(1, 2 ** (g_max + 1)) > threshold:
            g_max += 1
        return g <= g_max if g_max >= 0 else np.zeros(horizon, dtype=bool)
    if horizon > 200_000:
        raise InputError("pointwise separation bits beyond 200000 steps")
    out = np.zeros(horizon, dtype=bool)
    a, b = x, y
    for i in range(horizon):
        out[i] = metric(spec, a, b) > threshold
        a, b = evaluate(spec, a), evaluate(spec, b)
    return out


# -- recurrent product pairs --------------------------------------------------------


def _snap_periodic(point: ShiftPoint, depth: int, adjacency,
                   max_period: int = 32) -> Optional[ShiftPoint]:
    """Smallest-period periodic point matching the first `depth` symbols."""
    depth = max(2, depth)
    prefix = [point.symbol(i) for i in range(depth)]
    for p in range(1, min(depth // 2, max_period) + 1):
        if all(prefix[i] == prefix[i % p] for i in range(depth)):
            cand = ShiftPoint((), tuple(prefix[:p]))
            try:
                cand.validate(adjacency)
            except Exception:
                return None
            return cand
    return None


def _exact_product_cycle(spec: SystemSpec, x, y, horizon: int) -> Optional[List[Tuple]]:
    """States of the product orbit cycle when an exact repeat occurs."""
    def key(p):
        if isinstance(p, ShiftPoint):
            return None if p.array_backed else (p.head, p.cycle)
        return p

    seen: Dict[tuple, int] = {}
    states = []
    a, b = x, y
    for t in range(horizon):
        k = (key(a), key(b))
        if None in k:
            return None
        if k in seen:
            return states[seen[k]:]
        seen[k] = t
        states.append((a, b))
        a, b = evaluate(spec, a), evaluate(spec, b)
    return None


# -- extraction pipeline ---------------------------------------------------------------


@dataclass(frozen=True)
class ExtractionResult:
    z: object
    w: object
    classification: PairClass
    thick: Optional[ThickProfile]
    witness: Optional[SeparationWitness]
    related: Optional[bool]
    inconclusive: bool
    reason: Optional[str]


def _candidate_pair(spec: SystemSpec, x, y, classification: PairClass,
                    horizon: int, delta0: Fraction):
    """Recurrent product pair: run midpoints for Li-Yorke pairs, the orbit's
    own exact cycle for distal ones.

    Returns (z, w, thick, reason-or-None, suggested_r); the suggestion is
    half the smallest separation along the recurrent cycle, which a witness
    search can hope to maintain."""
    if LIYORKE in classification.labels:
        bits = separation_bits(spec, x, y, horizon, delta0)
        runs = sorted(_runs(bits), key=lambda r: -r[1])
        thick = ThickProfile(horizon, runs[0][1] if runs else 0)
        if not runs:
            return None, None, thick, "no separation runs at the threshold", None
        chosen = runs[:2]
        times = sorted(s + (ln - 1) // 2 for s, ln in chosen)
        depth = max(4, min(ln for _, ln in chosen) // 2)
        if spec.kind == SFT:
            z0, w0 = x.shift(times[0]), y.shift(times[0])
            if len(times) > 1:
                dz = z0.first_difference(x.shift(times[1]), cap=depth)
                dw = w0.first_difference(y.shift(times[1]), cap=depth)
                depth = min(d for d in (dz, dw, depth) if d is not None)
            z = _snap_periodic(z0, depth, spec.adjacency)
            w = _snap_periodic(w0, depth, spec.adjacency)
            if z is None or w is None:
                return z0, w0, thick, "no periodic core at the recurrence depth", None
            return z, w, thick, None, z.distance(w) / 2
        cycle = _exact_product_cycle(spec, x, y, horizon)
        if cycle is None:
            return None, None, thick, "no exact product recurrence in the horizon", None
        best = max(cycle, key=lambda s: metric(spec, s[0], s[1]))
        low = min(metric(spec, a, b) for a, b in cycle)
        return best[0], best[1], thick, None, low / 2
    if DISTAL in classification.labels:
        cycle = _exact_product_cycle(spec, x, y, horizon)
        if cycle is None:
            return None, None, None, "no exact product recurrence in the horizon", None
        best = max(cycle, key=lambda s: metric(spec, s[0], s[1]))
        low = min(metric(spec, a, b) for a, b in cycle)
        return best[0], best[1], None, None, low / 2
    return None, None, None, "pair is proximal without separation evidence", None


def extract_pstar_pair(spec: SystemSpec, x, y,
                       sched: Optional[DC1Schedule] = None,
                       delta0=None, horizon: Optional[int] = None,
                       grid: Optional[GridSpec] = None,
                       r=None) -> ExtractionResult:
    """Separated recurrent pair recovered from a chaotic or distal pair,
    with its re-verified cycle witness and relation verdict.

    Precondition: the classification must show Li-Yorke or distal evidence
    (a proximal pair without separation carries nothing to extract).
    Missing recurrence within the horizon yields an inconclusive result,
    not an error.
    """
    if sched is not None:
        horizon = horizon if horizon is not None else sched.c(sched.n_max)
        delta0 = delta0 if delta0 is not None else sched.r / 3
    if horizon is None or delta0 is None:
        raise InputError("need a schedule or explicit horizon and threshold")
    delta0 = Fraction(delta0)
    classification = classify_pair(spec, x, y, horizon)
    if LIYORKE not in classification.labels and DISTAL not in classification.labels:
        raise PreconditionError(
            "extraction needs Li-Yorke or distal evidence; "
            f"got {sorted(classification.labels) or ['none']}")
    z, w, thick, reason, suggested_r = _candidate_pair(spec, x, y, classification,
                                                       horizon, delta0)
    if reason is not None:
        return ExtractionResult(z, w, classification, thick, None, None, True, reason)
    if grid is None:
        if spec.kind == SFT:
            grid = GridSpec(spec.depth, Fraction(1, 2 ** spec.depth))
        else:
            # box size fine enough to resolve the separation, exact-image edges
            grid = GridSpec(max(16, 2 * delta0.denominator), Fraction(0))
    g = discretize(spec, grid.boxes, grid.delta)
    cover = box_cover(spec, grid.boxes)
    bz, bw = point_to_box(spec, cover, z), point_to_box(spec, cover, w)
    sep = g.separation(bz, bw)
    if r is None:
        if sched is not None and sched.r < sep:
            r = sched.r
        elif suggested_r is not None:
            r = suggested_r
        else:
            r = sep / 2
    witness = separated_cycles(g, bz, bw, Fraction(r))
    dec = cyclic_decomposition(g)
    rel = related_at(dec, bz, bw)
    inconclusive = witness is None
    return ExtractionResult(z, w, classification, thick, witness, rel,
                            inconclusive,
                            "no separated cycle witness at the extracted pair"
                            if inconclusive else None)


@dataclass(frozen=True)
class RelationFromPair:
    z: object
    w: object
    verdict: Optional[RelationVerdict]
    inconclusive: bool
    reason: Optional[str]

    def to_json(self) -> str:
        return json.dumps({
            "z": str(self.z), "w": str(self.w),
            "inconclusive": self.inconclusive,
            "reason": self.reason,
            "verdict": None if self.verdict is None
            else json.loads(self.verdict.to_json()),
        }, indent=2, sort_keys=True) + "\n"


def liyorke_to_relation(spec: SystemSpec, x, y, schedule: Sequence[Fraction],
                        horizon: int, delta0=None) -> RelationFromPair:
    """Distinct recurrent pair from a Li-Yorke (or distal) pair, with
    relation verdicts across the resolution schedule.

    Never raises on weak input: a pair without usable recurrence (for
    instance an asymptotic pair, whose product orbit collapses onto the
    diagonal) comes back flagged inconclusive.
    """
    classification = classify_pair(spec, x, y, horizon)
    if delta0 is None:
        delta0 = classification.high
    if LIYORKE in classification.labels or DISTAL in classification.labels:
        z, w, _, reason, _r = _candidate_pair(spec, x, y, classification, horizon,
                                              Fraction(delta0))
        if reason is not None:
            return RelationFromPair(z, w, None, True, reason)
    else:
        cycle = _exact_product_cycle(spec, x, y, horizon)
        if cycle is None:
            return RelationFromPair(None, None, None, True,
                                    "no exact product recurrence in the horizon")
        best = max(cycle, key=lambda s: metric(spec, s[0], s[1]))
        z, w = best
    if metric(spec, z, w) == 0:
        return RelationFromPair(z, w, None, True,
                                "recurrent product pairs are all diagonal")
    verdict = relate_schedule(spec, z, w, schedule)
    return RelationFromPair(z, w, verdict, False, None)
