"""The chain relation on recurrent vertices, sampled over resolutions.

Two chain-recurrent vertices are related at a fixed resolution iff they lie
in the same class of the cyclic decomposition; that is the graph-level
characterization of "connected by equal-length chains in both directions at
all large multiples of a common period".  The true relation is a limit over
all resolutions, so verdicts here are always per-resolution facts plus the
conjunction over the sampled schedule, never a limit claim.

Relation verdicts over a schedule discretize at box size equal to the
sampled resolution with exact-image edges (tolerance 0): a chain step of
size delta is modeled by adjacency of delta-sized boxes.  Positive edge
tolerances on top of the box size would connect touching boxes under any
map, including the identity, and make every sampled verdict trivially true.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .chaingraph import (ChainGraph, CyclicDecomposition, cyclic_decomposition,
                         find_chain, reachability_threshold)
from .errors import InputError
from .systems import (SFT, SystemSpec, box_cover, discretize, point_to_box)


def related_at(dec: CyclicDecomposition, u: int, v: int) -> bool:
    """Same class of the decomposition; False (not an error) off the recurrent set."""
    cu = dec.class_of(u)
    cv = dec.class_of(v)
    if cu is None or cv is None:
        return False
    return cu == cv


@dataclass(frozen=True)
class ResolutionVerdict:
    resolution: Fraction
    boxes: int
    related: bool
    recurrent: Tuple[bool, bool]
    component: Optional[int]
    classes: Tuple[Optional[int], Optional[int]]


@dataclass(frozen=True)
class RelationVerdict:
    point_u: str
    point_v: str
    entries: Tuple[ResolutionVerdict, ...]

    @property
    def related_for_all_tested(self) -> bool:
        return all(e.related for e in self.entries)

    def to_json(self) -> str:
        payload = {
            "x": self.point_u,
            "y": self.point_v,
            "related_for_all_tested": self.related_for_all_tested,
            "entries": [
                {"resolution": str(e.resolution), "boxes": e.boxes,
                 "related": e.related,
                 "recurrent": list(e.recurrent),
                 "component": e.component,
                 "classes": list(e.classes)}
                for e in self.entries
            ],
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def schedule_grid(spec: SystemSpec, resolution: Fraction) -> Tuple[int, Fraction]:
    """Map a sampled resolution to (box count or depth, edge tolerance)."""
    if spec.kind == SFT:
        k = 0
        r = Fraction(1)
        while r > resolution:
            k += 1
            r = Fraction(1, 2 ** k)
        k = max(k, 1)
        return k, Fraction(1, 2 ** k)
    n = max(2, -(-resolution.denominator // resolution.numerator))
    return n, Fraction(0)


def relate_schedule(spec: SystemSpec, u, v, schedule: Sequence[Fraction]) -> RelationVerdict:
    """Per-resolution relation verdicts for two points, finest last."""
    if not schedule:
        raise InputError("schedule must be non-empty")
    res = [Fraction(d) for d in schedule]
    for a, b in zip(res, res[1:]):
        if not b < a:
            raise InputError("schedule resolutions must be strictly decreasing")
    entries: List[ResolutionVerdict] = []
    for delta in res:
        n, tol = schedule_grid(spec, delta)
        g = discretize(spec, n, tol)
        cover = box_cover(spec, n)
        bu = point_to_box(spec, cover, u)
        bv = point_to_box(spec, cover, v)
        dec = cyclic_decomposition(g)
        cu, cv = dec.class_of(bu), dec.class_of(bv)
        entries.append(ResolutionVerdict(
            resolution=delta, boxes=n,
            related=related_at(dec, bu, bv),
            recurrent=(cu is not None, cv is not None),
            component=cu[0] if cu is not None and cv is not None and cu[0] == cv[0] else None,
            classes=(cu[1] if cu else None, cv[1] if cv else None),
        ))
    return RelationVerdict(str(u), str(v), tuple(entries))


@dataclass(frozen=True)
class EntropyPairs:
    pairs: Tuple[Tuple[int, int], ...]
    shadowing_exact: bool
    caveat: Optional[str]

    def to_json(self) -> str:
        return json.dumps({
            "pairs": [list(p) for p in self.pairs],
            "shadowing_exact": self.shadowing_exact,
            "caveat": self.caveat,
        }, indent=2, sort_keys=True) + "\n"


def entropy_pairs(dec: CyclicDecomposition) -> EntropyPairs:
    """All ordered distinct related vertex pairs.

    The identification of these pairs with entropy pairs is valid when the
    system tracks its pseudo-orbits exactly; outside shift systems that
    hypothesis is unverified and the output carries a caveat instead of
    being refused (rotations are the standard related-but-zero-entropy
    example).
    """
    pairs = []
    for comp in dec.components:
        for cl in comp.classes:
            members = sorted(cl)
            for a in members:
                for b in members:
                    if a != b:
                        pairs.append((a, b))
    pairs.sort()
    g = dec.graph
    exact = g.kind == SFT
    caveat = None if exact else (
        "pseudo-orbit tracking is unverified for this system; "
        "related pairs need not be entropy pairs")
    return EntropyPairs(tuple(pairs), exact, caveat)


@dataclass(frozen=True)
class MutualChains:
    """Equal-length chains between every ordered combination of two vertices."""
    length: int
    chains: Dict[Tuple[int, int], List[int]]  # keyed by (endpoint index pair)


def mutual_chains(g: ChainGraph, u: int, v: int,
                  dec: Optional[CyclicDecomposition] = None,
                  max_multiple: Optional[int] = None) -> Optional[MutualChains]:
    """Find one common length a with chains u->u, u->v, v->u, v->v of length a.

    Feasible lengths are multiples of the component period, so the search
    scans a = period * n for n up to the certified reachability threshold
    of the four endpoint pairs (plus a small margin).  Returns None when the
    vertices are unrelated, since u->u forces a = 0 mod period while u->v
    forces a = class difference mod period.
    """
    dec = dec if dec is not None else cyclic_decomposition(g)
    cu, cv = dec.class_of(u), dec.class_of(v)
    if cu is None or cv is None or cu != cv:
        return None
    comp = dec.components[cu[0]]
    within = comp.vertices
    if max_multiple is None:
        thresholds = reachability_threshold(g, dec, comp.id)
        pairs = [(u, u), (u, v), (v, u), (v, v)]
        max_multiple = max(thresholds[p] for p in pairs) + 1
    m = comp.period
    for n in range(1, max_multiple + 1):
        a = m * n
        found = {}
        for s, t in ((u, u), (u, v), (v, u), (v, v)):
            chain = find_chain(g, s, t, a, within=within)
            if chain is None:
                break
            found[(s, t)] = chain
        else:
            return MutualChains(a, found)
    return None
