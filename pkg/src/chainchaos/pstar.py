"""Uniformly separated equal-length cycle pairs, and product-orbit recurrence.

The separation search runs on the product graph restricted to vertex pairs
whose certified separation exceeds the radius r: a cycle through (u, v) in
that restriction is exactly a pair of equal-length cycles through u and v
that stay more than r apart index by index.  Such a witness certifies that
the pair can never be pushed together along chain steps (a distal pair at
graph level).

The restriction uses certified separations (center distance minus the box
diameter for numeric systems, exact word distance for shifts), so a witness
survives discretization error.  Both the raw margin and the slack-adjusted
margin are reported.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .chaingraph import ChainGraph, verify_chain
from .errors import InputError
from .symbolic import ShiftPoint
from .systems import (SFT, SystemSpec, box_cover, evaluate, point_to_box)

Pair = Tuple[int, int]


@dataclass(frozen=True)
class SeparationWitness:
    radius: Fraction
    length: int
    cycle1: Tuple[int, ...]
    cycle2: Tuple[int, ...]
    separations: Tuple[Fraction, ...]          # certified lower bounds per index
    raw_margin: Fraction                       # min center distance - r
    adjusted_margin: Fraction                  # min certified separation - r

    def to_json(self) -> str:
        return json.dumps({
            "r": str(self.radius),
            "length": self.length,
            "cycle1": list(self.cycle1),
            "cycle2": list(self.cycle2),
            "separations": [str(s) for s in self.separations],
            "raw_margin": str(self.raw_margin),
            "adjusted_margin": str(self.adjusted_margin),
        }, indent=2, sort_keys=True) + "\n"


def _separated(g: ChainGraph, r: Fraction, a: int, b: int) -> bool:
    return g.separation(a, b) > r


def _product_successors(g: ChainGraph, r: Fraction, pair: Pair):
    a, b = pair
    for x in g.adj[a]:
        for y in g.adj[b]:
            if _separated(g, r, x, y):
                yield (x, y)


def separated_cycles(g: ChainGraph, u: int, v: int, r: Fraction) -> Optional[SeparationWitness]:
    """Shortest pair of equal-length cycles through u and v staying > r apart.

    Returns None when no such pair exists; in particular immediately when
    the endpoints themselves are within r.  The product graph is generated
    lazily, one neighborhood at a time.
    """
    r = Fraction(r)
    if r < 0:
        raise InputError("separation radius must be >= 0")
    g._check_vertex(u)
    g._check_vertex(v)
    start: Pair = (u, v)
    if not _separated(g, r, u, v):
        return None
    # BFS from the start pair; shortest cycle = shortest path back to start.
    parent: Dict[Pair, Optional[Pair]] = {start: None}
    queue = deque([start])
    closing: Optional[Pair] = None
    while queue and closing is None:
        cur = queue.popleft()
        for nxt in _product_successors(g, r, cur):
            if nxt == start:
                closing = cur
                break
            if nxt not in parent:
                parent[nxt] = cur
                queue.append(nxt)
    if closing is None:
        return None
    rev: List[Pair] = [start, closing]
    while parent[rev[-1]] is not None:
        rev.append(parent[rev[-1]])
    pairs = list(reversed(rev))
    cycle1 = tuple(p[0] for p in pairs)
    cycle2 = tuple(p[1] for p in pairs)
    seps = tuple(g.separation(a, b) for a, b in pairs)
    raw = min(g.dist(a, b) for a, b in pairs) - r
    adj = min(seps) - r
    assert verify_chain(g, cycle1, closed=True) and verify_chain(g, cycle2, closed=True)
    return SeparationWitness(r, len(pairs) - 1, cycle1, cycle2, seps, raw, adj)


def omega_product(spec: SystemSpec, u, v, horizon: int, grid: int) -> Set[Pair]:
    """Box pairs visited recurrently by the product orbit of (u, v).

    Exact when the product orbit repeats a state within the horizon (always
    the case for eventually periodic symbolic points and for rational
    orbits of integer-slope maps): the returned pairs are the boxes of the
    exact orbit cycle.  Otherwise falls back to the boxes of pairs revisited
    during the tail half of the horizon, which is a finite-time proxy.
    """
    if horizon < 1:
        raise InputError("horizon must be >= 1")
    cover = box_cover(spec, grid)

    def key(x):
        if isinstance(x, ShiftPoint):
            if x.array_backed:
                return None
            return (x.head, x.cycle)
        return x

    seen: Dict[tuple, int] = {}
    states = []
    x, y = u, v
    cycle_range = None
    for t in range(horizon):
        k = (key(x), key(y))
        if None not in k:
            if k in seen:
                cycle_range = (seen[k], t)
                break
            seen[k] = t
        states.append((x, y))
        x, y = evaluate(spec, x), evaluate(spec, y)
    if cycle_range is not None:
        lo, hi = cycle_range
        chosen = states[lo:hi]
    else:
        tail_start = horizon // 2
        counts: Dict[Pair, int] = {}
        boxed = []
        for (px, py) in states[tail_start:]:
            bp = (point_to_box(spec, cover, px), point_to_box(spec, cover, py))
            boxed.append(bp)
            counts[bp] = counts.get(bp, 0) + 1
        return {bp for bp, c in counts.items() if c >= 2}
    return {(point_to_box(spec, cover, px), point_to_box(spec, cover, py))
            for px, py in chosen}
