"""Directed graphs of allowed chain steps, and their cyclic structure.

A ChainGraph is the finite approximation everything else works on: vertices
are boxes of a cover (or abstract ids), an edge u -> v means "one chain step
from box u can land in box v within the recorded tolerance".  This module
computes the recurrent part of such a graph and its decomposition into
periodic components:

(D1)  the classes partition the chain-recurrent vertex set;
(D2)  within a component, every edge advances the class index by one
      (cyclically), and every class is covered by its predecessor class;
(D3)  for vertices u, v in a common class there is a threshold N such that
      paths u -> v of length (period * n) exist for every n >= N.

The component period is the gcd of level defects over intra-component edges
of a BFS leveling, which equals the gcd of all cycle lengths through the
component.  (D3) thresholds are certified exactly: the exact-length
reachability sets of a strongly connected component, sampled every `period`
steps, stabilize at the full class, so the least N is read off the
stabilization prefix rather than guessed from a finite window.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .errors import InputError, SearchError

Edge = Tuple[int, int]


class ChainGraph:
    """Immutable directed graph with per-vertex geometry and a vertex metric."""

    __slots__ = ("delta", "labels", "adj", "radj", "centers", "diam", "kind",
                 "system", "_dist", "_scc_cache")

    def __init__(self, adj: Sequence[Iterable[int]], delta: Fraction = Fraction(0),
                 labels: Optional[Sequence] = None, centers: Optional[Sequence] = None,
                 dist: Optional[Callable[[int, int], Fraction]] = None,
                 diam: Fraction = Fraction(0), kind: str = "abstract", system=None):
        self.adj = tuple(tuple(sorted(set(out))) for out in adj)
        n = len(self.adj)
        for out in self.adj:
            for v in out:
                if not 0 <= v < n:
                    raise InputError(f"edge target {v} out of range")
        radj = [[] for _ in range(n)]
        for u, out in enumerate(self.adj):
            for v in out:
                radj[v].append(u)
        self.radj = tuple(tuple(sorted(r)) for r in radj)
        self.delta = Fraction(delta)
        self.labels = tuple(labels) if labels is not None else tuple(range(n))
        self.centers = tuple(centers) if centers is not None else None
        self.diam = Fraction(diam)
        self.kind = kind
        self.system = system
        self._dist = dist
        self._scc_cache = None

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Edge], **kw) -> "ChainGraph":
        adj = [[] for _ in range(n)]
        for u, v in edges:
            adj[u].append(v)
        return cls(adj, **kw)

    # -- basic queries -------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.adj)

    def out(self, u: int) -> Tuple[int, ...]:
        self._check_vertex(u)
        return self.adj[u]

    def has_edge(self, u: int, v: int) -> bool:
        self._check_vertex(u)
        self._check_vertex(v)
        return v in self.adj[u]

    def edges(self) -> List[Edge]:
        return [(u, v) for u, out in enumerate(self.adj) for v in out]

    def _check_vertex(self, u: int) -> None:
        import operator

        try:
            u = operator.index(u)
        except TypeError:
            raise InputError(f"unknown vertex {u!r}") from None
        if not 0 <= u < self.n:
            raise InputError(f"unknown vertex {u!r}")

    def dist(self, u: int, v: int) -> Fraction:
        """Nominal distance between vertices (box centers, or exact word distance)."""
        self._check_vertex(u)
        self._check_vertex(v)
        if self._dist is not None:
            return self._dist(u, v)
        return Fraction(0) if u == v else Fraction(1)

    def separation(self, u: int, v: int) -> Fraction:
        """Certified lower bound on d(x, y) over all x in box u, y in box v."""
        d = self.dist(u, v) - self.diam
        return d if d > 0 else Fraction(0)

    # -- strongly connected components ----------------------------------------

    def sccs(self) -> List[List[int]]:
        """Strongly connected components (iterative Tarjan), cached."""
        if self._scc_cache is not None:
            return self._scc_cache
        n = self.n
        index = [-1] * n
        low = [0] * n
        on_stack = [False] * n
        stack: List[int] = []
        comps: List[List[int]] = []
        counter = 0
        for root in range(n):
            if index[root] != -1:
                continue
            work = [(root, 0)]
            while work:
                u, pi = work[-1]
                if pi == 0:
                    index[u] = low[u] = counter
                    counter += 1
                    stack.append(u)
                    on_stack[u] = True
                advanced = False
                out = self.adj[u]
                while pi < len(out):
                    w = out[pi]
                    pi += 1
                    if index[w] == -1:
                        work[-1] = (u, pi)
                        work.append((w, 0))
                        advanced = True
                        break
                    if on_stack[w]:
                        low[u] = min(low[u], index[w])
                if advanced:
                    continue
                work.pop()
                if low[u] == index[u]:
                    comp = []
                    while True:
                        w = stack.pop()
                        on_stack[w] = False
                        comp.append(w)
                        if w == u:
                            break
                    comps.append(sorted(comp))
                if work:
                    parent = work[-1][0]
                    low[parent] = min(low[parent], low[u])
        comps.sort(key=lambda c: c[0])
        self._scc_cache = comps
        return comps

    # -- export ----------------------------------------------------------------

    def to_dot(self) -> str:
        lines = ["digraph chaingraph {"]
        for u in range(self.n):
            lines.append(f'  {u} [label="{self.labels[u]}"];')
        for u, v in self.edges():
            lines.append(f"  {u} -> {v};")
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        payload = {
            "kind": self.kind,
            "delta": str(self.delta),
            "diam": str(self.diam),
            "vertices": [
                {"id": u, "label": _label_json(self.labels[u]),
                 "center": str(self.centers[u]) if self.centers else None}
                for u in range(self.n)
            ],
            "edges": self.edges(),
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _label_json(label):
    if isinstance(label, tuple):
        return "".join(str(s) for s in label)
    return str(label)


# -- chains and cycles ----------------------------------------------------------


def verify_chain(g: ChainGraph, seq: Sequence[int], closed: bool = False) -> bool:
    """True iff consecutive entries are edges (and first == last when closed)."""
    if len(seq) < 2:
        raise InputError("a chain needs at least two entries")
    for u in seq:
        g._check_vertex(u)
    if closed and seq[0] != seq[-1]:
        return False
    return all(v in g.adj[u] for u, v in zip(seq, seq[1:]))


def chain_recurrent_set(g: ChainGraph) -> FrozenSet[int]:
    """Vertices lying on at least one cycle."""
    cr: set = set()
    for comp in g.sccs():
        if len(comp) > 1 or comp[0] in g.adj[comp[0]]:
            cr.update(comp)
    return frozenset(cr)


# -- cyclic decomposition ---------------------------------------------------------


@dataclass(frozen=True)
class Component:
    id: int
    period: int
    classes: Tuple[FrozenSet[int], ...]

    @property
    def vertices(self) -> FrozenSet[int]:
        return frozenset().union(*self.classes)


@dataclass(frozen=True)
class CyclicDecomposition:
    graph: ChainGraph
    components: Tuple[Component, ...]
    vertex_class: Dict[int, Tuple[int, int]] = field(hash=False, default_factory=dict)

    def component_of(self, v: int) -> Optional[int]:
        pair = self.vertex_class.get(v)
        return pair[0] if pair is not None else None

    def class_of(self, v: int) -> Optional[Tuple[int, int]]:
        return self.vertex_class.get(v)

    @property
    def recurrent(self) -> FrozenSet[int]:
        return frozenset(self.vertex_class)

    def to_json(self) -> str:
        payload = {
            "components": [
                {"id": c.id, "period": c.period,
                 "classes": [sorted(cl) for cl in c.classes]}
                for c in self.components
            ]
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def cyclic_decomposition(g: ChainGraph) -> CyclicDecomposition:
    """Recurrent components with periods and cyclically permuted classes."""
    cr = chain_recurrent_set(g)
    comps = [c for c in g.sccs() if set(c) <= cr and (len(c) > 1 or c[0] in g.adj[c[0]])]
    comps.sort(key=lambda c: c[0])
    components: List[Component] = []
    vertex_class: Dict[int, Tuple[int, int]] = {}
    for cid, comp in enumerate(comps):
        members = set(comp)
        root = comp[0]
        level = {root: 0}
        queue = deque([root])
        intra: List[Edge] = []
        while queue:
            u = queue.popleft()
            for v in g.adj[u]:
                if v not in members:
                    continue
                intra.append((u, v))
                if v not in level:
                    level[v] = level[u] + 1
                    queue.append(v)
        m = 0
        for u, v in intra:
            m = gcd(m, level[u] + 1 - level[v])
        m = abs(m)
        if m == 0:
            raise SearchError("recurrent component has no cycle; this cannot happen")
        classes = [set() for _ in range(m)]
        for v in comp:
            classes[level[v] % m].add(v)
        component = Component(cid, m, tuple(frozenset(c) for c in classes))
        components.append(component)
        for j, cl in enumerate(component.classes):
            for v in cl:
                vertex_class[v] = (cid, j)
    return CyclicDecomposition(g, tuple(components), vertex_class)


# -- exact-length paths -------------------------------------------------------------


def find_chain(g: ChainGraph, u: int, v: int, length: int,
               within: Optional[FrozenSet[int]] = None) -> Optional[List[int]]:
    """A path u -> v of exactly `length` edges, or None.

    Layered reachability: layer t holds the vertices reachable from u in
    exactly t steps; the path is lifted back from v choosing the smallest
    predecessor at each layer, which makes the result deterministic.
    """
    if length < 1:
        raise InputError("chain length must be >= 1")
    if length > 1_000_000:
        raise InputError("chain length beyond supported bound")
    g._check_vertex(u)
    g._check_vertex(v)
    allowed = within if within is not None else None
    if allowed is not None and (u not in allowed or v not in allowed):
        return None
    layers: List[set] = [{u}]
    for _ in range(length):
        nxt = set()
        for w in layers[-1]:
            for x in g.adj[w]:
                if allowed is None or x in allowed:
                    nxt.add(x)
        if not nxt:
            return None
        layers.append(nxt)
    if v not in layers[length]:
        return None
    path = [v]
    cur = v
    for t in range(length - 1, -1, -1):
        cur = min(w for w in layers[t] if cur in g.adj[w])
        path.append(cur)
    path.reverse()
    return path


def exact_reach_profile(g: ChainGraph, source: int, component: Component,
                        max_steps: Optional[int] = None) -> List[FrozenSet[int]]:
    """Reachability sets from `source` in exactly (period * n) steps, n = 1, 2, ...

    Iterates inside the component until the set equals the full class of the
    source, which is a fixed point of the period-step map on a strongly
    connected component.  Returns the sets up to and including the first
    full-class one.
    """
    members = component.vertices
    m = component.period
    sz = max(len(cl) for cl in component.classes)
    limit = max_steps if max_steps is not None else (sz - 1) * (sz - 1) + sz + 2
    # class of the source, used as the stabilization target
    target = None
    for cl in component.classes:
        if source in cl:
            target = cl
            break
    if target is None:
        raise InputError("source not in component")
    cur = {source}
    profile: List[FrozenSet[int]] = []
    for _ in range(limit):
        for _ in range(m):
            nxt = set()
            for w in cur:
                for x in g.adj[w]:
                    if x in members:
                        nxt.add(x)
            cur = nxt
        profile.append(frozenset(cur))
        if cur == set(target):
            return profile
    raise SearchError("exact-length reachability failed to stabilize; "
                      "component is not strongly connected")


def reachability_threshold(g: ChainGraph, dec: CyclicDecomposition,
                           component_id: int) -> Dict[Tuple[int, int], int]:
    """Least N per same-class pair (u, v) with period-multiple paths for all n >= N."""
    comps = [c for c in dec.components if c.id == component_id]
    if not comps:
        raise InputError(f"no component with id {component_id}")
    comp = comps[0]
    table: Dict[Tuple[int, int], int] = {}
    for cl in comp.classes:
        for u in sorted(cl):
            profile = exact_reach_profile(g, u, comp)
            for v in sorted(cl):
                last_missing = 0
                for n, reach in enumerate(profile, start=1):
                    if v not in reach:
                        last_missing = n
                table[(u, v)] = last_missing + 1
    return table
