"""Eventually periodic points of one-sided shift spaces.

A point is a finite head followed by a cycle repeated forever.  All
comparisons are exact: two eventually periodic sequences agree everywhere
iff they agree up to max(head lengths) + lcm(cycle lengths).  The metric
is d(x, y) = 2^(-i) where i is the first index at which x and y differ.

Heads may be plain tuples (small, canonicalized points) or numpy arrays
(long read-off sequences produced by the shadowing machinery).  Array
heads skip canonicalization; everything else works the same.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .errors import InputError, SFTError

Word = Tuple[int, ...]

#: distance scans on array-backed points stop here; beyond it the distance
#: is reported as the cap value 2^(-ARRAY_CAP)
ARRAY_CAP = 64


def _primitive(cycle: Word) -> Word:
    n = len(cycle)
    for p in range(1, n):
        if n % p == 0 and cycle[:p] * (n // p) == cycle:
            return cycle[:p]
    return cycle


class ShiftPoint:
    """One-sided infinite symbol sequence, eventually periodic."""

    __slots__ = ("head", "cycle")

    def __init__(self, head=(), cycle=(0,), normalize: bool = True):
        if not cycle:
            raise InputError("cycle part must be non-empty")
        cycle = tuple(int(s) for s in cycle)
        if isinstance(head, np.ndarray):
            self.head = head
            self.cycle = cycle
            return
        head = tuple(int(s) for s in head)
        if normalize:
            cycle = _primitive(cycle)
            # absorb a head suffix that already follows the cycle
            while head and head[-1] == cycle[-1]:
                cycle = (cycle[-1],) + cycle[:-1]
                head = head[:-1]
            cycle = _primitive(cycle)
        self.head = head
        self.cycle = cycle

    # -- basic accessors ---------------------------------------------------

    @property
    def head_len(self) -> int:
        return len(self.head)

    @property
    def array_backed(self) -> bool:
        return isinstance(self.head, np.ndarray)

    def symbol(self, i: int) -> int:
        h = len(self.head)
        if i < h:
            return int(self.head[i])
        return self.cycle[(i - h) % len(self.cycle)]

    def word(self, k: int, start: int = 0) -> Word:
        return tuple(self.symbol(start + j) for j in range(k))

    def symbols(self, count: int) -> np.ndarray:
        """Materialize the first `count` symbols as a uint8 array."""
        h = len(self.head)
        out = np.empty(count, dtype=np.uint8)
        take = min(count, h)
        if take:
            out[:take] = np.asarray(self.head[:take], dtype=np.uint8)
        if count > h:
            cyc = np.asarray(self.cycle, dtype=np.uint8)
            reps = -(-(count - h) // len(cyc))
            out[h:] = np.tile(cyc, reps)[: count - h]
        return out

    def shift(self, n: int = 1) -> "ShiftPoint":
        if n < 0:
            raise InputError("cannot shift backwards on a one-sided sequence")
        h = len(self.head)
        if n < h:
            return ShiftPoint(self.head[n:], self.cycle, normalize=not self.array_backed)
        r = (n - h) % len(self.cycle)
        return ShiftPoint((), self.cycle[r:] + self.cycle[:r])

    # -- comparisons and metric --------------------------------------------

    def _exact_bound(self, other: "ShiftPoint") -> int:
        p = len(self.cycle) * len(other.cycle) // gcd(len(self.cycle), len(other.cycle))
        return max(len(self.head), len(other.head)) + p

    def first_difference(self, other: "ShiftPoint", cap: Optional[int] = None) -> Optional[int]:
        """Index of the first disagreement, or None if equal.

        Exact for tuple-backed points.  Array-backed points are scanned up
        to `cap` (default ARRAY_CAP); agreement through the cap is reported
        as None, meaning "indistinguishable at this horizon".
        """
        if self.array_backed or other.array_backed:
            cap = ARRAY_CAP if cap is None else cap
            a = self.symbols(cap)
            b = other.symbols(cap)
            neq = a != b
            if not neq.any():
                return None
            return int(np.argmax(neq))
        bound = self._exact_bound(other)
        if cap is not None:
            bound = min(bound, cap)
        for i in range(bound):
            if self.symbol(i) != other.symbol(i):
                return i
        return None

    def distance(self, other: "ShiftPoint", cap: Optional[int] = None) -> Fraction:
        i = self.first_difference(other, cap=cap)
        if i is None:
            return Fraction(0)
        return Fraction(1, 2 ** i)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ShiftPoint):
            return NotImplemented
        if self.array_backed or other.array_backed:
            return self.first_difference(other) is None
        return self.head == other.head and self.cycle == other.cycle

    def __hash__(self) -> int:
        if self.array_backed:
            raise TypeError("array-backed points are not hashable")
        return hash((self.head, self.cycle))

    # -- admissibility -----------------------------------------------------

    def validate(self, adjacency: Sequence[Sequence[int]]) -> None:
        """Raise SFTError unless every consecutive symbol pair is allowed."""
        n = len(adjacency)
        if self.array_backed:
            h = np.asarray(self.head)
            if h.size and int(h.max()) >= n:
                raise SFTError("symbol out of alphabet range")
            adj = np.asarray(adjacency, dtype=np.uint8)
            if h.size >= 2 and not adj[h[:-1], h[1:]].all():
                bad = int(np.argmin(adj[h[:-1], h[1:]]))
                raise SFTError(f"forbidden transition at index {bad}")
            seam = list(h[-1:]) + list(self.cycle) + [self.cycle[0]]
        else:
            for s in self.head + self.cycle:
                if not 0 <= s < n:
                    raise SFTError("symbol out of alphabet range")
            for i in range(len(self.head) - 1):
                if not adjacency[self.head[i]][self.head[i + 1]]:
                    raise SFTError(f"forbidden transition at index {i}")
            seam = list(self.head[-1:]) + list(self.cycle) + [self.cycle[0]]
        for a, b in zip(seam, seam[1:]):
            if not adjacency[int(a)][int(b)]:
                raise SFTError(f"forbidden transition {a}->{b} in periodic tail")

    # -- parsing / formatting ----------------------------------------------

    @classmethod
    def parse(cls, text: str) -> "ShiftPoint":
        """Parse 'head|cycle' notation, e.g. '0|1' for 0111..., '|01' for 010101..."""
        if "|" not in text:
            raise InputError(f"symbol point must be written head|cycle, got {text!r}")
        head_s, cycle_s = text.split("|", 1)
        if not cycle_s:
            raise InputError("cycle part of a symbol point must be non-empty")
        try:
            head = tuple(int(c) for c in head_s)
            cycle = tuple(int(c) for c in cycle_s)
        except ValueError as exc:
            raise InputError(f"bad symbol point {text!r}") from exc
        return cls(head, cycle)

    def __repr__(self) -> str:
        if self.array_backed:
            return f"ShiftPoint(<{len(self.head)} symbols>|{''.join(map(str, self.cycle))})"
        head = "".join(map(str, self.head))
        cyc = "".join(map(str, self.cycle))
        return f"ShiftPoint({head}|{cyc})"


def word_distance(u: Word, v: Word) -> Fraction:
    """Exact distance between the cylinder sets of two equal-depth words.

    Distinct words force every pair of representatives to disagree first at
    the first word disagreement, so the value is exact, not an estimate.
    For equal words the infimum distance is 0.
    """
    if len(u) != len(v):
        raise InputError("words must have equal depth")
    for i, (a, b) in enumerate(zip(u, v)):
        if a != b:
            return Fraction(1, 2 ** i)
    return Fraction(0)


def point_word_distance(x: ShiftPoint, w: Word) -> Fraction:
    """Distance from a point to a cylinder set (0 if the point lies inside)."""
    for i, s in enumerate(w):
        if x.symbol(i) != s:
            return Fraction(1, 2 ** i)
    return Fraction(0)


def admissible_words(adjacency: Sequence[Sequence[int]], depth: int) -> list:
    """All admissible words of the given depth, lexicographically sorted."""
    n = len(adjacency)
    words = [(s,) for s in range(n)]
    for _ in range(depth - 1):
        words = [w + (t,) for w in words for t in range(n) if adjacency[w[-1]][t]]
    return words


def greedy_tail(adjacency: Sequence[Sequence[int]], start: int) -> Tuple[Word, Word]:
    """Deterministic admissible continuation from a symbol.

    Walks to the smallest allowed successor until a symbol repeats, then
    splits the walk into (pre-cycle symbols, cycle).  The walk excludes the
    start symbol itself.
    """
    n = len(adjacency)
    path = [start]
    seen = {start: 0}
    while True:
        succ = [t for t in range(n) if adjacency[path[-1]][t]]
        if not succ:
            raise SFTError(f"symbol {path[-1]} has no successor")
        t = min(succ)
        if t in seen:
            i = seen[t]
            if i == 0:
                return (), tuple(path[1:]) + (path[0],)
            return tuple(path[1:i]), tuple(path[i:])
        seen[t] = len(path)
        path.append(t)
