"""Exact tracking of word pseudo-orbits on shift spaces, and Birkhoff
tracking averages.

On a shift of finite type at word depth k, a pseudo-orbit whose consecutive
words overlap on k-1 symbols is tracked exactly by its read-off point (the
sequence of first symbols): the orbit of the read-off point sits inside the
cylinder of every entry, so the tracking distance is at most 2^(-k) at
every index.  This is a construction, not an estimate, which is why shift
systems are the only ones for which tracking certificates are issued; box
systems get diagnostic averages only.

Symbolic distances are computed exactly up to a horizon cap; beyond the cap
a distance is recorded as the cap value 2^(-cap).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .chaingraph import ChainGraph
from .errors import InputError, PreconditionError, SFTError
from .symbolic import ShiftPoint, greedy_tail, point_word_distance, word_distance
from .systems import SFT, SystemSpec, evaluate, metric

Word = Tuple[int, ...]


@dataclass
class PseudoOrbit:
    """A finite pseudo-orbit: word entries for shifts, points otherwise.

    `words` holds depth-k words (tuples) or an integer array of vertex ids
    into `graph.labels`; `points` holds explicit points.  Exactly one of the
    two is populated.
    """
    kind: str = "finite"
    words: Optional[Union[List[Word], np.ndarray]] = None
    graph: Optional[ChainGraph] = None
    points: Optional[List] = None

    def __len__(self) -> int:
        return len(self.words) if self.words is not None else len(self.points)

    def word_at(self, i: int) -> Word:
        if self.words is None:
            raise InputError("pseudo-orbit has no word entries")
        w = self.words[i]
        if isinstance(w, (int, np.integer)):
            return self.graph.labels[int(w)]
        return tuple(w)

    def word_ids(self) -> np.ndarray:
        """Entries as vertex ids of `graph` (building the index if needed)."""
        if isinstance(self.words, np.ndarray):
            return self.words
        index = {w: i for i, w in enumerate(self.graph.labels)}
        try:
            return np.array([index[tuple(w)] for w in self.words], dtype=np.int64)
        except KeyError as exc:
            raise SFTError(f"entry {exc.args[0]} is not an admissible word") from exc

    def defects(self, spec: SystemSpec, cap: int = 64) -> List[Fraction]:
        """d(f(x_i), x_{i+1}) per step; word entries use exact cylinder distances."""
        if self.points is not None:
            return [metric(spec, evaluate(spec, x), y, cap=cap)
                    for x, y in zip(self.points, self.points[1:])]
        from .systems import _sft_step_distance
        ws = [self.word_at(i) for i in range(len(self))]
        return [_sft_step_distance(spec, u, v) for u, v in zip(ws, ws[1:])]


def shadow_sft(po: PseudoOrbit, k: int) -> ShiftPoint:
    """Read-off point tracking a word pseudo-orbit within 2^(-k) everywhere.

    Precondition: consecutive entries overlap on k-1 symbols (equivalently,
    each step is an allowed word transition).  The point is extended past
    the final entry by the deterministic admissible continuation, so it is
    a concrete eventually periodic point of the shift.
    """
    if po.graph is None or po.graph.kind != SFT:
        raise InputError("shadowing requires a word pseudo-orbit over a shift graph")
    spec = po.graph.system
    adjacency = spec.adjacency
    n = len(po)
    if n == 0:
        raise InputError("empty pseudo-orbit")

    ids = po.word_ids()
    labels = po.graph.labels
    if len(labels[0]) != k:
        raise InputError(f"graph words have depth {len(labels[0])}, expected {k}")

    def step_error(i: int):
        a = labels[int(ids[i])][0]
        b = labels[int(ids[i + 1])][0]
        if not adjacency[a][b]:
            return SFTError(f"read-off contains forbidden word {a}{b} at step {i}")
        return PreconditionError(f"overlap violation at step {i}")

    if k >= 2:
        # overlap check: suffix of each word equals prefix of the next
        suffix = np.array([w[1:] for w in labels], dtype=np.uint8)
        prefix = np.array([w[:-1] for w in labels], dtype=np.uint8)
        if isinstance(ids, np.ndarray) and n > 1024:
            ok = (suffix[ids[:-1]] == prefix[ids[1:]]).all(axis=1)
            if not ok.all():
                raise step_error(int(np.argmin(ok)))
        else:
            for i in range(n - 1):
                if tuple(suffix[int(ids[i])]) != tuple(prefix[int(ids[i + 1])]):
                    raise step_error(i)
    else:
        # depth 1: the step itself must be an allowed symbol transition
        if isinstance(ids, np.ndarray) and n > 1024:
            first = np.array([w[0] for w in labels], dtype=np.int64)
            adj = np.array(adjacency, dtype=np.uint8)
            ok = adj[first[ids[:-1]], first[ids[1:]]]
            if not ok.all():
                raise step_error(int(np.argmin(ok)))
        else:
            for i in range(n - 1):
                a, b = labels[int(ids[i])][0], labels[int(ids[i + 1])][0]
                if not adjacency[a][b]:
                    raise step_error(i)

    first_symbol = np.array([w[0] for w in labels], dtype=np.uint8)
    last_word = labels[int(ids[-1])]
    if isinstance(ids, np.ndarray) and n > 1024:
        head = first_symbol[ids[:-1]] if n > 1 else np.array([], dtype=np.uint8)
        head = np.concatenate([head, np.array(last_word, dtype=np.uint8)])
    else:
        head_syms = [labels[int(ids[i])][0] for i in range(n - 1)]
        head = tuple(head_syms) + last_word
    ext_head, cycle = greedy_tail(adjacency, last_word[-1])
    if isinstance(head, np.ndarray):
        if ext_head:
            head = np.concatenate([head, np.array(ext_head, dtype=np.uint8)])
        y = ShiftPoint(head, cycle)
    else:
        y = ShiftPoint(head + ext_head, cycle)
    y.validate(adjacency)
    return y


def tracking_distances(spec: SystemSpec, y, po: PseudoOrbit, n: int,
                       cap: int = 64) -> List[Fraction]:
    """d(f^i(y), x_i) for i < n, exact (word entries measure cylinder membership)."""
    if n > len(po):
        raise InputError("horizon exceeds pseudo-orbit length")
    out: List[Fraction] = []
    if spec.kind == SFT and po.words is not None:
        for i in range(n):
            w = po.word_at(i)
            d = Fraction(0)
            for j, s in enumerate(w):
                if y.symbol(i + j) != s:
                    d = Fraction(1, 2 ** j)
                    break
            out.append(d)
        return out
    cur = y
    for i in range(n):
        target = po.points[i] if po.points is not None else po.word_at(i)
        if isinstance(target, tuple) and spec.kind == SFT:
            out.append(point_word_distance(cur, target))
        else:
            out.append(metric(spec, cur, target, cap=cap))
        cur = evaluate(spec, cur)
    return out


def tracking_average(spec: SystemSpec, y, po: PseudoOrbit, n: int,
                     cap: int = 64) -> List[Fraction]:
    """Running Birkhoff averages e_m = (1/m) sum_{i<m} d(f^i(y), x_i), m = 1..n."""
    ds = tracking_distances(spec, y, po, n, cap=cap)
    out = []
    total = Fraction(0)
    for m, d in enumerate(ds, start=1):
        total += d
        out.append(total / m)
    return out


def tracking_supremum_bound(g: ChainGraph, y: ShiftPoint, ids: np.ndarray,
                            pad_check: bool = True) -> Fraction:
    """Certified sup-distance bound of the orbit of y over the entry boxes.

    Verifies vectorized that the k-symbol window of y at every index equals
    the entry word there (membership in every cylinder), which bounds the
    distance to any representative of the entry box by the cylinder
    diameter 2^(-k).
    """
    labels = g.labels
    k = len(labels[0])
    n = len(ids)
    syms = y.symbols(n + k)
    word_cols = np.array(labels, dtype=np.uint8)  # shape (n_words, k)
    for j in range(k):
        if not (syms[j:j + n] == word_cols[ids, j]).all():
            raise PreconditionError("read-off point left a pseudo-orbit cylinder")
    return Fraction(1, 2 ** k)
