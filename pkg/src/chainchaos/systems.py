"""Exact system descriptions and their discretization into chain graphs.

Three kinds of systems are supported, all with exact rational arithmetic:

* piecewise-linear self-maps of [0, 1] (pieces given by breakpoints,
  slopes, intercepts; metric |x - y|),
* affine circle maps x -> a*x + b mod 1 with integer a (arc metric),
* shifts of finite type over a finite alphabet (adjacency matrix, word
  depth k; metric 2^(-first disagreement)).

Discretization covers the space with N half-open boxes (interval, circle)
or with the admissible depth-k words (SFT) and draws an edge u -> v exactly
when some point of box u maps within delta of box v.  Images of boxes are
computed piecewise-exactly, so the edge relation is sound and complete with
respect to that test, never sampled.

Piecewise maps whose one-sided values at a breakpoint differ by an exact
integer are accepted: such maps are continuous as circle maps (the jump is
a mod-1 wrap, as in the full-branch doubling map) and are standard test
subjects.  Any non-integer jump is rejected.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .chaingraph import ChainGraph
from .errors import DomainError, InputError, ValidationError
from .symbolic import ShiftPoint, admissible_words, word_distance

Point = Union[Fraction, ShiftPoint]

INTERVAL = "interval-pw-linear"
CIRCLE = "circle-affine"
SFT = "sft"


def parse_fraction(text) -> Fraction:
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse rational {text!r}") from exc


# -- rational intervals with endpoint openness --------------------------------


@dataclass(frozen=True)
class RatInterval:
    lo: Fraction
    hi: Fraction
    lo_open: bool = False
    hi_open: bool = False

    def is_empty(self) -> bool:
        if self.lo > self.hi:
            return True
        return self.lo == self.hi and (self.lo_open or self.hi_open)

    def expand(self, delta: Fraction) -> "RatInterval":
        return RatInterval(self.lo - delta, self.hi + delta, self.lo_open, self.hi_open)

    def intersect(self, other: "RatInterval") -> "RatInterval":
        if self.lo > other.lo or (self.lo == other.lo and self.lo_open):
            lo, lo_open = self.lo, self.lo_open
        else:
            lo, lo_open = other.lo, other.lo_open
        if self.hi < other.hi or (self.hi == other.hi and self.hi_open):
            hi, hi_open = self.hi, self.hi_open
        else:
            hi, hi_open = other.hi, other.hi_open
        return RatInterval(lo, hi, lo_open, hi_open)

    def shift(self, offset: Fraction) -> "RatInterval":
        return RatInterval(self.lo + offset, self.hi + offset, self.lo_open, self.hi_open)


def meets_within(image: RatInterval, box: RatInterval, delta: Fraction) -> bool:
    """True iff some x in `image` and y in `box` satisfy |x - y| <= delta."""
    return not image.intersect(box.expand(delta)).is_empty()


# -- system specification -------------------------------------------------------


@dataclass(frozen=True)
class Piece:
    lo: Fraction
    hi: Fraction
    slope: Fraction
    intercept: Fraction

    def value(self, x: Fraction) -> Fraction:
        return self.slope * x + self.intercept


@dataclass(frozen=True)
class SystemSpec:
    kind: str
    pieces: Tuple[Piece, ...] = ()
    a: int = 0
    b: Fraction = Fraction(0)
    adjacency: Tuple[Tuple[int, ...], ...] = ()
    depth: int = 0

    def __post_init__(self):
        if self.kind == INTERVAL:
            self._validate_interval()
        elif self.kind == CIRCLE:
            if self.a != int(self.a):
                raise ValidationError("circle map slope must be an integer")
        elif self.kind == SFT:
            self._validate_sft()
        else:
            raise ValidationError(f"unknown system kind {self.kind!r}")

    def _validate_interval(self):
        if not self.pieces:
            raise ValidationError("interval map needs at least one piece")
        if self.pieces[0].lo != 0 or self.pieces[-1].hi != 1:
            raise ValidationError("pieces must cover [0, 1]")
        for p, q in zip(self.pieces, self.pieces[1:]):
            if p.hi != q.lo:
                raise ValidationError("pieces must be contiguous with increasing breakpoints")
        for p in self.pieces:
            if p.lo >= p.hi:
                raise ValidationError("breakpoints must be strictly increasing")
            for endpoint in (p.value(p.lo), p.value(p.hi)):
                if not 0 <= endpoint <= 1:
                    raise ValidationError("map values leave [0, 1]")
        for p, q in zip(self.pieces, self.pieces[1:]):
            jump = p.value(p.hi) - q.value(q.lo)
            if jump.denominator != 1:
                raise ValidationError(
                    f"map is discontinuous at {p.hi} (jump {jump} is not a mod-1 wrap)")

    def _validate_sft(self):
        n = len(self.adjacency)
        if n < 1 or any(len(row) != n for row in self.adjacency):
            raise ValidationError("adjacency matrix must be square")
        for row in self.adjacency:
            if not any(row):
                raise ValidationError("dead symbol: adjacency row of zeros")
        for j in range(n):
            if not any(row[j] for row in self.adjacency):
                raise ValidationError("dead symbol: adjacency column of zeros")
        if self.depth < 1:
            raise ValidationError("word depth must be >= 1")

    @property
    def alphabet(self) -> int:
        return len(self.adjacency)

    @property
    def metric_name(self) -> str:
        return {INTERVAL: "absolute", CIRCLE: "arc", SFT: "dyadic-first-difference"}[self.kind]

    @property
    def space_diameter(self) -> Fraction:
        return {INTERVAL: Fraction(1), CIRCLE: Fraction(1, 2), SFT: Fraction(1)}[self.kind]


def interval_map(pieces: Sequence[Tuple]) -> SystemSpec:
    """Build an interval map from (lo, hi, slope, intercept) tuples."""
    ps = tuple(Piece(Fraction(lo), Fraction(hi), Fraction(s), Fraction(c))
               for lo, hi, s, c in pieces)
    return SystemSpec(kind=INTERVAL, pieces=ps)


def circle_map(a: int, b) -> SystemSpec:
    return SystemSpec(kind=CIRCLE, a=int(a), b=Fraction(b) % 1)


def sft(adjacency: Sequence[Sequence[int]], depth: int = 1) -> SystemSpec:
    adj = tuple(tuple(int(bool(x)) for x in row) for row in adjacency)
    return SystemSpec(kind=SFT, adjacency=adj, depth=int(depth))


def doubling_map() -> SystemSpec:
    return interval_map([(0, Fraction(1, 2), 2, 0), (Fraction(1, 2), 1, 2, -1)])


def identity_map() -> SystemSpec:
    return interval_map([(0, 1, 1, 0)])


def tent_map() -> SystemSpec:
    return interval_map([(0, Fraction(1, 2), 2, 0), (Fraction(1, 2), 1, -2, 2)])


def full_shift(symbols: int = 2, depth: int = 1) -> SystemSpec:
    return sft([[1] * symbols for _ in range(symbols)], depth)


def golden_mean_shift(depth: int = 2) -> SystemSpec:
    return sft([[1, 1], [1, 0]], depth)


# -- evaluation and metric ---------------------------------------------------------


def evaluate(spec: SystemSpec, x: Point) -> Point:
    """Apply the map once, exactly."""
    if spec.kind in (INTERVAL, CIRCLE) and isinstance(x, ShiftPoint):
        raise DomainError("numeric system applied to a symbol sequence")
    if spec.kind == INTERVAL:
        x = Fraction(x)
        if not 0 <= x <= 1:
            raise DomainError(f"{x} outside [0, 1]")
        for piece in spec.pieces:
            if piece.lo <= x < piece.hi:
                return piece.value(x)
        return spec.pieces[-1].value(x)  # x == 1
    if spec.kind == CIRCLE:
        x = Fraction(x)
        if not 0 <= x < 1:
            raise DomainError(f"{x} outside [0, 1)")
        return (spec.a * x + spec.b) % 1
    if spec.kind == SFT:
        if not isinstance(x, ShiftPoint):
            raise DomainError("shift systems act on symbol sequences")
        x.validate(spec.adjacency)
        return x.shift()
    raise ValidationError(spec.kind)


def orbit(spec: SystemSpec, x: Point, length: int) -> List[Point]:
    """The first `length` points x, f(x), ..., f^(length-1)(x)."""
    pts = [x]
    for _ in range(length - 1):
        pts.append(evaluate(spec, pts[-1]))
    return pts


def metric(spec: SystemSpec, x: Point, y: Point, cap: Optional[int] = None) -> Fraction:
    if spec.kind == INTERVAL:
        return abs(Fraction(x) - Fraction(y))
    if spec.kind == CIRCLE:
        d = abs(Fraction(x) - Fraction(y)) % 1
        return min(d, 1 - d)
    return x.distance(y, cap=cap)


# -- covers and discretization ------------------------------------------------------


@dataclass(frozen=True)
class BoxCover:
    """Ordered cover of the space by boxes with pairwise disjoint interiors."""
    kind: str
    boxes: Tuple  # RatInterval per box, or word tuple per box
    diam: Fraction

    @property
    def count(self) -> int:
        return len(self.boxes)


def box_cover(spec: SystemSpec, n: int) -> BoxCover:
    if spec.kind in (INTERVAL, CIRCLE):
        if n < 2:
            raise InputError("need at least 2 boxes")
        closed_top = spec.kind == INTERVAL
        boxes = []
        for i in range(n):
            lo, hi = Fraction(i, n), Fraction(i + 1, n)
            last = i == n - 1
            boxes.append(RatInterval(lo, hi, False, not (closed_top and last)))
        return BoxCover(spec.kind, tuple(boxes), Fraction(1, n))
    words = admissible_words(spec.adjacency, n)
    return BoxCover(SFT, tuple(words), Fraction(1, 2 ** n))


def point_to_box(spec: SystemSpec, cover: BoxCover, x: Point) -> int:
    if spec.kind in (INTERVAL, CIRCLE):
        x = Fraction(x)
        if spec.kind == CIRCLE:
            x = x % 1
        elif not 0 <= x <= 1:
            raise DomainError(f"{x} outside [0, 1]")
        n = cover.count
        return min(int(x * n), n - 1)
    if not isinstance(x, ShiftPoint):
        raise DomainError("shift systems act on symbol sequences")
    w = x.word(len(cover.boxes[0]))
    try:
        return cover.boxes.index(w)
    except ValueError:
        raise InputError(f"point prefix {w} maps to no box") from None


def _piece_images(spec: SystemSpec, box: RatInterval) -> List[RatInterval]:
    """Exact image of a box under the map, one interval per overlapping piece."""
    images = []
    for piece in spec.pieces:
        dom = RatInterval(piece.lo, piece.hi, False, piece is not spec.pieces[-1])
        seg = dom.intersect(box)
        if seg.is_empty():
            continue
        a, b = piece.value(seg.lo), piece.value(seg.hi)
        if piece.slope >= 0:
            images.append(RatInterval(a, b, seg.lo_open, seg.hi_open))
        else:
            images.append(RatInterval(b, a, seg.hi_open, seg.lo_open))
    return images


def _circle_image(spec: SystemSpec, box: RatInterval) -> Optional[RatInterval]:
    """Image arc lifted to the line with its start in [0, 1); None means everything."""
    a, b = spec.a, spec.b
    length = abs(a) * (box.hi - box.lo)
    if length >= 1:
        return None
    lo_v = a * box.lo + b
    hi_v = a * box.hi + b
    if a >= 0:
        img = RatInterval(lo_v, hi_v, box.lo_open, box.hi_open)
    else:
        img = RatInterval(hi_v, lo_v, box.hi_open, box.lo_open)
    shift = -(img.lo // 1)
    return img.shift(shift) if shift else img


def _circle_meets(image: RatInterval, box: RatInterval, delta: Fraction) -> bool:
    if delta >= Fraction(1, 2):
        return True
    return any(meets_within(image, box.shift(Fraction(k)), delta) for k in range(-3, 4))


def _sft_step_distance(spec: SystemSpec, u: Tuple[int, ...], v: Tuple[int, ...]) -> Fraction:
    """Exact distance between the shifted cylinder of word u and the cylinder of v."""
    best = None
    tail = u[1:]
    for s in range(spec.alphabet):
        if not spec.adjacency[u[-1]][s]:
            continue
        d = word_distance(tail + (s,), v)
        if best is None or d < best:
            best = d
        if best == 0:
            break
    return best if best is not None else Fraction(1)


def discretize(spec: SystemSpec, n: int, delta: Fraction = None) -> ChainGraph:
    """Chain graph over a box cover: edge u -> v iff the image of box u comes
    within delta of box v.

    For interval and circle maps `n` is the box count; for SFTs it is the
    word depth and delta defaults to 2^(-n) (smaller values are rejected,
    the cylinder structure cannot resolve below its own diameter).
    """
    if spec.kind == SFT:
        min_delta = Fraction(1, 2 ** n)
        delta = min_delta if delta is None else Fraction(delta)
        if delta < min_delta:
            raise ValidationError(
                f"delta {delta} below cylinder diameter 2^-{n} at depth {n}")
        cover = box_cover(spec, n)
        words = cover.boxes
        adj = []
        for u in words:
            adj.append([j for j, v in enumerate(words)
                        if _sft_step_distance(spec, u, v) <= delta])
        dist_cache: Dict[Tuple[int, int], Fraction] = {}

        def dist(i: int, j: int) -> Fraction:
            key = (i, j) if i <= j else (j, i)
            if key not in dist_cache:
                dist_cache[key] = word_distance(words[key[0]], words[key[1]])
            return dist_cache[key]

        return ChainGraph(adj, delta=delta, labels=words, dist=dist,
                          diam=Fraction(0), kind=SFT, system=spec)

    if delta is None:
        raise InputError("delta is required for interval and circle systems")
    delta = Fraction(delta)
    if delta < 0:
        raise InputError("delta must be >= 0")
    cover = box_cover(spec, n)
    boxes = cover.boxes
    centers = [(b.lo + b.hi) / 2 for b in boxes]
    if spec.kind == INTERVAL:
        images = [_piece_images(spec, b) for b in boxes]
        adj = [[j for j, bj in enumerate(boxes)
                if any(meets_within(img, bj, delta) for img in imgs)]
               for imgs in images]

        def dist(i: int, j: int) -> Fraction:
            return abs(centers[i] - centers[j])

    else:
        images = [_circle_image(spec, b) for b in boxes]
        adj = [[j for j, bj in enumerate(boxes)
                if img is None or _circle_meets(img, bj, delta)]
               for img in images]

        def dist(i: int, j: int) -> Fraction:
            d = abs(centers[i] - centers[j]) % 1
            return min(d, 1 - d)

    labels = [(b.lo, b.hi) for b in boxes]
    return ChainGraph(adj, delta=delta, labels=labels, centers=centers,
                      dist=dist, diam=cover.diam, kind=spec.kind, system=spec)


# -- configuration files --------------------------------------------------------------


def parse_system_config(text: str) -> SystemSpec:
    """Build a SystemSpec from TOML configuration text."""
    import tomli

    try:
        data = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise InputError(f"bad system config: {exc}") from exc
    kind = data.get("kind")
    if kind == INTERVAL:
        pieces = data.get("piece") or data.get("pieces")
        if not pieces:
            raise InputError("interval map config needs [[piece]] tables")
        return interval_map([(parse_fraction(p["from"]), parse_fraction(p["to"]),
                              parse_fraction(p["slope"]), parse_fraction(p["intercept"]))
                             for p in pieces])
    if kind == CIRCLE:
        return circle_map(int(data["a"]), parse_fraction(data["b"]))
    if kind == SFT:
        return sft(data["adjacency"], int(data.get("depth", 1)))
    raise InputError(f"unknown system kind {kind!r}")


def load_system(path) -> SystemSpec:
    from pathlib import Path

    return parse_system_config(Path(path).read_text())


def parse_point(spec: SystemSpec, text: str) -> Point:
    if spec.kind == SFT:
        return ShiftPoint.parse(text)
    x = parse_fraction(text)
    return x % 1 if spec.kind == CIRCLE else x
