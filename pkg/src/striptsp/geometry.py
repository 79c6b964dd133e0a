"""Points, instances, tours and separator/tonicity primitives.

All solvers in this package operate on a ``StripInstance``: a finite set of
points inside the horizontal strip ``[0, delta] x R``, indexed left to right.
Tonicity of an edge set at a vertical separator line counts the edges whose
endpoints lie strictly on opposite sides of the line.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Iterable, Sequence


class StripError(Exception):
    """Base class for errors raised by this package."""


class SizeError(StripError):
    """An input exceeds the size limits of an exact solver."""


class DegenerateSeparatorError(StripError):
    """A separator line passes through a point, or separates nothing."""


@dataclass(frozen=True, order=True)
class Point:
    x: float
    y: float


@dataclass(frozen=True)
class Edge:
    """An undirected edge between two point indices."""

    a: int
    b: int

    def __post_init__(self) -> None:
        if self.a == self.b:
            raise ValueError(f"degenerate edge ({self.a}, {self.b})")

    def key(self) -> tuple[int, int]:
        return (self.a, self.b) if self.a < self.b else (self.b, self.a)


class StripInstance:
    """Points in the strip [0, delta], indexed by increasing x.

    ``points`` must already be sorted by x (ties broken by y); use
    :meth:`from_points` to sort arbitrary input.
    """

    __slots__ = ("points", "delta")

    def __init__(self, points: Sequence[Point], delta: float):
        if delta <= 0:
            raise ValueError(f"strip height must be positive, got {delta}")
        pts = tuple(points)
        for p, q in zip(pts, pts[1:]):
            if (p.x, p.y) > (q.x, q.y):
                raise ValueError("points must be sorted by (x, y)")
        for p in pts:
            if not (0.0 <= p.y <= delta):
                raise ValueError(f"point {p} outside strip of height {delta}")
        self.points = pts
        self.delta = float(delta)

    @classmethod
    def from_points(cls, points: Iterable[Point], delta: float) -> "StripInstance":
        return cls(sorted(points, key=lambda p: (p.x, p.y)), delta)

    def __len__(self) -> int:
        return len(self.points)

    def __getitem__(self, i: int) -> Point:
        return self.points[i]

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, StripInstance)
            and self.delta == other.delta
            and self.points == other.points
        )

    def __hash__(self) -> int:
        return hash((self.delta, self.points))

    def __repr__(self) -> str:
        return f"StripInstance(n={len(self.points)}, delta={self.delta})"

    def has_distinct_x(self) -> bool:
        return all(p.x < q.x for p, q in zip(self.points, self.points[1:]))

    def digest(self) -> str:
        """Stable content hash of the instance."""
        return hashlib.sha256(format_instance(self).encode()).hexdigest()


@dataclass(frozen=True)
class Separator:
    """A vertical line x = x_line.

    ``index`` identifies combinatorial separators: index i sits between the
    i-th and (i+1)-th point of an instance with distinct x-coordinates.  It is
    None for free-standing lines (e.g. square boundaries).
    """

    x_line: float
    index: int | None = None


class Tour:
    """A cyclic visiting order of all point indices, stored canonically.

    Canonical form: rotated so index 0 comes first, oriented so the second
    entry is smaller than the last.  All 2n encodings of the same cycle
    compare equal.
    """

    __slots__ = ("order",)

    def __init__(self, order: Sequence[int]):
        order = list(order)
        n = len(order)
        if n < 3:
            raise ValueError("a tour needs at least 3 points")
        if sorted(order) != list(range(n)):
            raise ValueError("tour must be a permutation of 0..n-1")
        at = order.index(0)
        order = order[at:] + order[:at]
        if order[1] > order[-1]:
            order = [order[0]] + order[:0:-1]
        self.order = tuple(order)

    def edges(self) -> tuple[Edge, ...]:
        o = self.order
        return tuple(Edge(o[i], o[(i + 1) % len(o)]) for i in range(len(o)))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Tour) and self.order == other.order

    def __hash__(self) -> int:
        return hash(self.order)

    def __repr__(self) -> str:
        return f"Tour{self.order}"


def edge_length(inst: StripInstance, edge: Edge) -> float:
    p, q = inst[edge.a], inst[edge.b]
    return math.hypot(p.x - q.x, p.y - q.y)


def tour_length(inst: StripInstance, tour: Tour) -> float:
    return sum(edge_length(inst, e) for e in tour.edges())


def separators(inst: StripInstance) -> list[Separator]:
    """Combinatorial separators s_1 .. s_{n-1}, halfway between x-neighbours.

    Requires distinct x-coordinates: with tied x there is no line between the
    two points and the separator is degenerate.
    """
    seps = []
    for i in range(len(inst) - 1):
        a, b = inst[i].x, inst[i + 1].x
        if a == b:
            raise DegenerateSeparatorError(
                f"points {i} and {i + 1} share x-coordinate {a}"
            )
        seps.append(Separator((a + b) / 2.0, index=i + 1))
    return seps


def tonicity_at(inst: StripInstance, edges: Iterable[Edge], sep: Separator) -> int:
    """Number of edges whose endpoints straddle the separator strictly."""
    count = 0
    for e in edges:
        xa, xb = inst[e.a].x, inst[e.b].x
        if xa == sep.x_line or xb == sep.x_line:
            raise DegenerateSeparatorError(
                f"separator x={sep.x_line} passes through an edge endpoint"
            )
        if (xa - sep.x_line) * (xb - sep.x_line) < 0:
            count += 1
    return count


def tonicity_profile(inst: StripInstance, edges: Iterable[Edge]) -> tuple[int, ...]:
    """Crossing counts at every combinatorial separator, left to right."""
    edges = tuple(edges)
    return tuple(tonicity_at(inst, edges, s) for s in separators(inst))


def is_k_tonic(inst: StripInstance, tour: Tour, k: int) -> bool:
    return max(tonicity_profile(inst, tour.edges()), default=0) <= k


def lower_profile(p1: Sequence[int], p2: Sequence[int]) -> bool:
    """Componentwise <= with at least one strict < (a strict improvement)."""
    if len(p1) != len(p2):
        raise ValueError("profiles of different length")
    return all(a <= b for a, b in zip(p1, p2)) and any(a < b for a, b in zip(p1, p2))


# ---------------------------------------------------------------------------
# Instance files: first line "n delta", then one "x y" line per point.
# Blank lines and lines starting with '#' are ignored.


def format_instance(inst: StripInstance) -> str:
    lines = [f"{len(inst)} {inst.delta!r}"]
    lines += [f"{p.x!r} {p.y!r}" for p in inst.points]
    return "\n".join(lines) + "\n"


def parse_instance(text: str) -> StripInstance:
    rows = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append(line)
    if not rows:
        raise ValueError("empty instance file")
    head = rows[0].split()
    if len(head) != 2:
        raise ValueError(f"expected 'n delta' header, got {rows[0]!r}")
    n, delta = int(head[0]), float(head[1])
    if len(rows) - 1 != n:
        raise ValueError(f"header says {n} points, file has {len(rows) - 1}")
    pts = []
    for line in rows[1:]:
        xs = line.split()
        if len(xs) != 2:
            raise ValueError(f"expected 'x y', got {line!r}")
        pts.append(Point(float(xs[0]), float(xs[1])))
    return StripInstance.from_points(pts, delta)


def read_instance(path) -> StripInstance:
    with open(path) as fh:
        return parse_instance(fh.read())


def write_instance(path, inst: StripInstance) -> None:
    with open(path, "w") as fh:
        fh.write(format_instance(inst))
