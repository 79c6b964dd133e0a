"""Seeded instance generators.

Three families:

* ``random-uniform``: n points i.i.d. uniform on [0, n] x [0, delta];
* ``integer-x``: x = 0..n-1, y i.i.d. uniform on [0, delta];
* ``sparse``: at most ``density`` points in every unit x-window.

The same GenSpec always yields the same instance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import Point, StripInstance

KINDS = ("random-uniform", "integer-x", "sparse")


@dataclass(frozen=True)
class GenSpec:
    kind: str
    n: int
    delta: float
    seed: int
    density: int = 2  # only used by "sparse"

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.n < 3:
            raise ValueError("need n >= 3")
        if self.delta <= 0:
            raise ValueError("need delta > 0")
        if self.kind == "sparse" and self.density < 1:
            raise ValueError("need density >= 1")


def generate(spec: GenSpec) -> StripInstance:
    rng = np.random.default_rng(
        np.random.SeedSequence([spec.seed, spec.n, KINDS.index(spec.kind)])
    )
    n, delta = spec.n, spec.delta
    if spec.kind == "random-uniform":
        xs = rng.uniform(0.0, n, n)
        ys = rng.uniform(0.0, delta, n)
    elif spec.kind == "integer-x":
        xs = np.arange(n, dtype=float)
        ys = rng.uniform(0.0, delta, n)
    else:  # sparse
        c = spec.density
        gaps = rng.uniform(0.0, 2.0 / c, n)
        xs = np.cumsum(gaps)
        # enforce the sliding-window bound: any c+1 consecutive points must
        # span strictly more than one unit
        for i in range(c, n):
            if xs[i] - xs[i - c] <= 1.0:
                xs[i:] += (xs[i - c] + 1.0 + 1e-9) - xs[i]
        ys = rng.uniform(0.0, delta, n)
    pts = [Point(float(x), float(y)) for x, y in zip(xs, ys)]
    return StripInstance.from_points(pts, delta)


def window_density(inst: StripInstance) -> int:
    """Largest number of points in any closed unit-width x-window."""
    xs = [p.x for p in inst.points]
    best = 1
    j = 0
    for i in range(len(xs)):
        while xs[i] - xs[j] > 1.0:
            j += 1
        best = max(best, i - j + 1)
    return best
