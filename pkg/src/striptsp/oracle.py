"""Brute-force reference solvers: exact but exponential.

These are deliberately simple and are used as ground truth for everything
else in the package, so they share no code with the structured solvers.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .geometry import SizeError, StripInstance, Tour, tour_length

HELD_KARP_MAX = 20
ENUMERATE_MAX = 10
PATH_COVER_MAX = 20


def distance_matrix(inst: StripInstance) -> np.ndarray:
    xy = np.array([(p.x, p.y) for p in inst.points])
    d = xy[:, None, :] - xy[None, :, :]
    return np.sqrt((d * d).sum(axis=2))


def held_karp(inst: StripInstance) -> tuple[Tour, float]:
    """Optimal tour by dynamic programming over subsets.

    Ties are broken toward the smallest-index predecessor, which makes the
    returned tour deterministic.  Limited to n <= 20.
    """
    n = len(inst)
    if n < 3:
        raise SizeError("need at least 3 points")
    if n > HELD_KARP_MAX:
        raise SizeError(f"held_karp limited to n <= {HELD_KARP_MAX}, got {n}")
    dist = distance_matrix(inst)
    full = 1 << n
    inf = np.inf
    # dp[mask][v]: shortest path 0 -> v visiting exactly the points in mask
    # (mask always contains 0 and v).
    dp = np.full((full, n), inf)
    parent = np.full((full, n), -1, dtype=np.int32)
    dp[1][0] = 0.0
    for mask in range(1, full):
        if not mask & 1:
            continue
        row = dp[mask]
        alive = row < inf
        if not alive.any():
            continue
        # extend every path ending at v by one unvisited point w
        cand = np.where(alive, row, inf)[:, None] + dist
        best = cand.min(axis=0)
        arg = cand.argmin(axis=0)  # argmin -> smallest predecessor on ties
        for w in range(1, n):
            if mask & (1 << w):
                continue
            m2 = mask | (1 << w)
            if best[w] < dp[m2][w]:
                dp[m2][w] = best[w]
                parent[m2][w] = arg[w]
    closing = dp[full - 1] + dist[:, 0]
    closing[0] = inf
    v = int(closing.argmin())
    length = float(closing[v])
    order = []
    mask = full - 1
    while v != -1:
        order.append(v)
        v, mask = int(parent[mask][v]), mask & ~(1 << v)
    order.reverse()
    assert order[0] == 0 and len(order) == n
    tour = Tour(order)
    return tour, length


def enumerate_all_tours(inst: StripInstance) -> Iterator[tuple[Tour, float]]:
    """All distinct tours in canonical form, each exactly once.

    There are (n-1)!/2 of them; limited to n <= 10.
    """
    n = len(inst)
    if n < 3:
        raise SizeError("need at least 3 points")
    if n > ENUMERATE_MAX:
        raise SizeError(f"enumerate_all_tours limited to n <= {ENUMERATE_MAX}")
    for perm in itertools.permutations(range(1, n)):
        if perm[0] > perm[-1]:
            continue  # each cycle has two orientations; keep the canonical one
        tour = Tour((0,) + perm)
        yield tour, tour_length(inst, tour)


@dataclass(frozen=True)
class PathCoverSolution:
    paths: tuple[tuple[int, ...], ...]
    length: float


def exact_path_cover(
    inst: StripInstance,
    subset: Sequence[int],
    boundary: Sequence[int],
    matching: Sequence[tuple[int, int]],
) -> PathCoverSolution:
    """Minimum-length vertex-disjoint paths covering ``subset``.

    The paths realize ``matching``: for each pair (a, b) there is exactly one
    path with endpoints a and b, boundary points appear only as endpoints,
    and every point of ``subset`` is visited exactly once.  Raises SizeError
    above 20 points and ValueError when the matching is not a perfect
    matching on ``boundary``.
    """
    subset = sorted(subset)
    if len(subset) > PATH_COVER_MAX:
        raise SizeError(f"exact_path_cover limited to {PATH_COVER_MAX} points")
    sub = set(subset)
    if len(sub) != len(subset):
        raise ValueError("subset contains duplicates")
    bset = set(boundary)
    if not bset <= sub:
        raise ValueError("boundary must be a subset of the covered points")
    pairs = [tuple(sorted(p)) for p in matching]
    flat = [v for p in pairs for v in p]
    if sorted(flat) != sorted(bset) or len(flat) != len(bset):
        raise ValueError("matching must be a perfect matching on the boundary")
    if not pairs:
        raise ValueError("empty matching cannot cover any points")
    pairs.sort()

    pts = inst.points

    def d(u: int, v: int) -> float:
        return math.hypot(pts[u].x - pts[v].x, pts[u].y - pts[v].y)

    interior = [v for v in subset if v not in bset]
    pos = {v: i for i, v in enumerate(interior)}
    full = (1 << len(interior)) - 1
    inf = math.inf

    # State: currently building pair k (pairs 0..k-1 closed), path started at
    # pairs[k][0], sitting at vertex v, having used interior set `mask`.
    start = pairs[0][0]
    dp: dict[tuple[int, int, int], float] = {(0, 0, start): 0.0}
    prev: dict[tuple[int, int, int], tuple[tuple[int, int, int], int] | None] = {
        (0, 0, start): None
    }
    best_final: tuple[float, tuple[int, int, int]] | None = None
    heap = [(0, 0, start)]
    while heap:
        state = heapq.heappop(heap)
        if state not in dp:
            continue
        k, mask, v = state
        cost = dp[state]
        a, b = pairs[k]
        # extend with an unused interior point
        for w in interior:
            i = pos[w]
            if mask & (1 << i):
                continue
            ns = (k, mask | (1 << i), w)
            nc = cost + d(v, w)
            if nc < dp.get(ns, inf):
                dp[ns] = nc
                prev[ns] = (state, w)
                heapq.heappush(heap, ns)
        # close the current pair at b, then open the next pair (if any)
        nc = cost + d(v, b)
        if k + 1 < len(pairs):
            ns = (k + 1, mask, pairs[k + 1][0])
            if nc < dp.get(ns, inf):
                dp[ns] = nc
                prev[ns] = (state, -1)
                heapq.heappush(heap, ns)
        elif mask == full:
            if best_final is None or nc < best_final[0]:
                best_final = (nc, state)
    if best_final is None:
        raise ValueError("no feasible path cover")

    length, state = best_final
    # rebuild paths by walking the predecessor chain
    cur: tuple[int, int, int] | None = state
    steps: list[int] = []
    while cur is not None:
        link = prev[cur]
        if link is None:
            break
        cur, w = link
        steps.append(w)
    steps.reverse()
    paths: list[list[int]] = [[pairs[0][0]]]
    ki = 0
    for w in steps:
        if w == -1:
            paths[-1].append(pairs[ki][1])
            ki += 1
            paths.append([pairs[ki][0]])
        else:
            paths[-1].append(w)
    paths[-1].append(pairs[ki][1])
    return PathCoverSolution(tuple(tuple(p) for p in paths), length)
