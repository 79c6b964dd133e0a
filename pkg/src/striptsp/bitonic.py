"""Bitonic tours: every vertical separator is crossed at most twice.

Equivalently, a bitonic tour consists of two x-monotone chains between the
leftmost and the rightmost point.  ``bitonic_tsp`` finds the shortest one in
O(n^2); ``enumerate_bitonic_tours`` lists all 2^(n-2) of them.
"""

from __future__ import annotations

import itertools
import math
from typing import Iterator

from .geometry import SizeError, StripInstance, Tour, tour_length

ENUMERATE_MAX = 18


def _require_distinct_x(inst: StripInstance) -> None:
    if not inst.has_distinct_x():
        raise ValueError("bitonic solver requires distinct x-coordinates")


def bitonic_tsp(inst: StripInstance) -> tuple[Tour, float]:
    """Shortest bitonic tour by the classic two-chain dynamic program.

    dp[i][j] (i < j) is the length of the shortest pair of disjoint
    x-monotone chains that both start at point 0, end at i and j, and
    together cover points 0..j.  Ties prefer the smallest predecessor.
    """
    n = len(inst)
    if n < 3:
        raise SizeError("need at least 3 points")
    _require_distinct_x(inst)
    pts = inst.points

    def d(i: int, j: int) -> float:
        return math.hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y)

    inf = math.inf
    dp = [[inf] * n for _ in range(n)]
    parent = [[-2] * n for _ in range(n)]
    dp[0][1] = d(0, 1)
    for j in range(2, n):
        # j == i+1: the chain now ending at j previously ended at some k < i.
        i = j - 1
        for k in range(i):
            cand = dp[k][i] + d(k, j)
            if cand < dp[i][j]:
                dp[i][j] = cand
                parent[i][j] = k
        # j > i+1: j-1 < j is already covered, so j-1 must precede j.
        for i in range(j - 1):
            cand = dp[i][j - 1] + d(j - 1, j)
            if cand < dp[i][j]:
                dp[i][j] = cand
                parent[i][j] = -1  # marker: extend j's chain from j-1
    length = dp[n - 2][n - 1] + d(n - 2, n - 1)

    # Reconstruct: every DP step contributes one chain edge; together with
    # the closing edge they form the tour cycle.
    edges = [(n - 2, n - 1)]
    i, j = n - 2, n - 1
    while (i, j) != (0, 1):
        k = parent[i][j]
        if k == -1:
            edges.append((j - 1, j))
            j -= 1
        else:
            edges.append((k, j))
            i, j = (k, i) if k < i else (i, k)
    edges.append((0, 1))
    adj: dict[int, list[int]] = {v: [] for v in range(n)}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    order = [0]
    prev = -1
    while len(order) < n:
        cur = order[-1]
        nxt = adj[cur][0] if adj[cur][0] != prev else adj[cur][1]
        order.append(nxt)
        prev = cur
    tour = Tour(order)
    return tour, length


def enumerate_bitonic_tours(inst: StripInstance) -> Iterator[tuple[Tour, float]]:
    """All bitonic tours, canonical and deduplicated (2^(n-2) partitions)."""
    n = len(inst)
    if n < 3:
        raise SizeError("need at least 3 points")
    if n > ENUMERATE_MAX:
        raise SizeError(f"enumerate_bitonic_tours limited to n <= {ENUMERATE_MAX}")
    _require_distinct_x(inst)
    seen = set()
    interior = list(range(1, n - 1))
    for bits in itertools.product((0, 1), repeat=len(interior)):
        upper = [0] + [p for p, b in zip(interior, bits) if b == 0] + [n - 1]
        lower = [p for p, b in zip(interior, bits) if b == 1]
        tour = Tour(upper + lower[::-1])
        if tour.order in seen:
            continue
        seen.add(tour.order)
        yield tour, tour_length(inst, tour)
