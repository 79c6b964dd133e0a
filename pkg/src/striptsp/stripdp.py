"""Exact TSP via separators between blocks of delta x delta squares.

The strip is cut into squares of side delta; a vertical separator line is
placed inside every second non-empty square.  A tour crosses each separator
an even number of times, and the right endpoints of the crossing edges (the
"endpoint configuration") must lie close to the separator, up to one distant
point.  The solver sweeps the separators left to right, keeping for every
candidate configuration a representative set of (matching, weight) pairs:
which configuration endpoints are linked through the left part, and the
cheapest way to do it.  Within a block, path systems are solved exactly;
representative sets are trimmed by rank over GF(2), which preserves the
optimum for every possible completion.

Endpoint configurations are multisets: a point can be the right endpoint of
two crossing edges.  Tokens (point, copy) make the matching bookkeeping
explicit.
"""

from __future__ import annotations

import itertools
import math
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .bitonic import bitonic_tsp
from .geometry import Separator, SizeError, StripInstance, Tour, tour_length

Token = int  # packed (point index << 1) | copy, copy in {0, 1}
Pair = tuple[Token, Token]
Matching = tuple[Pair, ...]  # sorted pairs, each pair sorted


@dataclass(frozen=True)
class SolverConfig:
    c1: float = 4.0      # near-zone point budget is c1 * sqrt(k)
    cstar: int = 8       # mid-zone point budget
    tau: int = 6         # max crossings considered at one separator
    block_cap: int = 18  # max points in one block subproblem
    prune: bool = True   # upper-bound pruning of partial solutions
    # how many distant candidates (nearest to the separator first) may host
    # the single beyond-s_{j+3} token; None keeps the whole strip eligible
    far_cap: int | None = None


@dataclass
class SquareGrid:
    delta: float
    square_of: tuple[int, ...]
    nonempty: tuple[int, ...]
    k: int

    def occupants(self, i: int) -> list[int]:
        return [p for p, s in enumerate(self.square_of) if s == i]


def build_grid(inst: StripInstance) -> SquareGrid:
    """Assign each point to a square [(i-1)*delta, i*delta] x [0, delta];
    points on a shared boundary go to the left square."""
    d = inst.delta
    sq = tuple(math.ceil(p.x / d - 1e-9) for p in inst.points)
    nonempty = tuple(sorted(set(sq)))
    k = max(sum(1 for s in sq if s == i) for i in nonempty)
    return SquareGrid(d, sq, nonempty, k)


@dataclass
class BlockDecomposition:
    inst: StripInstance
    grid: SquareGrid
    separators: tuple[Separator, ...]  # the t placed separators
    sep_square: tuple[int, ...]        # square index holding each separator
    sentinel_left: float
    sentinel_right: float
    blocks: tuple[tuple[int, ...], ...]  # t+1 blocks of point indices

    @property
    def t(self) -> int:
        return len(self.separators)


def _separator_in_square(inst: StripInstance, grid: SquareGrid, i: int) -> float:
    """Pick a line inside square i that crosses no point and cuts as few
    short point pairs as possible (pairs within distance delta)."""
    d = grid.delta
    lo, hi = (i - 1) * d, i * d
    xs = sorted({p.x for p in inst.points})
    cands = [(a + b) / 2.0 for a, b in zip(xs, xs[1:])]
    cands += [lo, hi]
    all_x = [p.x for p in inst.points]
    valid = []
    for c in cands:
        if not (lo <= c <= hi):
            continue
        if any(x == c for x in all_x):
            continue
        if not (any(x < c for x in all_x) and any(x > c for x in all_x)):
            continue
        valid.append(c)
    if not valid:
        raise SizeError(f"no valid separator line inside square {i}")
    return min(valid, key=lambda c: (_cut_pairs(inst, c, d), c))


def _cut_pairs(inst: StripInstance, c: float, d: float) -> int:
    """Point pairs within distance d that a vertical line at c separates."""
    pts = inst.points
    total = 0
    for a in range(len(pts)):
        if pts[a].x >= c:
            continue
        if c - pts[a].x > d:
            continue
        for b in range(len(pts)):
            if pts[b].x <= c:
                continue
            if math.hypot(pts[a].x - pts[b].x, pts[a].y - pts[b].y) <= d:
                total += 1
    return total


def place_separators(
    inst: StripInstance,
    grid: SquareGrid | None = None,
    block_cap: int | None = None,
) -> BlockDecomposition:
    """Separators in every second non-empty square, plus outer sentinels.

    With block_cap set, blocks still holding more than that many points
    (wide squares at large delta) get additional separators, chosen by the
    same fewest-short-pairs-cut rule, until every block fits."""
    if grid is None:
        grid = build_grid(inst)
    chosen = grid.nonempty[1::2]
    placed = []  # (x_line, square index)
    for i in chosen:
        x = _separator_in_square(inst, grid, i)
        placed.append((x, i))
    d = grid.delta

    def split_blocks() -> list[list[int]]:
        cut_xs = [x for x, _ in placed]
        blocks: list[list[int]] = [[] for _ in range(len(placed) + 1)]
        for p_idx, p in enumerate(inst.points):
            blocks[bisect_right(cut_xs, p.x)].append(p_idx)
        return blocks

    blocks = split_blocks()
    while block_cap is not None and max(len(b) for b in blocks) > block_cap:
        big = max(blocks, key=len)
        bxs = sorted({inst.points[q].x for q in big})
        all_x = {p.x for p in inst.points}
        cands = [
            c
            for c in ((a + b) / 2.0 for a, b in zip(bxs, bxs[1:]))
            if c not in all_x
        ]
        if not cands:
            raise SizeError(
                "a block holds more than block_cap points and admits no "
                "separator line; raise block_cap"
            )
        mid_x = (bxs[0] + bxs[-1]) / 2.0
        best = min(
            cands,
            key=lambda c: (_cut_pairs(inst, c, d), abs(c - mid_x), c),
        )
        placed.append((best, math.ceil(best / d - 1e-9)))
        placed.sort()
        blocks = split_blocks()

    s_left = (grid.nonempty[0] - 1) * grid.delta
    s_right = grid.nonempty[-1] * grid.delta
    return BlockDecomposition(
        inst,
        grid,
        tuple(Separator(x) for x, _ in placed),
        tuple(i for _, i in placed),
        s_left,
        s_right,
        tuple(tuple(b) for b in blocks),
    )


# ---------------------------------------------------------------------------
# Candidate endpoint configurations.  A configuration at separator j is a
# multiset of points right of the line (multiplicity <= 2): the right
# endpoints of the tour edges crossing it, counted per edge.

Config = tuple[tuple[int, int], ...]  # sorted ((point, multiplicity), ...)


def _zones(decomp: BlockDecomposition, j: int) -> tuple[list[int], list[int], list[int]]:
    """Points right of s_j split into near (within the separator's square or
    the next), mid (up to the third-next separator) and far zones."""
    inst, grid = decomp.inst, decomp.grid
    sep = decomp.separators[j - 1]
    sq = decomp.sep_square[j - 1]
    far_from = (
        decomp.separators[j + 2].x_line if j + 3 <= decomp.t else math.inf
    )
    near, mid, far = [], [], []
    for q, p in enumerate(inst.points):
        if p.x <= sep.x_line:
            continue
        if grid.square_of[q] <= sq + 1:
            near.append(q)
        elif p.x > far_from:
            far.append(q)
        else:
            mid.append(q)
    return near, mid, far


def _near_cap(grid: SquareGrid, config: SolverConfig) -> int:
    return max(2, math.ceil(config.c1 * math.sqrt(grid.k)))


def enumerate_candidates(
    decomp: BlockDecomposition, j: int, config: SolverConfig = SolverConfig()
) -> list[Config]:
    """The candidate family for separator j: every multiset within the zone
    budgets, an even number of tokens, between 2 and tau of them."""
    near, mid, far = _zones(decomp, j)
    near_cap = _near_cap(decomp.grid, config)
    out: list[Config] = []

    def multisets(zone, cap):
        for pts_n in range(0, min(cap, len(zone)) + 1):
            for chosen in itertools.combinations(zone, pts_n):
                for mults in itertools.product((1, 2), repeat=pts_n):
                    if sum(mults) <= config.tau:
                        yield tuple(zip(chosen, mults))

    for nm in multisets(near, near_cap):
        nt = sum(m for _, m in nm)
        for mm in multisets(mid, config.cstar):
            mt = nt + sum(m for _, m in mm)
            if mt > config.tau:
                continue
            for fm in [()] + [((q, 1),) for q in far]:
                tot = mt + sum(m for _, m in fm)
                if tot > config.tau or tot < 2 or tot % 2:
                    continue
                out.append(tuple(sorted(nm + mm + fm)))
    return sorted(set(out))


def config_of_tour(decomp: BlockDecomposition, tour: Tour, j: int) -> Config:
    """The actual endpoint configuration of a tour at separator j."""
    inst = decomp.inst
    x = decomp.separators[j - 1].x_line
    mult: dict[int, int] = {}
    for e in tour.edges():
        xa, xb = inst.points[e.a].x, inst.points[e.b].x
        if (xa - x) * (xb - x) < 0:
            right = e.a if xa > x else e.b
            mult[right] = mult.get(right, 0) + 1
    return tuple(sorted(mult.items()))


def _tokens(cfg: Config) -> list[Token]:
    return [(q << 1) | c for q, m in cfg for c in range(m)]


# ---------------------------------------------------------------------------
# Matchings on tokens: merging, cycle detection, canonical forms, trimming.


def merge_matchings(m_left: Matching, m_block: Matching):
    """Glue an aggregate matching and a block matching.

    Returns ("cycle", full) when the union contains a cycle (full is True
    when it is a single cycle through every token), or ("paths", pairing)
    with the endpoints of each resulting path.
    """
    edges = tuple(m_left) + tuple(m_block)
    adj: dict[Token, list[tuple[Token, int]]] = {}
    for i, (a, b) in enumerate(edges):
        adj.setdefault(a, []).append((b, i))
        adj.setdefault(b, []).append((a, i))
    used = [False] * len(edges)
    pairing: list[Pair] = []
    for start, nbrs in adj.items():
        if len(nbrs) != 1 or used[nbrs[0][1]]:
            continue
        cur = start
        while True:
            step = None
            for w, ei in adj[cur]:
                if not used[ei]:
                    step = (w, ei)
                    break
            if step is None:
                pairing.append((start, cur) if start < cur else (cur, start))
                break
            used[step[1]] = True
            cur = step[0]
    cycles = 0
    for i in range(len(edges)):
        if used[i]:
            continue
        cycles += 1
        used[i] = True
        start, cur = edges[i]
        while cur != start:
            for w, ei in adj[cur]:
                if not used[ei]:
                    used[ei] = True
                    cur = w
                    break
    if cycles:
        return ("cycle", cycles == 1 and not pairing)
    return ("paths", tuple(sorted(pairing)))


def compatible(m_left: Matching, m_block: Matching) -> bool:
    """Degrees stay <= 2 and no cycle arises, except a single cycle through
    every token (the completed tour)."""
    deg: dict[Token, int] = {}
    for a, b in tuple(m_left) + tuple(m_block):
        deg[a] = deg.get(a, 0) + 1
        deg[b] = deg.get(b, 0) + 1
        if deg[a] > 2 or deg[b] > 2:
            return False
    kind, detail = merge_matchings(m_left, m_block)
    return detail if kind == "cycle" else True


def join(m_left: Matching, m_block: Matching) -> Matching:
    kind, detail = merge_matchings(m_left, m_block)
    if kind != "paths":
        raise ValueError("matchings close a cycle; nothing to join")
    return detail


def fits(m1: Matching, m2: Matching) -> bool:
    """Two perfect matchings on the same tokens fit when their union is a
    single cycle through all tokens."""
    kind, detail = merge_matchings(m1, m2)
    return kind == "cycle" and bool(detail)


def _canon_matching(pairs, dup_points: list[int]) -> Matching:
    """Canonical form of a matching under swapping the two copies of each
    duplicated point (the two crossing-edge stubs are interchangeable)."""
    base = tuple(sorted((a, b) if a < b else (b, a) for a, b in pairs))
    if not dup_points:
        return base
    best = base
    for flips in itertools.product((0, 1), repeat=len(dup_points)):
        swap = {q for q, f in zip(dup_points, flips) if f}
        if not swap:
            continue
        cand = []
        for a, b in pairs:
            if a >> 1 in swap:
                a ^= 1
            if b >> 1 in swap:
                b ^= 1
            cand.append((a, b) if a < b else (b, a))
        cand = tuple(sorted(cand))
        if cand < best:
            best = cand
    return best


def reduce_entries(entries: list, tokens: list[Token]) -> list:
    """Representative trimming: keep a weight-sorted GF(2) row basis of the
    cut matrix.

    Row e has one column per bipartition of the tokens with token 0 on the
    left; the bit is set when no pair of e crosses the cut.  For matchings
    m1, m2 the inner product of their rows mod 2 is 1 exactly when their
    union is a single cycle, so for every completion matching M the cheapest
    kept entry fitting M is as cheap as the cheapest original one.  At most
    2^(|tokens|-1) entries survive.
    """
    if len(entries) <= 1:
        return list(entries)
    tok_index = {t: i for i, t in enumerate(tokens)}
    half = len(tokens) // 2
    pivots: dict[int, int] = {}
    kept = []
    for e in sorted(entries, key=lambda e: (e.weight, e.matching)):
        masks = [
            (1 << tok_index[a]) | (1 << tok_index[b]) for a, b in e.matching
        ]
        if len(masks) != half:
            raise ValueError("entry matching is not perfect on the tokens")
        row = 0
        for sides in itertools.product((0, 1), repeat=half):
            col = 0
            for s, pm in zip(sides, masks):
                if s:
                    col |= pm
            if col & 1:  # token 0 stays on the left side
                continue
            row |= 1 << (col >> 1)
        r = row
        while r:
            p = r.bit_length() - 1
            if p not in pivots:
                break
            r ^= pivots[p]
        if r:
            pivots[r.bit_length() - 1] = r
            kept.append(e)
    return kept


# ---------------------------------------------------------------------------
# The sweep.


@dataclass
class Entry:
    matching: Matching
    weight: float
    prev: "Entry | None" = None
    recon: tuple | None = None  # (interior, pairing, subs) of this block


class _Solver:
    def __init__(self, inst: StripInstance, config: SolverConfig):
        self.inst = inst
        self.cfg = config
        n = len(inst.points)
        if n < 3:
            raise SizeError("need at least 3 points for a tour")
        xy = np.array([(p.x, p.y) for p in inst.points])
        diff = xy[:, None, :] - xy[None, :, :]
        self.dist = np.sqrt((diff**2).sum(axis=2))
        self.xs = [p.x for p in inst.points]
        self.xmax = self.xs[-1]
        self.decomp = place_separators(inst, block_cap=config.block_cap)
        # per-point lower bound: half the two nearest distances
        d = self.dist.copy()
        np.fill_diagonal(d, np.inf)
        two = np.partition(d, 1, axis=1)[:, :2]
        self.h = two.sum(axis=1) / 2.0
        self.suffix_h = np.concatenate([np.cumsum(self.h[::-1])[::-1], [0.0]])
        # vertical excess: every edge at p is at least |dx| + phi(p)
        dx = np.abs(xy[:, None, 0] - xy[None, :, 0])
        exc = d - dx
        self.phi = exc.min(axis=1)
        self.suffix_phi = np.concatenate(
            [np.cumsum(self.phi[::-1])[::-1], [0.0]]
        )
        self.ub = self._upper_bound()
        self._ham_cache: dict = {}
        self._block_cache: dict = {}
        self._hlist_cache: dict = {}
        self._harr_cache: dict = {}
        self._scat_cache: dict = {}
        self._zone_cache: dict[int, tuple] = {}
        self._ext_cache: dict = {}

    # -- bounds --------------------------------------------------------------

    def _upper_bound(self) -> float:
        if self.inst.has_distinct_x():
            _, length = bitonic_tsp(self.inst)
            return length
        # nearest-neighbour fallback; only used as a pruning bound
        n = len(self.xs)
        left = set(range(1, n))
        cur, total = 0, 0.0
        while left:
            nxt = min(left, key=lambda q: self.dist[cur][q])
            total += self.dist[cur][nxt]
            left.remove(nxt)
            cur = nxt
        return total + self.dist[cur][0]

    def _completion_lb(self, j: int, cfg: Config) -> float:
        """Lower bound on the weight of all blocks right of s_j, given the
        endpoint configuration cfg at s_j.  Two bounds, take the better:
        every uncovered point still needs half its two nearest distances,
        and the span right of s_j must be covered twice, less whatever the
        already-paid crossing edges cover."""
        sep_x = self.decomp.separators[j - 1].x_line
        idx = bisect_right(self.xs, sep_x)
        pointwise = float(self.suffix_h[idx]) - sum(
            self.h[q] for q, _ in cfg
        )
        span = (
            self._future_lb(idx, sep_x, cfg)
            + float(self.suffix_phi[idx])
            - sum(self.phi[q] for q, _ in cfg)
        )
        return max(pointwise, span)

    def _coverage_lb(self, idx: int, sep_x: float, cfg: Config) -> float:
        """Coverage-only variant of _future_lb, valid before the new tokens
        of the current block are known: every line with an unvisited point
        on its right needs two crossings, and only the carried edges have
        already paid for theirs."""
        xs = self.xs
        n = len(xs)
        member = {q for q, _ in cfg}
        k = n - 1
        while k >= idx and k in member:
            k -= 1
        if k < idx:
            return 0.0
        hi = xs[k]
        toks: list[float] = []
        for q, m in cfg:
            toks.extend((xs[q],) * m)
        toks.sort()
        nt = len(toks)
        total = 0.0
        prev = sep_x
        for b in sorted(set(t for t in toks if t < hi)) + [hi]:
            if b <= prev:
                continue
            mid = (prev + b) / 2.0
            need = 2 - (nt - bisect_right(toks, mid))
            if need > 0:
                total += (b - prev) * need
            prev = b
        return total

    def _future_lb(self, idx: int, sep_x: float, cfg: Config) -> float:
        """Lower bound on the total length of edges right of s_j that are
        not yet paid for, by vertical-line crossing counts.  Future edges
        form paths whose endpoints are the cfg tokens; a line with an
        unvisited point on its left must be crossed at least 2 - L times
        (L = tokens on the left), symmetrically on the right, and the
        total crossing count at any line has the parity of the token count
        to its right."""
        xs = self.xs
        n = len(xs)
        member = {q for q, _ in cfg}
        i = idx
        while i < n and i in member:
            i += 1
        lo = xs[i] if i < n else None
        k = n - 1
        while k >= idx and k in member:
            k -= 1
        hi = xs[k] if k >= idx else None
        toks: list[float] = []
        for q, m in cfg:
            toks.extend((xs[q],) * m)
        toks.sort()
        nt = len(toks)
        stops = {sep_x}
        stops.update(toks)
        if lo is not None:
            stops.add(lo)
        if hi is not None:
            stops.add(hi)
        total = 0.0
        prev = sep_x
        for b in sorted(stops):
            if b <= prev:
                continue
            mid = (prev + b) / 2.0
            left = bisect_right(toks, mid)
            right = nt - left
            need = right & 1
            if hi is not None and mid < hi and 2 - right > need:
                need = 2 - right
            if lo is not None and mid > lo and 2 - left > need:
                need = 2 - left
            total += (b - prev) * need
            prev = b
        return total

    # -- Hamiltonian path tables ----------------------------------------------

    def _ham_tables(self, interior: tuple[int, ...], a: int):
        """dp[mask][v] = shortest path from a through exactly mask, ending
        at interior[v]; parents for reconstruction."""
        key = (interior, a)
        hit = self._ham_cache.get(key)
        if hit is not None:
            return hit
        nI = len(interior)
        size = 1 << nI
        dp = np.full((size, nI), np.inf)
        par = np.full((size, nI), -1, dtype=np.int64)
        D = self.dist[np.ix_(interior, interior)]
        for v in range(nI):
            dp[1 << v, v] = self.dist[a, interior[v]]
        idx = np.arange(nI)
        for mask in range(1, size):
            row = dp[mask]
            if not np.isfinite(row).any():
                continue
            cand = row[:, None] + D
            vals = np.min(cand, axis=0)
            args = np.argmin(cand, axis=0)
            out = idx[(mask >> idx) & 1 == 0]
            if out.size == 0:
                continue
            tgt = mask | (1 << out)
            better = vals[out] < dp[tgt, out]
            dp[tgt[better], out[better]] = vals[out][better]
            par[tgt[better], out[better]] = args[out][better]
        self._ham_cache[key] = (dp, par)
        return dp, par

    def _h_path(self, interior, a, b, sub) -> tuple[int, ...]:
        if sub == 0:
            return (a, b)
        dp, par = self._ham_tables(interior, a)
        ends = self.dist[list(interior), b]
        in_sub = (sub >> np.arange(len(interior))) & 1 == 1
        v = int(np.argmin(np.where(in_sub, dp[sub] + ends, np.inf)))
        rev = [b]
        mask = sub
        while v >= 0:
            rev.append(interior[v])
            nv = int(par[mask, v])
            mask ^= 1 << v
            v = nv
        rev.append(a)
        return tuple(reversed(rev))

    def _block_H(self, j: int, block: tuple[int, ...], a: int, b: int):
        """H over block masks: shortest a->b path through exactly the mask.
        Shared by every interior (= block minus consumed tokens) of block j,
        which keeps the table count per layer small."""
        key = (j, a, b)
        hit = self._harr_cache.get(key)
        if hit is not None:
            return hit
        dp, _ = self._ham_tables(block, a)
        if block:
            ends = self.dist[list(block), b]
            H = np.min(dp + ends[None, :], axis=1)
        else:
            H = np.zeros(1)
        H[0] = self.dist[a, b]
        self._harr_cache[key] = H
        return H

    def _scatter(self, j: int, block: tuple[int, ...], interior):
        """Map interior-relative masks onto block-relative masks."""
        key = (j, interior)
        hit = self._scat_cache.get(key)
        if hit is not None:
            return hit
        scat = np.zeros(1, dtype=np.intp)
        for q in interior:
            scat = np.concatenate([scat, scat | (1 << block.index(q))])
        self._scat_cache[key] = scat
        return scat

    # -- block subproblems ------------------------------------------------------

    def _solve_block(self, j: int, lcfg: Config, ncfg: tuple):
        """All (matching, weight, paths) for block j given the consumed
        tokens lcfg (at block points) and the new tokens ncfg."""
        key = (j, lcfg, ncfg)
        hit = self._block_cache.get(key)
        if hit is not None:
            return hit
        block = self.decomp.blocks[j - 1]
        lpts = {q for q, _ in lcfg}
        interior = tuple(p for p in block if p not in lpts)
        forced = [(q << 1, (q << 1) | 1) for q, m in lcfg if m == 2]
        free = [q << 1 for q, m in lcfg if m == 1]
        free += [
            (q << 1) | (base + i) for q, base, add in ncfg for i in range(add)
        ]
        entries = []
        if not free:
            if not interior:
                entries.append((tuple(sorted(forced)), 0.0, None))
            self._block_cache[key] = entries
            return entries
        if len(free) % 2:
            self._block_cache[key] = entries
            return entries
        if len(free) > 12:
            # pairing explosion; treat like a budget cut
            self._block_cache[key] = entries
            return entries
        scat = self._scatter(j, block, interior)
        for pairing in _pairings(free):
            weight, subs = self._cover(j, block, interior, scat, pairing)
            if weight is None:
                continue
            matching = tuple(sorted(forced + list(pairing)))
            entries.append((matching, weight, (interior, pairing, subs)))
        entries.sort(key=lambda e: (e[1], e[0]))
        self._block_cache[key] = entries
        return entries

    def _cover(self, j, block, interior, scat, pairing):
        """Exactly cover the interior by one path per pair; returns the total
        length and the interior subset used by each pair, or (None, None)."""
        nI = len(interior)
        if nI == 0:
            if any(a >> 1 == b >> 1 for a, b in pairing):
                return None, None
            w = 0.0
            for a, b in pairing:
                w += self.dist[a >> 1, b >> 1]
            return w, ()
        full = (1 << nI) - 1
        if len(pairing) == 2:
            # split the interior between the two paths; complementary masks
            # line up under index reversal
            (a1, b1), (a2, b2) = pairing
            tot = self._block_H(j, block, a1 >> 1, b1 >> 1)[scat] + self._block_H(
                j, block, a2 >> 1, b2 >> 1
            )[scat][::-1]
            if a1 >> 1 == b1 >> 1:
                tot[0] = math.inf
            if a2 >> 1 == b2 >> 1:
                tot[full] = math.inf
            s1 = int(np.argmin(tot))
            w = float(tot[s1])
            if w == math.inf:
                return None, None
            return w, (s1, full ^ s1)
        F = {0: 0.0}
        parents: list[dict[int, int]] = []
        last = len(pairing) - 1
        for i, (a, b) in enumerate(pairing):
            hkey = (j, interior, a >> 1, b >> 1)
            H = self._hlist_cache.get(hkey)
            if H is None:
                H = self._block_H(j, block, a >> 1, b >> 1)[scat].tolist()
                self._hlist_cache[hkey] = H
            same = a >> 1 == b >> 1  # a loop through the block needs interior
            newF: dict[int, float] = {}
            par: dict[int, int] = {}
            if i == last:
                # the final pair must absorb whatever interior remains
                for m, fm in F.items():
                    s = full ^ m
                    if same and s == 0:
                        continue
                    c = fm + H[s]
                    if c < newF.get(full, math.inf):
                        newF[full] = c
                        par[full] = s
            else:
                for m, fm in F.items():
                    comp = full ^ m
                    s = comp
                    while True:
                        if not (same and s == 0):
                            c = fm + H[s]
                            t = m | s
                            if c < newF.get(t, math.inf):
                                newF[t] = c
                                par[t] = s
                        if s == 0:
                            break
                        s = (s - 1) & comp
            F = newF
            parents.append(par)
            if not F:
                return None, None
        if full not in F:
            return None, None
        subs_used = []
        mask = full
        for par in reversed(parents):
            s = par[mask]
            subs_used.append(s)
            mask ^= s
        subs_used.reverse()
        return F[full], tuple(subs_used)

    # -- configuration extensions ------------------------------------------------

    def _extensions(self, j: int, prev_cfg: Config, xmin_layer: float):
        """All configurations at s_j extending prev_cfg: carried tokens plus
        new ones within the zone budgets.  The new-token enumeration depends
        only on (j, carried tokens), so it is cached across predecessor
        configurations; xmin_layer must be the lightest entry weight in the
        whole previous layer."""
        sep_x = self.decomp.separators[j - 1].x_line
        lcfg = tuple((q, m) for q, m in prev_cfg if self.xs[q] <= sep_x)
        carried = tuple((q, m) for q, m in prev_cfg if self.xs[q] > sep_x)
        key = (j, carried)
        cached = self._ext_cache.get(key)
        if cached is None:
            cached = self._new_configs(j, carried, xmin_layer)
            self._ext_cache[key] = cached
        for b, ncfg, gap_sum in cached:
            yield b, lcfg, ncfg, gap_sum

    def _new_configs(
        self, j: int, carried: Config, xmin_layer: float
    ) -> list[tuple[Config, tuple]]:
        decomp, cfg = self.decomp, self.cfg
        sep_x = decomp.separators[j - 1].x_line
        zones = self._zone_cache.get(j)
        if zones is None:
            near, mid, far = _zones(decomp, j)
            zone_of = {q: 0 for q in near}
            zone_of.update({q: 1 for q in mid})
            zone_of.update({q: 2 for q in far})
            cands = sorted(near + mid + far, key=lambda q: self.xs[q])
            zones = (zone_of, cands)
            self._zone_cache[j] = zones
        zone_of, cands = zones
        if cfg.far_cap is not None:
            kept = cfg.far_cap
            trimmed = []
            for q in cands:  # cands run left to right
                if zone_of[q] == 2:
                    if kept == 0:
                        continue
                    kept -= 1
                trimmed.append(q)
            cands = trimmed
        caps = [_near_cap(decomp.grid, cfg), cfg.cstar, 1]
        base = dict(carried)
        counts = [0, 0, 0]
        for q, m in carried:
            counts[zone_of[q]] += 1
            if zone_of[q] == 2 and m > 1:
                return []
        if any(c > cap for c, cap in zip(counts, caps)):
            return []
        carried_tokens = sum(m for _, m in carried)
        budget = (self.ub + 1e-9) - xmin_layer if cfg.prune else math.inf
        sep_idx = bisect_right(self.xs, sep_x)
        phi_rest = float(self.suffix_phi[sep_idx])
        if cfg.prune and carried:
            horiz = (
                self._coverage_lb(sep_idx, sep_x, carried)
                + phi_rest
                - sum(self.phi[q] for q, _ in carried)
            )
            if horiz > budget:
                return []
        # completion bound bookkeeping: candidates still ahead can lower the
        # remaining-points bound by at most max(0, h - gap) each
        rest0 = float(self.suffix_h[sep_idx]) - sum(
            self.h[q] for q, _ in carried
        )
        slack = [
            max(0.0, float(self.h[q]) - (self.xs[q] - sep_x)) for q in cands
        ]
        slack_suffix = [0.0] * (len(cands) + 1)
        for i in range(len(cands) - 1, -1, -1):
            slack_suffix[i] = slack_suffix[i + 1] + slack[i]
        out = []

        def close(new, gap_sum, rest):
            total = carried_tokens + sum(a for _, a in new)
            if total % 2 or not 2 <= total <= cfg.tau:
                return
            if gap_sum + rest > budget:
                return
            merged = dict(base)
            for q, a in new:
                merged[q] = merged.get(q, 0) + a
            b = tuple(sorted(merged.items()))
            if cfg.prune:
                span = (
                    self._future_lb(sep_idx, sep_x, b)
                    + phi_rest
                    - sum(self.phi[q] for q, _ in b)
                )
                if gap_sum + span > budget:
                    return
            n = tuple(sorted((q, base.get(q, 0), a) for q, a in new))
            out.append((b, n, gap_sum))

        def dfs(i, new, tokens, gap_sum, rest):
            close(new, gap_sum, rest)
            if tokens >= cfg.tau or i == len(cands):
                return
            for nxt in range(i, len(cands)):
                q = cands[nxt]
                z = zone_of[q]
                room = (2 if z < 2 else 1) - base.get(q, 0)
                if room <= 0:
                    continue
                fresh = base.get(q, 0) == 0
                if fresh and counts[z] >= caps[z]:
                    continue
                gap = self.xs[q] - sep_x
                new_rest = rest - (float(self.h[q]) if fresh else 0.0)
                for add in range(1, room + 1):
                    if tokens + add > cfg.tau:
                        break
                    g = gap_sum + add * gap
                    if g + new_rest - slack_suffix[nxt + 1] > budget:
                        break
                    if fresh:
                        counts[z] += 1
                    dfs(nxt + 1, new + [(q, add)], tokens + add, g, new_rest)
                    if fresh:
                        counts[z] -= 1

        dfs(0, [], carried_tokens, 0.0, rest0)
        return out

    # -- main sweep ---------------------------------------------------------------

    def solve(self) -> tuple[Tour, float]:
        t = self.decomp.t
        if t == 0:
            return self._single_block()
        layer: dict[Config, list[Entry]] = {(): [Entry((), 0.0)]}
        for j in range(1, t + 1):
            nxt: dict[Config, dict[Matching, Entry]] = {}
            comp_cache: dict[tuple, float] = {}
            # tables from earlier blocks are dead weight
            self._ham_cache.clear()
            self._harr_cache.clear()
            self._hlist_cache.clear()
            self._scat_cache.clear()
            xmin_layer = min(
                e.weight for v in layer.values() for e in v
            )
            hblock = sum(float(self.h[q]) for q in self.decomp.blocks[j - 1])
            for prev_cfg in sorted(layer):
                prev_entries = layer[prev_cfg]
                e0w = prev_entries[0].weight
                for b, lcfg, ncfg, gap_sum in self._extensions(
                    j, prev_cfg, xmin_layer
                ):
                    if self.cfg.prune:
                        comp_lb = comp_cache.get(b)
                        if comp_lb is None:
                            comp_lb = self._completion_lb(j, b)
                            comp_cache[b] = comp_lb
                        # cheapest conceivable total for this extension
                        w_lb = max(
                            gap_sum,
                            hblock - sum(self.h[q] for q, _ in lcfg),
                        )
                        if e0w + w_lb + comp_lb > self.ub + 1e-9:
                            continue
                    else:
                        comp_lb = 0.0
                    blockset = self._solve_block(j, lcfg, ncfg)
                    if not blockset:
                        continue
                    limit = self.ub + 1e-9 - comp_lb
                    w0 = blockset[0][1]
                    dup = [q for q, m in b if m == 2]
                    bucket = nxt.setdefault(b, {})
                    # both lists run in ascending weight order
                    for e_prev in prev_entries:
                        if self.cfg.prune and e_prev.weight + w0 > limit:
                            break
                        for matching, w, recon in blockset:
                            tot = e_prev.weight + w
                            if self.cfg.prune and tot > limit:
                                break
                            kind, detail = merge_matchings(
                                e_prev.matching, matching
                            )
                            if kind != "paths":
                                continue
                            key = _canon_matching(detail, dup)
                            cur = bucket.get(key)
                            if cur is None or tot < cur.weight:
                                bucket[key] = Entry(key, tot, e_prev, recon)
            layer = {
                b: reduce_entries(list(bucket.values()), _tokens(b))
                for b, bucket in sorted(nxt.items())
                if bucket
            }
            if not layer:
                raise SizeError(
                    "no feasible configuration survived separator "
                    f"{j}; raise tau or the zone budgets"
                )
        best: Entry | None = None
        for prev_cfg in sorted(layer):
            for matching, w, recon in self._solve_block(t + 1, prev_cfg, ()):
                for e_prev in layer[prev_cfg]:
                    kind, detail = merge_matchings(e_prev.matching, matching)
                    if kind != "cycle" or not detail:
                        continue
                    tot = e_prev.weight + w
                    if best is None or tot < best.weight:
                        best = Entry((), tot, e_prev, recon)
        if best is None:
            raise SizeError(
                "no tour found within the configuration budgets; raise tau"
            )
        return self._reconstruct(best), best.weight

    def _single_block(self) -> tuple[Tour, float]:
        n = len(self.xs)
        if n == 3:
            tour = Tour((0, 1, 2))
            return tour, tour_length(self.inst, tour)
        interior = tuple(range(1, n))
        dp, _ = self._ham_tables(interior, 0)
        full = (1 << (n - 1)) - 1
        ends = self.dist[list(interior), 0]
        vals = dp[full] + ends
        v = int(np.argmin(vals))
        path = self._h_path(interior, 0, interior[v], full ^ (1 << v))
        tour = Tour(path)
        return tour, float(vals[v])

    def _reconstruct(self, final: Entry) -> Tour:
        adj: dict[int, list[int]] = {}
        e: Entry | None = final
        n_edges = 0
        while e is not None:
            if e.recon is not None:
                interior, pairing, subs = e.recon
                if not interior:
                    subs = (0,) * len(pairing)
                for (a, b), s in zip(pairing, subs):
                    path = self._h_path(interior, a >> 1, b >> 1, s)
                    for u, v in zip(path, path[1:]):
                        adj.setdefault(u, []).append(v)
                        adj.setdefault(v, []).append(u)
                        n_edges += 1
            e = e.prev
        n = len(self.xs)
        if len(adj) != n or n_edges != n or any(
            len(v) != 2 for v in adj.values()
        ):
            raise SizeError("reconstructed edge set is not a tour")
        order = [0]
        prev, cur = None, 0
        while True:
            a, b = adj[cur]
            nxt = b if a == prev else a
            if nxt == 0:
                break
            order.append(nxt)
            prev, cur = cur, nxt
        if len(order) != n:
            raise SizeError("reconstructed edge set is not a single cycle")
        tour = Tour(order)
        length = tour_length(self.inst, tour)
        if abs(length - final.weight) > 1e-6 * max(1.0, length):
            raise SizeError("reconstructed tour length mismatch")
        return tour


def _pairings(free: list[Token]):
    """Perfect pairings of the tokens.  A pair of two tokens at the same
    point is allowed (both crossing edges end there) but its path must loop
    through at least one interior point; _cover enforces that."""
    if not free:
        yield ()
        return
    first, rest = free[0], free[1:]
    for i, other in enumerate(rest):
        sub = rest[:i] + rest[i + 1:]
        pair = (first, other) if first < other else (other, first)
        for tail in _pairings(sub):
            yield (pair,) + tail


def narrow_rect_tsp(
    inst: StripInstance, config: SolverConfig = SolverConfig()
) -> tuple[Tour, float]:
    """Exact shortest tour through the instance.

    Returns (tour, length).  Raises SizeError when a block exceeds
    block_cap points or no tour exists within the configuration budgets.
    """
    tour, length = _Solver(inst, config).solve()
    return tour, float(length)
