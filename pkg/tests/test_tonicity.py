import math

import pytest
from hypothesis import given, settings, strategies as st

from striptsp.generators import GenSpec, generate
from striptsp.geometry import Tour, is_k_tonic, tonicity_profile, tour_length
from striptsp.oracle import held_karp
from striptsp.tonicity import (
    check_gap_lemma,
    reduce_tonicity,
    swap_edges,
    swap_length_delta,
    tonicity_bound_integer,
    tonicity_bound_sparse,
)


def test_bound_formulas():
    # 2 * ceil(2*sqrt(delta+1) - 1) and 2 * ceil(2*sqrt(c*delta) + 2c - 1)
    assert tonicity_bound_integer(1.0) == 4
    assert tonicity_bound_integer(2.0) == 6
    assert tonicity_bound_integer(8.0) == 10
    assert tonicity_bound_sparse(1.0, 1) == 6
    assert tonicity_bound_sparse(1.0, 2) == 12
    assert tonicity_bound_sparse(4.0, 2) == 18


def test_swap_edges_rewires_one_segment():
    tour = Tour((0, 1, 2, 3, 4, 5))
    swapped = swap_edges(tour, (1, 2), (4, 5))
    assert swapped == Tour((0, 1, 4, 3, 2, 5))


@settings(deadline=None, max_examples=60)
@given(st.integers(0, 10_000), st.data())
def test_swap_length_identity(seed, data):
    # applying the swap changes the length by exactly swap_length_delta
    inst = generate(GenSpec("random-uniform", 8, 2.0, seed))
    tour = Tour(data.draw(st.permutations(list(range(8)))))
    edges = [(e.a, e.b) for e in tour.edges()]
    i = data.draw(st.integers(0, len(edges) - 1))
    j = data.draw(st.integers(0, len(edges) - 1))
    e1, e2 = edges[i], edges[j]
    if len({*e1, *e2}) < 4:
        return
    swapped = swap_edges(tour, e1, e2)
    got = tour_length(inst, swapped) - tour_length(inst, tour)
    assert got == pytest.approx(swap_length_delta(inst, e1, e2), abs=1e-12)


def _reduced(kind, n, delta, seed, density=2):
    inst = generate(GenSpec(kind, n, delta, seed, density))
    tour, length = held_karp(inst)
    return inst, tour, length, reduce_tonicity(inst, tour)


def test_reduction_never_lengthens():
    for seed in range(10):
        inst, tour, length, red = _reduced("random-uniform", 10, 2.0, seed)
        assert red.length <= length + 1e-9
        if red.swaps:
            before = tonicity_profile(inst, tour.edges())
            after = tonicity_profile(inst, red.tour.edges())
            assert sum(after) < sum(before)


def test_reduction_hits_integer_bound():
    for delta in (1.0, 2.0, 4.0):
        bound = tonicity_bound_integer(delta)
        for seed in range(10):
            inst, _, _, red = _reduced("integer-x", 12, delta, seed)
            assert is_k_tonic(inst, red.tour, bound)


def test_reduction_hits_sparse_bound():
    for c in (1, 2, 3):
        for delta in (1.0, 2.0):
            bound = tonicity_bound_sparse(delta, c)
            for seed in range(8):
                inst, _, _, red = _reduced("sparse", 12, delta, seed, c)
                assert is_k_tonic(inst, red.tour, bound)


def test_gap_lemma_on_reduced_tours():
    for seed in range(8):
        inst, _, _, red = _reduced("sparse", 10, 2.0, seed, 2)
        for i in range(1, len(inst)):
            gap = inst[i].x - inst[i - 1].x
            for k in (2, 3, 4):
                if inst.delta <= k * gap:
                    assert check_gap_lemma(inst, red.tour, i, k)
