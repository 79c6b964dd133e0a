import math

import pytest
from hypothesis import given, settings, strategies as st

from striptsp.generators import GenSpec, generate
from striptsp.geometry import Point, SizeError, StripInstance, Tour, tour_length
from striptsp.oracle import (
    distance_matrix,
    enumerate_all_tours,
    exact_path_cover,
    held_karp,
)


def test_enumeration_counts():
    # (n-1)!/2 distinct cyclic orders
    for n, expect in ((3, 1), (4, 3), (5, 12)):
        pts = [Point(float(i), (i % 2) * 0.5) for i in range(n)]
        inst = StripInstance.from_points(pts, 1.0)
        assert len(list(enumerate_all_tours(inst))) == expect


def test_held_karp_matches_enumeration():
    for seed in range(6):
        inst = generate(GenSpec("random-uniform", 7, 1.5, seed))
        _, best = min(enumerate_all_tours(inst), key=lambda tw: tw[1])
        tour, length = held_karp(inst)
        assert length == pytest.approx(best, abs=1e-9)
        assert tour_length(inst, tour) == pytest.approx(length, abs=1e-12)


def test_held_karp_frozen_values():
    # lengths computed once by full enumeration, then frozen
    inst = generate(GenSpec("integer-x", 7, 2.0, 0))
    tour, length = held_karp(inst)
    assert length == pytest.approx(12.748590424421202, abs=1e-9)
    assert tour.order == (0, 1, 3, 4, 6, 5, 2)
    assert held_karp(generate(GenSpec("sparse", 8, 1.5, 3)))[1] == pytest.approx(
        9.385177114890748, abs=1e-9
    )
    assert held_karp(generate(GenSpec("random-uniform", 6, 0.5, 5)))[1] == pytest.approx(
        7.8524903651924065, abs=1e-9
    )


def test_held_karp_size_limit():
    pts = [Point(float(i), 0.25) for i in range(21)]
    with pytest.raises(SizeError):
        held_karp(StripInstance.from_points(pts, 1.0))


def test_distance_matrix_symmetry():
    inst = generate(GenSpec("random-uniform", 9, 1.0, 2))
    d = distance_matrix(inst)
    assert d.shape == (9, 9)
    assert (d == d.T).all()
    assert (d.diagonal() == 0).all()
    assert d[0, 1] == pytest.approx(
        math.hypot(inst[0].x - inst[1].x, inst[0].y - inst[1].y), abs=1e-12
    )


@settings(deadline=None, max_examples=25)
@given(st.integers(0, 10_000))
def test_held_karp_never_beaten_by_any_tour(seed):
    inst = generate(GenSpec("random-uniform", 6, 1.0, seed))
    _, opt = held_karp(inst)
    for _, w in enumerate_all_tours(inst):
        assert opt <= w + 1e-9


def test_exact_path_cover_single_path():
    # collinear points: the straight path is optimal
    pts = [Point(float(i), 0.0) for i in range(5)]
    inst = StripInstance.from_points(pts, 1.0)
    sol = exact_path_cover(inst, range(5), [0, 4], [(0, 4)])
    assert sol.length == pytest.approx(4.0, abs=1e-12)
    assert sol.paths[0] in ((0, 1, 2, 3, 4), (4, 3, 2, 1, 0))


def test_exact_path_cover_two_paths():
    pts = [Point(0, 0), Point(0, 1), Point(1, 0), Point(1, 1)]
    inst = StripInstance.from_points(pts, 1.0)
    sol = exact_path_cover(inst, range(4), [0, 1, 2, 3], [(0, 2), (1, 3)])
    assert sol.length == pytest.approx(2.0, abs=1e-12)


def test_exact_path_cover_validates_matching():
    pts = [Point(float(i), 0.0) for i in range(4)]
    inst = StripInstance.from_points(pts, 1.0)
    with pytest.raises(ValueError):
        exact_path_cover(inst, range(4), [0, 1], [(0, 2)])
    with pytest.raises(ValueError):
        exact_path_cover(inst, range(4), [0, 1], [])
