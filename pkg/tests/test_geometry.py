import math

import pytest
from hypothesis import given, strategies as st

from striptsp.geometry import (
    Edge,
    Point,
    StripInstance,
    Tour,
    format_instance,
    is_k_tonic,
    lower_profile,
    parse_instance,
    separators,
    tonicity_profile,
    tour_length,
)


def square(delta=1.0):
    return StripInstance.from_points(
        [Point(0, 0), Point(0, 1), Point(1, 0), Point(1, 1)], delta
    )


def test_tour_canonical_form():
    assert Tour((2, 0, 1)).order == (0, 1, 2)
    assert Tour((0, 2, 1)) == Tour((0, 1, 2))  # reflection
    assert Tour((1, 2, 3, 0)) == Tour((0, 1, 2, 3))  # rotation
    assert Tour((0, 1, 3, 2)) != Tour((0, 1, 2, 3))


def test_tour_rejects_non_permutations():
    with pytest.raises(ValueError):
        Tour((0, 1))
    with pytest.raises(ValueError):
        Tour((0, 1, 1))


@given(st.permutations(list(range(6))), st.integers(0, 5), st.booleans())
def test_tour_equal_under_rotation_and_reflection(perm, shift, flip):
    rotated = perm[shift:] + perm[:shift]
    if flip:
        rotated = rotated[::-1]
    assert Tour(perm) == Tour(rotated)
    assert hash(Tour(perm)) == hash(Tour(rotated))


def test_tour_length_unit_square():
    inst = square()
    assert tour_length(inst, Tour((0, 1, 3, 2))) == pytest.approx(4.0, abs=1e-12)
    # the crossing order pays two diagonals
    assert tour_length(inst, Tour((0, 3, 1, 2))) == pytest.approx(
        2.0 + 2.0 * math.sqrt(2.0), abs=1e-12
    )


def test_edge_normalizes_endpoint_order():
    assert Edge(3, 1).key() == Edge(1, 3).key() == (1, 3)
    with pytest.raises(ValueError):
        Edge(2, 2)


def zigzag():
    return StripInstance.from_points(
        [Point(0, 0), Point(1, 1), Point(2, 0), Point(3, 1)], 1.0
    )


def test_separators_fall_between_distinct_x():
    seps = separators(zigzag())
    assert len(seps) == 3
    assert all(i < s.x_line < i + 1 for i, s in enumerate(seps))


def test_separators_reject_shared_x():
    from striptsp.geometry import DegenerateSeparatorError

    with pytest.raises(DegenerateSeparatorError):
        separators(square())


def test_tonicity_profile_zigzag():
    inst = zigzag()
    assert tonicity_profile(inst, Tour((0, 1, 2, 3)).edges()) == (2, 2, 2)
    assert tonicity_profile(inst, Tour((0, 2, 1, 3)).edges()) == (2, 4, 2)
    assert is_k_tonic(inst, Tour((0, 1, 2, 3)), 2)
    assert not is_k_tonic(inst, Tour((0, 2, 1, 3)), 2)


def test_lower_profile():
    assert lower_profile((2, 2), (2, 4))
    assert not lower_profile((2, 2), (2, 2))
    assert not lower_profile((4, 2), (2, 4))
    with pytest.raises(ValueError):
        lower_profile((2,), (2, 2))


def test_instance_rejects_points_outside_strip():
    with pytest.raises(ValueError):
        StripInstance.from_points([Point(0, 0), Point(1, 2), Point(2, 0)], 1.0)


def test_format_parse_roundtrip():
    inst = StripInstance.from_points(
        [Point(0.25, 0.125), Point(1.5, 0.75), Point(3.0, 0.0)], 0.875
    )
    again = parse_instance(format_instance(inst))
    assert again.delta == inst.delta
    assert again.points == inst.points


def test_parse_rejects_malformed():
    with pytest.raises(ValueError):
        parse_instance("")
    with pytest.raises(ValueError):
        parse_instance("2 1.0\n0 0\n")
    with pytest.raises(ValueError):
        parse_instance("1 1.0\n0 0 0\n")


@given(
    st.lists(
        st.tuples(
            st.floats(-50, 50, allow_nan=False), st.floats(0, 2, allow_nan=False)
        ),
        min_size=3,
        max_size=10,
    )
)
def test_roundtrip_preserves_exact_coordinates(coords):
    inst = StripInstance.from_points([Point(x, y) for x, y in coords], 2.0)
    assert parse_instance(format_instance(inst)).points == inst.points
