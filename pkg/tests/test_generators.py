import pytest
from hypothesis import given, settings, strategies as st

from striptsp.generators import KINDS, GenSpec, generate, window_density
from striptsp.geometry import format_instance


def test_spec_validation():
    with pytest.raises(ValueError):
        GenSpec("grid", 5, 1.0, 0)
    with pytest.raises(ValueError):
        GenSpec("sparse", 2, 1.0, 0)
    with pytest.raises(ValueError):
        GenSpec("sparse", 5, 0.0, 0)
    with pytest.raises(ValueError):
        GenSpec("sparse", 5, 1.0, 0, density=0)


def test_integer_x_coordinates():
    inst = generate(GenSpec("integer-x", 5, 2.0, 9))
    assert [p.x for p in inst.points] == [0.0, 1.0, 2.0, 3.0, 4.0]
    assert all(0.0 <= p.y <= 2.0 for p in inst.points)


@settings(deadline=None, max_examples=30)
@given(
    st.sampled_from(KINDS),
    st.integers(3, 40),
    st.sampled_from([0.25, 1.0, 4.0]),
    st.integers(0, 2**63 - 1),
)
def test_determinism_and_strip_bounds(kind, n, delta, seed):
    spec = GenSpec(kind, n, delta, seed)
    a, b = generate(spec), generate(spec)
    assert format_instance(a) == format_instance(b)
    assert len(a) == n
    assert all(0.0 <= p.y <= delta for p in a.points)


@settings(deadline=None, max_examples=30)
@given(st.integers(3, 60), st.integers(1, 3), st.integers(0, 10_000))
def test_sparse_window_bound(n, c, seed):
    inst = generate(GenSpec("sparse", n, 1.0, seed, density=c))
    assert window_density(inst) <= c


def test_random_uniform_range():
    inst = generate(GenSpec("random-uniform", 50, 1.0, 4))
    assert all(0.0 <= p.x <= 50.0 for p in inst.points)
