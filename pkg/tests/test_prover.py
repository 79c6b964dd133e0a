import math

import pytest
from hypothesis import given, settings, strategies as st

from striptsp.prover import (
    DEFAULT_DELTA,
    consolidate_endpoints,
    enumerate_scenarios,
    enumerate_structures,
    interval_edge_bounds,
    load_cases,
    prove_case,
    prove_scenario,
    verify_certificate,
    verify_worst_case_scenarios,
)

CASES = load_cases()


def test_case_table_is_complete():
    assert sorted(CASES) == [(2, 2), (2, 3), (3, 2), (3, 3), (4, 2), (4, 3)]


def test_scenario_counts_are_stable():
    # frozen after one enumeration; geometric dedup keeps these small
    expected = {
        (2, 2): 1,
        (2, 3): 2,
        (3, 2): 6,
        (3, 3): 12,
        (4, 2): 12,
        (4, 3): 24,
    }
    for case, count in expected.items():
        assert len(enumerate_scenarios(CASES[case])) == count


def test_structures_have_even_degrees_fixed():
    for case in CASES.values():
        for st_ in enumerate_structures(case):
            degree = {}
            for a, b in st_.f_bar:
                degree[a] = degree.get(a, 0) + 1
                degree[b] = degree.get(b, 0) + 1
            assert all(1 <= d <= 2 for d in degree.values())


def test_smallest_case_succeeds_and_reverifies():
    report = prove_case(2, 2, epsilon=0.05, keep_certificates=True)
    assert report.verdict == "SUCCESS"
    for outcome in report.outcomes:
        assert outcome.coverage_exact
        for depth, ilo, winner in outcome.certificates:
            assert verify_certificate(outcome.scenario, depth, ilo, winner)


def test_failing_case_reports_boxes():
    sc = enumerate_scenarios(CASES[(3, 2)])[0]
    out = prove_scenario(sc, epsilon=0.4)
    assert out.coverage_exact
    assert out.verdict in ("SUCCESS", "FAIL")
    assert out.boxes_proven + out.boxes_failed > 0


@given(
    st.floats(-5, 5),
    st.floats(-5, 5),
    st.floats(0, DEFAULT_DELTA),
    st.floats(0, DEFAULT_DELTA),
    st.floats(0, DEFAULT_DELTA),
    st.floats(0, DEFAULT_DELTA),
)
def test_interval_bounds_are_sound(xa, xb, lo_a, hi_a, lo_b, hi_b):
    lo_a, hi_a = sorted((lo_a, hi_a))
    lo_b, hi_b = sorted((lo_b, hi_b))
    lo, hi = interval_edge_bounds(xa, (lo_a, hi_a), xb, (lo_b, hi_b))
    # every realization must land inside the bounds
    for ta, tb in ((0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0), (0.5, 0.5)):
        ya = lo_a + ta * (hi_a - lo_a)
        yb = lo_b + tb * (hi_b - lo_b)
        d = math.hypot(xa - xb, ya - yb)
        assert lo - 1e-12 <= d <= hi + 1e-12


def test_consolidation_moves_endpoints_to_integers():
    edges = [((-2.0, 1.0), (1.0, 2.0)), ((-1.0, 0.0), (2.0, 1.5))]
    res = consolidate_endpoints(edges, 0)
    assert res.n_left == 2 and res.n_right == 2
    for (xl, _), (xr, _) in res.final_edges():
        assert xl == int(xl) and xr == int(xr)
        assert xl <= 0 < 1 <= xr


def test_worst_case_scenarios_hold():
    report = verify_worst_case_scenarios(grid=2_000)
    assert report["violations"] == 0
    assert max(report["equality_left"]) < 1e-9
    assert max(report["equality_right"]) < 1e-9
    assert report["move_derivative_max_err"] < 1e-5
