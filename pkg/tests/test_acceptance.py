"""The twelve acceptance criteria.  Each test prints one line with the
verdict and the tolerance it was decided at, then asserts a pass."""

import pytest

from colemantrace.acceptance import CRITERIA, run_criterion

NAMES = {
    1: "group_law_axioms", 2: "endomorphism_ring", 3: "degree3_fixtures",
    4: "log_exp", 5: "trace_operator", 6: "trace_preimage", 7: "kw_pair",
    8: "rho_round_trip_c1", 9: "e_to_a_round_trip_c3", 10: "criterion_and_lift_c3",
    11: "unit_alpha_nullspace", 12: "map_a_to_c",
}


@pytest.mark.parametrize("number", sorted(CRITERIA), ids=lambda n: f"{n:02d}_{NAMES[n]}")
def test_criterion(number, capsys):
    res = run_criterion(number, seed=0)
    with capsys.disabled():
        print(f"\n{res.line()} [{res.seconds:.1f}s]")
    assert res.passed, res.detail
