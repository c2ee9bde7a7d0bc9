import numpy as np
import pytest

from colemantrace.eigen import (MembershipReport, build_k_w, check_membership,
                                lift_to_A, log_transport_iso, phi_alpha,
                                power_exponent, power_exponent_for, rho,
                                rho_inverse, standing_hypotheses,
                                twist_candidate, unit_reduction_check,
                                zero_report)
from colemantrace.errors import ConvergenceError, PreconditionError
from colemantrace.series import Series


def test_zero_report_verdicts(c1):
    K = c1.K
    zero = Series.zero(K, 4, prec=10)
    assert zero_report(zero, 8).verdict == "pass"
    low = Series.zero(K, 4, prec=5)
    rep = zero_report(low, 8)
    assert rep.verdict == "indeterminate" and rep.checked_degree == -1
    bad = Series.from_coeffs(K, [0, 0, 9], D=4)
    rep = zero_report(bad, 8)
    assert rep.verdict == "fail" and rep.witness == 2
    assert zero_report(bad, 2).passed           # 9 = 0 mod 3^2
    d = MembershipReport("pass", 8, 4, kind="E").to_dict()
    assert d["checked_precision"] == 8 and d["checked_degree"] == 4


def test_kernel_elements_are_kind_C(c1):
    for h in c1.trace.kernel(16)[:3]:
        assert check_membership("C", h, None, c1).passed


def test_non_kernel_fails_kind_C(c1):
    rep = check_membership("C", Series.const(c1.K, 1, 8), None, c1)
    assert rep.verdict == "fail"


def test_unknown_kind(c1):
    with pytest.raises(PreconditionError):
        check_membership("B", Series.zero(c1.K, 3), None, c1)


def test_kw_pair(c1_kw, c1):
    kw = c1_kw
    assert kw.w.coeff(0).is_unit()
    assert c1.trace.apply(kw.k) == kw.w.mul_pi(1)


def test_rho_inverse_round_trip(c1_kw, c1):
    kw = c1_kw
    Dint = 48
    h = c1.trace.kernel(16)[2].scale(c1.tower.pi_L).extend(Dint)
    alpha = c1.K.element(9)
    g = rho_inverse(h, alpha, kw, 12)
    assert zero_report(rho(g, alpha, kw) - h, 12, 16).passed
    assert check_membership("E", g, alpha, c1, modulus=6, degree=8).passed


def test_rho_inverse_needs_contraction(c1_kw, c1):
    h = Series.x(c1.K, 8).mul_pi(1)
    with pytest.raises(ConvergenceError):
        rho_inverse(h, c1.K.element(3), c1_kw, 8)


def test_rho_is_identity_for_zero_alpha(c1_kw, c1):
    g = Series.x(c1.K, 8)
    assert rho(g, 0, c1_kw) is g


def test_standing_hypotheses(c1, c3):
    assert standing_hypotheses(c3.tower.pi_L_native, c3) == []
    bad = standing_hypotheses(c1.K.element(3), c1)
    assert any("pi_K^2" in b for b in bad)
    assert any("alpha" in b for b in standing_hypotheses(1, c3))


def test_unit_reduction_check_preconditions(c1, c3):
    s = Series.from_coeffs(c1.K, [3, 1], D=6)
    with pytest.raises(PreconditionError):
        unit_reduction_check(s, 3, c1)
    unit_const = Series.from_coeffs(c3.K, [1, 0, 0, 1], D=9)
    with pytest.raises(PreconditionError, match="pi_K must divide"):
        unit_reduction_check(unit_const, c3.tower.pi_L_native, c3)


def test_unit_reduction_check_accepts_twist(c3):
    s0 = Series.from_coeffs(c3.K, [c3.tower.pi_K, 1, 1], D=4)
    s = twist_candidate(s0, c3, D=12)
    assert [i for i in range(13) if not s.coeff(i).is_zero()] == [0, 3, 6]
    assert unit_reduction_check(s, c3.tower.pi_L_native, c3).passed


def test_twist_needs_ramification(c1):
    with pytest.raises(PreconditionError):
        twist_candidate(Series.x(c1.K, 4), c1)


def test_power_exponent():
    assert power_exponent_for(1, 3) == 0
    assert power_exponent_for(2, 3) == 1
    assert power_exponent_for(4, 3) == 2
    assert power_exponent_for(9, 2) == 4


def test_power_exponent_in_c3(c3):
    assert power_exponent(c3) == 1


def test_phi_alpha_precondition(c3):
    r = Series.x(c3.K, 6).mul_pi(2)
    with pytest.raises(PreconditionError):
        phi_alpha(r, c3.L.element(9), c3)


def test_transport_unknown_direction(c3):
    with pytest.raises(PreconditionError):
        log_transport_iso(Series.x(c3.K, 4), "A-to-C", 1, c3)


def test_lift_rejects_failing_candidate(c3):
    alpha = c3.tower.pi_L_native
    s = Series.from_coeffs(c3.K, [c3.tower.pi_K, 0, 1], D=12)
    rep = unit_reduction_check(s, alpha, c3)
    assert rep.verdict == "fail"
    with pytest.raises(PreconditionError):
        lift_to_A(s, alpha, c3, N_target=4, degree=2)


def test_build_k_w_requires_standard_form(c3):
    assert build_k_w(c3).w.coeff(0).is_unit()
