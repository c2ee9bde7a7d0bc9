import pytest
from hypothesis import given, strategies as st

from colemantrace.errors import DivisibilityError, NonUnitError, TowerError
from colemantrace.localring import (AtLeast, residue_representatives,
                                    tower_build)

C3_TOWER = tower_build(3, [-3, 0, 1], [[0, -1], 0, 1], default_prec=24)
K = C3_TOWER.O_K
L = C3_TOWER.O_L


def elements(ring, max_digits=6):
    return st.lists(st.integers(0, ring.p ** max_digits), min_size=ring.n,
                    max_size=ring.n).map(ring.element)


def test_c1_tower_shape():
    t = tower_build(3, None, None, default_prec=16)
    assert (t.e_KL, t.f_KL, t.q_L, t.q_K) == (1, 1, 3, 3)
    assert t.O_L is t.O_K
    assert t.pi_K.valuation() == 1


def test_c3_tower_shape():
    t = C3_TOWER
    assert (t.e_KL, t.f_KL, t.q_L, t.q_K) == (2, 1, 3, 3)
    assert (L.n, K.n) == (2, 4)
    # pi_L = pi_K^2 up to a unit and p = pi_K^4 up to a unit
    assert t.pi_L.valuation() == 2
    assert K.element(3).valuation() == 4
    assert t.O_L.cap == 24 // 2 + 1


@pytest.mark.parametrize("p, gL, gK, msg", [
    (4, None, None, "not prime"),
    (3, [1, 0, 1], [-3, 0, 1], None),            # unramified then Eisenstein
    (3, [1, 0, 1], [[0, -1], 0, 1], "Eisenstein"),
    (3, [-9, 0, 1], None, "Eisenstein"),
])
def test_tower_validation(p, gL, gK, msg):
    if msg is None:
        t = tower_build(p, gL, gK, default_prec=8)
        assert (t.q_L, t.e_KL) == (9, 2)
        return
    with pytest.raises(TowerError):
        tower_build(p, gL, gK, default_prec=8)


def test_negative_precision_rejected():
    with pytest.raises(TowerError):
        tower_build(3, None, None, default_prec=-1)


@given(elements(K), elements(K), elements(K))
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a - a == K.zero()


@given(elements(K), elements(K))
def test_valuation_is_multiplicative(a, b):
    if a.is_zero() or b.is_zero():
        return
    va, vb = a.valuation(), b.valuation()
    if isinstance(va, AtLeast) or isinstance(vb, AtLeast):
        return
    v = (a * b).valuation()
    if va + vb < K.cap:
        assert v == va + vb


@given(elements(K))
def test_unit_inverse(a):
    if a.is_unit():
        assert a * a.inverse() == K.one()
    else:
        with pytest.raises(NonUnitError):
            a.inverse()


@given(elements(K))
def test_div_pi_round_trip(a):
    b = a * K.uniformizer
    assert b.div_pi(1) == a.lift_prec(b.prec - 1) or b.div_pi(1) * K.uniformizer == b


def test_div_pi_rejects_units():
    with pytest.raises(DivisibilityError):
        K.one().div_pi(1)


@given(elements(L))
def test_embed_project_round_trip(a):
    assert a.embed(K).project(L) == a


def test_project_rejects_non_base():
    from colemantrace.errors import DescentError
    with pytest.raises(DescentError):
        C3_TOWER.pi_K.project(L)


def test_residue_representatives():
    reps = residue_representatives(C3_TOWER, "K")
    assert len(reps) == C3_TOWER.q_K
    assert reps[0].is_zero() and reps[1] == K.one()
    reps9 = residue_representatives(tower_build(3, [1, 0, 1], None, 8), "L")
    assert len(reps9) == 9
