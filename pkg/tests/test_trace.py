import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from colemantrace.acceptance import random_series
from colemantrace.errors import PreconditionError
from colemantrace.series import Series
from colemantrace.trace import kernel_basis, trace_operator, trace_preimage


def monomial(ring, j, D):
    return Series.from_coeffs(ring, [0] * j + [1], D=D)


def test_monomials_match_newton_identities(c1):
    D = 16
    want = oracles.trace_of_monomials_c1(D)
    K = c1.K
    for j in range(D + 1):
        got = c1.trace.apply(monomial(K, j, D))
        coeffs = want[j] + [0] * (D + 1 - len(want[j]))
        assert got == Series.from_coeffs(K, coeffs[:D + 1], D=D), j


def test_matrix_columns_agree_with_apply(c1):
    M = c1.trace.matrix(12, 4)
    for j in (0, 2, 3, 7, 12):
        col = M.column(c1.K, j)
        assert col == c1.trace.apply(monomial(c1.K, j, 12)).truncate(col.D)


def test_constants(c1, c3):
    for ctx in (c1, c3):
        for c in (1, 7):
            got = ctx.trace.apply(Series.const(ctx.K, c, 8))
            assert got == Series.const(ctx.K, ctx.q_K * c, 8)


def test_minus_half_x_squared(c1):
    K = c1.K
    h = Series.from_coeffs(K, [0, 0, -(K.element(2).inverse())], D=8)
    assert c1.trace.apply(h).coeff(0) == K.element(3)


@given(st.integers(0, 2 ** 32))
def test_image_divisible_by_pi_K(seed):
    from conftest import context
    ctx = context("C3", 40, 16, 8)
    rng = np.random.default_rng(seed)
    f = random_series(ctx.K, 10, rng)
    Lf = ctx.trace.apply(f)
    assert not ((Lf.val() < 1) & (Lf.p >= 1)).any()


@given(st.integers(0, 2 ** 32))
def test_linearity(seed):
    from conftest import context
    ctx = context("C1", 40, 16, 8)
    rng = np.random.default_rng(seed)
    K = ctx.K
    f, g = random_series(K, 12, rng), random_series(K, 12, rng)
    a, b = K.element(int(rng.integers(1, 50))), K.element(int(rng.integers(1, 50)))
    L = ctx.trace.apply
    assert L(f.scale(a) + g.scale(b)) == L(f).scale(a) + L(g).scale(b)


def test_root_sum_descends(c3):
    A = c3.algebra
    A.check_roots()
    f = Series.from_coeffs(c3.K, [1, 2, 3, 4, 5], D=6)
    h = A.descend(A.root_sum(f, 6))
    assert h.ring is c3.K


def test_preimage_round_trip(c1, rng):
    D = 16
    K = c1.K
    for _ in range(3):
        s = random_series(K, D, rng, val=1)
        g = trace_preimage(c1.G_K, c1.algebra, s)
        back = c1.trace.apply(g).truncate(D)
        d = back - s
        assert (d.val() >= d.p).all()
        assert int(d.p.min()) >= c1.N


def test_preimage_requires_divisibility(c1):
    with pytest.raises(PreconditionError):
        c1.trace.preimage(Series.const(c1.K, 1, 8))


def test_kernel_basis(c1, c3):
    for ctx in (c1, c3):
        ker = kernel_basis(ctx.G_K, ctx.algebra, 16)
        assert len(ker) > 0
        for h in ker[:4]:
            Lh = ctx.trace.apply(h)
            assert (Lh.val() >= np.minimum(Lh.p, 12)).all()


def test_kernel_dimension_c1(c1):
    assert len(c1.trace.kernel(32)) == 22


def test_functional_wrapper(c1):
    f = Series.from_coeffs(c1.K, [0, 0, 5], D=6)
    assert trace_operator(c1.G_K, c1.algebra, f) == c1.trace.apply(f)
