import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from colemantrace.errors import (DivergenceError, InsufficientPrecisionError,
                                 PreconditionError)
from colemantrace.localring import tower_build
from colemantrace.series import (BiSeries, Series, bi_outer, bi_substitute,
                                 compose, compose_bi, congruent_mod,
                                 desubstitute)

P = 20
Zp = tower_build(3, None, None, default_prec=P).O_K
K = tower_build(3, [-3, 0, 1], [[0, -1], 0, 1], default_prec=16).O_K
MOD = 3 ** P


def int_lists(D, lo=0, hi=3 ** 5):
    return st.lists(st.integers(lo, hi), min_size=D + 1, max_size=D + 1)


def zp_series(coeffs, D=None):
    return Series.from_coeffs(Zp, coeffs, D=D)


def as_ints(s):
    return [int(x[0]) % MOD for x in s.c]


@given(int_lists(6), int_lists(6))
def test_product_matches_integer_convolution(a, b):
    D = 12
    got = zp_series(a, D) * zp_series(b, D)
    want = [0] * (D + 1)
    for i, u in enumerate(a):
        for j, v in enumerate(b):
            want[i + j] += u * v
    assert as_ints(got) == [w % MOD for w in want]
    assert got.poly


@given(int_lists(8), int_lists(8))
def test_truncated_product_is_not_poly(a, b):
    a[-1] = b[-1] = 1
    got = zp_series(a) * zp_series(b)
    assert got.D == 8 and not got.poly


@given(int_lists(5), int_lists(5, hi=80), int_lists(5, hi=80))
def test_compose_associative(f, g, h):
    D = 10
    g[0] = h[0] = 0
    g[1] = 3 * g[1]
    fs, gs, hs = zp_series(f, D), zp_series(g, D), zp_series(h, D)
    left = compose(compose(fs, gs), hs)
    right = compose(fs, compose(gs, hs))
    assert left == right


@given(int_lists(6, hi=200))
def test_desubstitute_inverts_substitution(g):
    D = 10
    gs = zp_series(g, D)
    sigma = zp_series([0, 3, 0, 1], D)
    h = compose(gs, sigma)
    back = desubstitute(h, sigma)
    assert back == gs
    # loss n * v(sigma_1) from the division, plus the carry of earlier
    # coefficients' uncertainty through sigma^m, at most (n - 1) // (q - 1)
    for n in range(1, D + 1):
        assert back.p[n] >= P - n - (n - 1) // 2


def test_desubstitute_certificate_detects_non_image():
    sigma = zp_series([0, 3, 0, 1], 8)
    h = zp_series([0, 1], 8)           # x is not g([3](x)) with g integral
    with pytest.raises(Exception):
        desubstitute(h, sigma)


@given(int_lists(6))
def test_inverse(a):
    a[0] = 3 * a[0] + 1
    s = zp_series(a, 10)
    assert s * s.inverse() == Series.const(Zp, 1, 10)


def test_compose_rejects_unit_constant_into_series():
    f = Series(Zp, np.ones((5, 1), dtype=object), P)
    g = zp_series([1, 1], 4)
    with pytest.raises(DivergenceError):
        compose(f, g)


@given(int_lists(5), int_lists(5), int_lists(5))
def test_congruence_is_equivalence(a, b, c):
    fa, fb, fc = (zp_series(x, 6) for x in (a, b, c))
    m = 2
    assert congruent_mod(fa, fa, m)
    assert bool(congruent_mod(fa, fb, m)) == bool(congruent_mod(fb, fa, m))
    if congruent_mod(fa, fb, m) and congruent_mod(fb, fc, m):
        assert congruent_mod(fa, fc, m)


def test_congruence_needs_precision():
    f = zp_series([1, 2, 3]).with_prec(2)
    with pytest.raises(InsufficientPrecisionError):
        congruent_mod(f, f, 5)
    assert congruent_mod(f, f, math.inf)


def test_derivative_and_antiderivative():
    f = zp_series([0, 1, 3, 9, 2], 6)
    F = f.antiderivative()
    assert F.shift >= 0
    # d/dx of x^3 is 3x^2 and the antiderivative of x^2 is x^3/3
    d = zp_series([0, 0, 0, 1], 5).derivative()
    assert as_ints(d)[:3] == [0, 0, 3]
    integ = zp_series([0, 0, 1], 5).antiderivative()
    assert integ.shift == 1 and as_ints(integ.num)[3] == 1


def test_extend_only_for_polynomials():
    s = zp_series([1, 2], 3) * zp_series([1, 2, 3, 4], 3)
    with pytest.raises(PreconditionError):
        s.extend(6)


def test_eisenstein_level_series():
    t = K.uniformizer
    f = Series.from_coeffs(K, [0, t, 0, 1], D=9)
    x = Series.x(K, 9)
    assert compose(f, x) == f
    # t^4 = 3 * unit, so f(x)^4 starts with t^4 x^4
    assert (f ** 4).coeff(4) == t ** 4


def test_bivariate_helpers():
    a = zp_series([0, 1, 2], 5)
    b = zp_series([0, 3], 5)
    F = bi_outer(a, b, 5)
    assert F.coeff(1, 1) == Zp.element(3) and F.coeff(2, 1) == Zp.element(6)
    G = BiSeries.from_dict(Zp, {(1, 0): 1, (0, 1): 1}, 5)   # x + y
    x = zp_series([0, 1], 5)
    assert bi_substitute(G, a, x) == a + x
    sq = compose_bi(zp_series([0, 0, 1], 5), G)             # (x + y)^2
    assert sq.coeff(1, 1) == Zp.element(2)
    assert sq.coeff(2, 0) == Zp.element(1)
