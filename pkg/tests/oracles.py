"""Independent rational oracles for Q_p-level objects with f = pi x + x^q.

Everything here works over Fraction with dict polynomials and knows nothing
about the library; each homogeneous part is one linear solve
(pi^n - pi) * unknown = known, read off degree by degree.
"""

from fractions import Fraction
from itertools import product


def _bmul(a, b, D):
    out = {}
    for (i, j), u in a.items():
        for (k, l), v in b.items():
            if i + j + k + l <= D:
                key = (i + k, j + l)
                out[key] = out.get(key, 0) + u * v
    return {k: v for k, v in out.items() if v}


def _bpow(a, m, D):
    out = {(0, 0): Fraction(1)}
    for _ in range(m):
        out = _bmul(out, a, D)
    return out


def _umul(a, b, D):
    out = [Fraction(0)] * (D + 1)
    for i, u in enumerate(a):
        if u:
            for j, v in enumerate(b[:D + 1 - i]):
                out[i + j] += u * v
    return out


def _upow(a, m, D):
    out = [Fraction(1)] + [Fraction(0)] * D
    for _ in range(m):
        out = _umul(out, a, D)
    return out


def f_poly(pi, q, D):
    f = [Fraction(0)] * (D + 1)
    f[1] = Fraction(pi)
    if q <= D:
        f[q] += 1
    return f


def group_law(pi, q, D):
    """F(x, y) as {(i, j): Fraction} to total degree D."""
    F = {(1, 0): Fraction(1), (0, 1): Fraction(1)}
    f = f_poly(pi, q, D)
    fx = {(i, 0): c for i, c in enumerate(f) if c}
    fy = {(0, i): c for i, c in enumerate(f) if c}
    for n in range(2, D + 1):
        Gq = _bpow(F, q, n)
        # F_{<n}(f(x), f(y)) at degree n
        B = {}
        for (i, j), c in F.items():
            t = _bmul(_bpow(fx, i, n), _bpow(fy, j, n), n)
            for k, v in t.items():
                if sum(k) == n:
                    B[k] = B.get(k, 0) + c * v
        for i in range(n + 1):
            k = (i, n - i)
            val = (Gq.get(k, 0) - B.get(k, 0)) / (pi ** n - pi)
            if val:
                F[k] = val
    return F


def endomorphism(a, pi, q, D):
    """[a](x) as a coefficient list."""
    e = [Fraction(0)] * (D + 1)
    e[1] = Fraction(a)
    f = f_poly(pi, q, D)
    for n in range(2, D + 1):
        known = _upow(e, q, n)[n]
        rhs = sum(e[m] * _upow(f, m, n)[n] for m in range(1, n))
        e[n] = (known - rhs) / (pi ** n - pi)
    return e


def logarithm(pi, q, D):
    """log(x) with log(f(x)) = pi log(x), log'(0) = 1."""
    l = [Fraction(0)] * (D + 1)
    l[1] = Fraction(1)
    f = f_poly(pi, q, D)
    for n in range(2, D + 1):
        s = sum(l[m] * _upow(f, m, n)[n] for m in range(1, n))
        l[n] = -s / (pi ** n - pi)
    return l


def power_sums(e, J):
    """Newton's identities for X^3 - e1 X^2 + e2 X - e3 with e_k integer
    polynomials in y (lists, constant first); returns p_0 .. p_J."""
    def add(a, b):
        n = max(len(a), len(b))
        return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
                for i in range(n)]

    def mul(a, b):
        out = [0] * (len(a) + len(b) - 1)
        for i, u in enumerate(a):
            for j, v in enumerate(b):
                out[i + j] += u * v
        return out

    e1, e2, e3 = e
    p = [[3], e1, add(mul(e1, e1), [-2 * c for c in e2])]
    for k in range(3, J + 1):
        t = add(mul(e1, p[k - 1]), [-c for c in mul(e2, p[k - 2])])
        p.append(add(t, mul(e3, p[k - 3])))
    return p


def trace_of_monomials_c1(J):
    """L(x^j) in C1: power sums of the roots of X^3 + 3X - y."""
    return power_sums(([0], [3], [0, 1]), J)
