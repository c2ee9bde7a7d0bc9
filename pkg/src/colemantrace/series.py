"""Truncated power series with per-coefficient absolute precision.

A ``Series`` stores coefficients 0..D as a ``(D+1, n)`` object array of
canonical coordinates plus a ``(D+1,)`` precision array.  The flag
``poly`` records that every coefficient beyond D is known to be zero; it
decides whether compositions with a non-topologically-nilpotent inner
series are allowed and whether truncation loses information.

``FracSeries`` represents num / pi^shift for fraction-field coefficients
(logarithms and exponentials).  ``BiSeries`` is a total-degree truncated
bivariate series.
"""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (DivergenceError, DivisibilityError,
                     InsufficientPrecisionError, NotInImageError,
                     PreconditionError, RingMismatchError)
from .localring import AtLeast, LocalRing, RingElement, as_prec

log = logging.getLogger(__name__)


@functools.lru_cache(maxsize=512)
def _pairs(la, lb, D):
    i, j = np.meshgrid(np.arange(la), np.arange(lb), indexing="ij")
    mask = (i + j) <= D
    return i[mask], j[mask]


def conv(ring: LocalRing, A, pa, va, B, pb, vb, D):
    """Cauchy product of coefficient arrays truncated at degree D."""
    la, lb = len(A), len(B)
    I, J = _pairs(la, lb, D)
    prec = np.full(D + 1, ring.cap, dtype=np.int64)
    if len(I):
        M = np.minimum(pa[I] + vb[J], pb[J] + va[I])
        np.minimum.at(prec, I + J, M)
    n = ring.n
    nzA = np.any(A != 0, axis=-1)
    nzB = np.any(B != 0, axis=-1)
    if n == 1:
        acc = np.zeros(D + 1, dtype=object)
        b = B[:, 0]
        for i in np.nonzero(nzA)[0]:
            L = min(lb, D + 1 - i)
            if L <= 0:
                continue
            acc[i:i + L] += A[i, 0] * b[:L]
        out = acc[:, None]
    else:
        acc = np.zeros((D + 1, n, n), dtype=object)
        for i in np.nonzero(nzA)[0]:
            L = min(lb, D + 1 - i)
            if L <= 0:
                continue
            acc[i:i + L] += A[i][:, None] * B[:L, None, :]
        out = ring.contract(acc.reshape(D + 1, n * n))
    prec = ring.clamp(prec)
    overflow = False
    if nzA.any() and nzB.any():
        overflow = (np.nonzero(nzA)[0][-1] + np.nonzero(nzB)[0][-1]) > D
    return ring.reduce(out, prec), prec, overflow


def _degree(c):
    nz = np.nonzero(np.any(c != 0, axis=-1))[0]
    return int(nz[-1]) if len(nz) else -1


class Series:
    """Univariate power series truncated at degree D."""

    __slots__ = ("ring", "c", "p", "poly", "truncated", "_v")

    def __init__(self, ring: LocalRing, coords, prec, poly=False,
                 truncated=False, canonical=True):
        self.ring = ring
        c = np.asarray(coords, dtype=object)
        if c.ndim == 1:
            c = c.reshape(-1, ring.n)
        p = ring.clamp(np.broadcast_to(np.asarray(prec, dtype=np.int64),
                                       (c.shape[0],)).copy())
        if not canonical:
            c = ring.reduce(c, p)
        self.c = c
        self.p = p
        self.poly = bool(poly)
        self.truncated = bool(truncated)
        self._v = None

    # -------------------------------------------------------------- build
    @classmethod
    def from_coeffs(cls, ring, coeffs, D=None, prec=None, poly=True):
        """Series from ints, coordinate lists or RingElements."""
        coeffs = list(coeffs)
        D = len(coeffs) - 1 if D is None else D
        if len(coeffs) > D + 1:
            if any(_nonzero_input(x) for x in coeffs[D + 1:]):
                log.warning("truncating input of degree %d at D=%d",
                            len(coeffs) - 1, D)
                poly = False
            coeffs = coeffs[:D + 1]
        P = ring.cap if prec is None else min(int(prec), ring.cap)
        c = np.zeros((D + 1, ring.n), dtype=object)
        p = np.full(D + 1, P, dtype=np.int64)
        for i, x in enumerate(coeffs):
            if isinstance(x, RingElement):
                x = ring.element(x)
                c[i] = x.c
                p[i] = min(P, x.prec)
            else:
                c[i] = ring._exact_coords(x)
        return cls(ring, c, p, poly=poly, canonical=False)

    @classmethod
    def zero(cls, ring, D, prec=None):
        P = ring.cap if prec is None else prec
        return cls(ring, np.zeros((D + 1, ring.n), dtype=object), P, poly=True)

    @classmethod
    def x(cls, ring, D):
        return cls.from_coeffs(ring, [0, 1], D=D)

    @classmethod
    def const(cls, ring, value, D):
        return cls.from_coeffs(ring, [value], D=D)

    # ------------------------------------------------------------ access
    @property
    def D(self):
        return self.c.shape[0] - 1

    def coeff(self, i) -> RingElement:
        if i > self.D:
            raise IndexError(f"degree {i} exceeds cap {self.D}")
        return RingElement(self.ring, self.c[i], int(self.p[i]))

    def __getitem__(self, i):
        return self.coeff(i)

    def coeffs(self):
        return [self.coeff(i) for i in range(self.D + 1)]

    def val(self):
        if self._v is None:
            self._v = self.ring.val(self.c, self.p)
        return self._v

    def min_val(self, upto=None):
        v = self.val() if upto is None else self.val()[:upto + 1]
        return int(v.min()) if len(v) else 0

    def degree(self):
        return _degree(self.c)

    def is_zero(self):
        return not np.any(self.c != 0)

    def achieved(self, m):
        """Largest D' with every coefficient up to D' known mod pi^m."""
        bad = np.nonzero(self.p < m)[0]
        return int(bad[0]) - 1 if len(bad) else self.D

    # --------------------------------------------------------- plumbing
    def _check(self, other):
        if not isinstance(other, Series):
            raise TypeError(f"expected Series, got {type(other).__name__}")
        if other.ring is not self.ring:
            raise RingMismatchError(
                f"series over {self.ring.name} and {other.ring.name}")

    def _align(self, other):
        self._check(other)
        if self.D == other.D:
            return self, other
        D = min(self.D, other.D)
        log.warning("mixed degree caps %d and %d; truncating to %d",
                    self.D, other.D, D)
        return self.truncate(D), other.truncate(D)

    def truncate(self, D):
        if D >= self.D:
            return self
        poly = self.poly and self.degree() <= D
        return Series(self.ring, self.c[:D + 1], self.p[:D + 1], poly=poly,
                      truncated=not poly and self.poly)

    def extend(self, D):
        """Pad a polynomial with zero coefficients up to degree D."""
        if D <= self.D:
            return self.truncate(D)
        if not self.poly:
            raise PreconditionError("only polynomials can be padded")
        c = np.zeros((D + 1, self.ring.n), dtype=object)
        c[:self.D + 1] = self.c
        p = np.full(D + 1, self.ring.cap, dtype=np.int64)
        p[:self.D + 1] = self.p
        return Series(self.ring, c, p, poly=True)

    def with_prec(self, prec):
        """Lower every coefficient's precision to at most ``prec``."""
        P = np.minimum(self.p, np.asarray(prec, dtype=np.int64))
        return Series(self.ring, self.c, P, poly=self.poly, canonical=False)

    def embed(self, ring: LocalRing):
        if ring is self.ring:
            return self
        c, p = ring.embed_from(self.ring, self.c, self.p)
        return Series(ring, c, p, poly=self.poly)

    def project(self, ring: LocalRing, strict=True):
        """Descend to a subring; returns (series, ok-mask)."""
        c, p, ok = self.ring.project_to(ring, self.c, self.p)
        return Series(ring, c, p, poly=self.poly), ok

    # ------------------------------------------------------- arithmetic
    def __add__(self, other):
        if isinstance(other, (int, RingElement)):
            other = Series.const(self.ring, other, self.D)
        a, b = self._align(other)
        c, p = a.ring.add(a.c, a.p, b.c, b.p)
        return Series(a.ring, c, p, poly=a.poly and b.poly)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, RingElement)):
            other = Series.const(self.ring, other, self.D)
        a, b = self._align(other)
        c, p = a.ring.sub(a.c, a.p, b.c, b.p)
        return Series(a.ring, c, p, poly=a.poly and b.poly)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        c, p = self.ring.neg(self.c, self.p)
        return Series(self.ring, c, p, poly=self.poly)

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            other = self.ring.element(int(other))
        if isinstance(other, RingElement):
            return self.scale(other)
        if not isinstance(other, Series):
            return NotImplemented
        a, b = self._align(other)
        c, p, overflow = conv(a.ring, a.c, a.p, a.val(), b.c, b.p, b.val(), a.D)
        poly = a.poly and b.poly and not overflow
        return Series(a.ring, c, p, poly=poly,
                      truncated=overflow and a.poly and b.poly)

    __rmul__ = __mul__

    def mul_full(self, other, D):
        """Cauchy product truncated at an explicit degree D."""
        self._check(other)
        c, p, overflow = conv(self.ring, self.c, self.p, self.val(),
                              other.c, other.p, other.val(), D)
        poly = self.poly and other.poly and not overflow
        return Series(self.ring, c, p, poly=poly)

    def scale(self, a: RingElement):
        a = self.ring.element(a) if a.ring is not self.ring else a
        c, p = self.ring.mul(self.c, self.p, np.broadcast_to(a.c, self.c.shape),
                             np.full(self.D + 1, a.prec, dtype=np.int64),
                             va=self.val(),
                             vb=np.full(self.D + 1, int(a.valuation()),
                                        dtype=np.int64))
        return Series(self.ring, c, p, poly=self.poly)

    def __pow__(self, k):
        out = Series.const(self.ring, 1, self.D)
        for _ in range(int(k)):
            out = out * self
        return out

    def div_pi(self, m):
        """Exact division of every coefficient by pi^m."""
        try:
            c, p = self.ring.div_pi(self.c, self.p, int(m))
        except DivisibilityError as exc:
            raise DivisibilityError(str(exc) + f" (degree {exc.degree})",
                                    degree=exc.degree) from None
        return Series(self.ring, c, p, poly=self.poly)

    def mul_pi(self, m):
        return self.scale(self.ring.uniformizer ** m)

    def shift(self, k):
        """Multiply by x^k, keeping the degree cap."""
        c = np.zeros_like(self.c)
        p = np.full(self.D + 1, self.ring.cap, dtype=np.int64)
        if k <= self.D:
            c[k:] = self.c[:self.D + 1 - k]
            p[k:] = self.p[:self.D + 1 - k]
        poly = self.poly and self.degree() + k <= self.D
        return Series(self.ring, c, p, poly=poly)

    def inverse(self):
        """Multiplicative inverse of a series with unit constant term."""
        a0 = self.coeff(0)
        if not a0.is_unit():
            raise PreconditionError("series inverse needs a unit constant term")
        y = Series.const(self.ring, a0.inverse(), self.D)
        two = Series.const(self.ring, 2, self.D)
        k = 1
        while k <= self.D:
            y = y * (two - self * y)
            k *= 2
        return Series(self.ring, y.c, y.p, poly=False)

    def derivative(self):
        D = self.D
        c = np.zeros_like(self.c)
        p = np.full(D + 1, self.ring.cap, dtype=np.int64)
        if D >= 1:
            ks = np.arange(1, D + 1)
            kk = np.array([self.ring.const(int(k)) for k in ks], dtype=object)
            c[:D], p[:D] = self.ring.mul(self.c[1:], self.p[1:], kk,
                                         np.full(D, self.ring.cap, dtype=np.int64))
        # the top coefficient is unknown unless the input is a polynomial
        if not self.poly:
            p[D] = 0
            c[D] = 0
        return Series(self.ring, c, p, poly=self.poly)

    def antiderivative(self):
        return FracSeries.antiderivative(self)

    # ------------------------------------------------------ composition
    def compose(self, g: "Series") -> "Series":
        return compose(self, g)

    def __call__(self, x):
        if isinstance(x, Series):
            return compose(self, x)
        return evaluate(self, x)

    # --------------------------------------------------------- equality
    def __eq__(self, other):
        if not isinstance(other, Series) or other.ring is not self.ring:
            return False
        a, b = self, other
        D = min(a.D, b.D)
        P = np.minimum(a.p[:D + 1], b.p[:D + 1])
        return bool(np.all(self.ring.reduce(a.c[:D + 1], P)
                           == self.ring.reduce(b.c[:D + 1], P)))

    __hash__ = None

    def __repr__(self):
        terms = []
        for i in range(self.D + 1):
            if np.any(self.c[i] != 0):
                el = repr(self.coeff(i)).split(" (mod")[0]
                mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
                terms.append(f"({el}){'*' + mono if mono else ''}")
        body = " + ".join(terms) if terms else "0"
        return f"Series[{self.ring.name}, D={self.D}]({body})"


def _nonzero_input(x):
    if isinstance(x, RingElement):
        return not x.is_zero()
    if isinstance(x, (list, tuple)):
        return any(_nonzero_input(y) for y in x)
    return x != 0


def evaluate(f: Series, x: RingElement) -> RingElement:
    """Evaluate f at a ring element (coefficients embedded as needed)."""
    ring = x.ring
    if f.ring is not ring:
        f = f.embed(ring)
    v = int(x.valuation())
    if v == 0 and not f.poly:
        raise DivergenceError("evaluating a non-polynomial series at a unit")
    acc = f.coeff(f.D)
    for k in range(f.D - 1, -1, -1):
        acc = acc * x + f.coeff(k)
    if not f.poly:
        acc = acc.lift_prec(min(acc.prec, (f.D + 1) * v))
    return acc


def compose(f: Series, g: Series) -> Series:
    """f(g(x)) truncated at g's degree cap, with tail-aware precision."""
    if f.ring is not g.ring:
        raise RingMismatchError(f"compose over {f.ring.name} and {g.ring.name}")
    ring = g.ring
    D = g.D
    v0 = int(g.val()[0])
    if v0 == 0 and not f.poly:
        raise DivergenceError("inner series has a unit constant term and the "
                              "outer series is not a polynomial")
    fd = f.degree() if f.poly else f.D
    if v0 == 0:
        M = fd
    else:
        M = min(fd, D + -(-ring.cap // v0))
    M = max(M, 0)
    acc = Series.const(ring, f.coeff(M), D) if M <= f.D else Series.zero(ring, D)
    for k in range(M - 1, -1, -1):
        acc = acc * g
        c, p = ring.add(acc.c[0], acc.p[0], f.c[k], f.p[k])
        cc = acc.c.copy()
        pp = acc.p.copy()
        cc[0], pp[0] = c, p
        acc = Series(ring, cc, pp)
    p = acc.p.copy()
    if not f.poly:
        d = np.arange(D + 1)
        bound = np.maximum(f.D + 1 - d, 0) * v0
        p = np.minimum(p, bound)
    poly = f.poly and g.poly and (max(fd, 0) * max(g.degree(), 0) <= D)
    return Series(ring, acc.c, p, poly=poly, canonical=False)


# ----------------------------------------------------------------------
# fraction-field series

class FracSeries:
    """Series with coefficients num[i] / pi^shift in the fraction field."""

    __slots__ = ("num", "shift")

    def __init__(self, num: Series, shift: int = 0):
        self.num = num
        self.shift = int(shift)

    @property
    def ring(self):
        return self.num.ring

    @property
    def D(self):
        return self.num.D

    @classmethod
    def from_series(cls, s: Series):
        return cls(s, 0)

    @classmethod
    def antiderivative(cls, f: Series):
        """Termwise integral with denominators recorded in the shift."""
        ring = f.ring
        D = f.D
        vals = [int(ring.element(k).valuation()) for k in range(1, D + 1)]
        s = max(vals) if vals else 0
        c = np.zeros((D + 1, ring.n), dtype=object)
        p = np.full(D + 1, ring.cap, dtype=np.int64)
        pi = ring.uniformizer
        for k in range(1, D + 1):
            kk = ring.element(k)
            vk = int(kk.valuation())
            unit = kk.div_pi(vk)
            factor = (pi ** (s - vk)) * unit.inverse()
            t = f.coeff(k - 1) * factor
            c[k], p[k] = t.c, t.prec
        return cls(Series(ring, c, p, poly=f.poly), s).normalize()

    def normalize(self):
        if self.shift <= 0:
            return self
        v = self.num.val()
        k = min(self.shift, int(v.min()) if len(v) else 0)
        if k <= 0:
            return self
        return FracSeries(self.num.div_pi(k), self.shift - k)

    def _common(self, other):
        s = max(self.shift, other.shift)
        a = self.num if self.shift == s else self.num.mul_pi(s - self.shift)
        b = other.num if other.shift == s else other.num.mul_pi(s - other.shift)
        return a, b, s

    def _as_frac(self, other):
        if isinstance(other, FracSeries):
            return other
        if isinstance(other, Series):
            return FracSeries(other, 0)
        if isinstance(other, (int, RingElement)):
            return FracSeries(Series.const(self.ring, other, self.D), 0)
        return NotImplemented

    def __add__(self, other):
        other = self._as_frac(other)
        a, b, s = self._common(other)
        return FracSeries(a + b, s).normalize()

    __radd__ = __add__

    def __sub__(self, other):
        other = self._as_frac(other)
        a, b, s = self._common(other)
        return FracSeries(a - b, s).normalize()

    def __neg__(self):
        return FracSeries(-self.num, self.shift)

    def __mul__(self, other):
        if isinstance(other, RingElement):
            return FracSeries(self.num.scale(other), self.shift).normalize()
        other = self._as_frac(other)
        return FracSeries(self.num * other.num,
                          self.shift + other.shift).normalize()

    __rmul__ = __mul__

    def truncate(self, D):
        return FracSeries(self.num.truncate(D), self.shift)

    def compose(self, g):
        """self(g) for an inner series with zero constant term."""
        g = g if isinstance(g, FracSeries) else FracSeries(g, 0)
        if int(g.num.val()[0]) < g.num.p[0]:
            raise PreconditionError("formal composition needs g(0) = 0")
        D = g.D
        M = min(self.D, D)
        acc = FracSeries(Series.const(self.ring, self.num.coeff(M), D), self.shift)
        for k in range(M - 1, -1, -1):
            acc = acc * g
            ck = FracSeries(Series.const(self.ring, self.num.coeff(k), D),
                            self.shift)
            acc = acc + ck
        return acc

    def coeff_val(self, i):
        v = self.num.coeff(i).valuation()
        if isinstance(v, AtLeast):
            return AtLeast(int(v) - self.shift)
        return v - self.shift

    def value_prec(self):
        return self.num.p - self.shift

    def to_series(self):
        """Integral series, raising DivisibilityError if not integral."""
        if self.shift == 0:
            return self.num
        return self.num.div_pi(self.shift)

    def embed(self, ring: LocalRing):
        """Embed into an extension ring, converting the pi-shift."""
        if ring is self.ring:
            return self
        src = self.ring
        num = self.num.embed(ring)
        pi_src = src.uniformizer.embed(ring)
        m = int(pi_src.valuation())
        unit = pi_src.div_pi(m)
        # num / pi_src^s = num * unit^-s / pi^(m s)
        uinv = unit.inverse() ** self.shift
        return FracSeries(num.scale(uinv), m * self.shift).normalize()

    def __repr__(self):
        return f"FracSeries(shift={self.shift}, num={self.num!r})"


# ----------------------------------------------------------------------
# bivariate series

class BiSeries:
    """Bivariate series truncated at total degree D."""

    __slots__ = ("ring", "c", "p", "poly")

    def __init__(self, ring, coords, prec, poly=False):
        self.ring = ring
        self.c = np.asarray(coords, dtype=object)
        self.p = ring.clamp(np.asarray(prec, dtype=np.int64))
        self.poly = poly

    @property
    def D(self):
        return self.c.shape[0] - 1

    @classmethod
    def zero(cls, ring, D):
        return cls(ring, np.zeros((D + 1, D + 1, ring.n), dtype=object),
                   np.full((D + 1, D + 1), ring.cap, dtype=np.int64), poly=True)

    @classmethod
    def from_dict(cls, ring, terms, D):
        out = cls.zero(ring, D)
        for (i, j), v in terms.items():
            el = ring.element(v)
            out.c[i, j] = el.c
            out.p[i, j] = el.prec
        return out

    @classmethod
    def from_components(cls, ring, comps, precs, D=None, poly=False):
        """Build from homogeneous components comps[d][i] = coeff of x^i y^(d-i)."""
        D = len(comps) - 1 if D is None else D
        out = cls.zero(ring, D)
        for d in range(min(D, len(comps) - 1) + 1):
            for i in range(d + 1):
                out.c[i, d - i] = comps[d][i]
                out.p[i, d - i] = precs[d][i]
        out.poly = poly
        return out

    @classmethod
    def x(cls, ring, D):
        return cls.from_dict(ring, {(1, 0): 1}, D)

    @classmethod
    def y(cls, ring, D):
        return cls.from_dict(ring, {(0, 1): 1}, D)

    def coeff(self, i, j):
        return RingElement(self.ring, self.c[i, j], int(self.p[i, j]))

    def mask(self):
        i, j = np.meshgrid(np.arange(self.D + 1), np.arange(self.D + 1),
                           indexing="ij")
        return (i + j) <= self.D

    def truncate(self, D):
        if D >= self.D:
            return self
        out = BiSeries(self.ring, self.c[:D + 1, :D + 1].copy(),
                       self.p[:D + 1, :D + 1].copy(), poly=False)
        return out

    def swap(self):
        return BiSeries(self.ring, self.c.transpose(1, 0, 2).copy(),
                        self.p.T.copy(), poly=self.poly)

    def _align(self, other):
        if other.ring is not self.ring:
            raise RingMismatchError("bivariate series over different rings")
        D = min(self.D, other.D)
        return self.truncate(D), other.truncate(D)

    def __add__(self, other):
        a, b = self._align(other)
        c, p = a.ring.add(a.c, a.p, b.c, b.p)
        return BiSeries(a.ring, c, p, poly=a.poly and b.poly)

    def __sub__(self, other):
        a, b = self._align(other)
        c, p = a.ring.sub(a.c, a.p, b.c, b.p)
        return BiSeries(a.ring, c, p, poly=a.poly and b.poly)

    def __neg__(self):
        c, p = self.ring.neg(self.c, self.p)
        return BiSeries(self.ring, c, p, poly=self.poly)

    def scale(self, a: RingElement):
        D = self.D
        shape = self.p.shape
        c, p = self.ring.mul(self.c, self.p,
                             np.broadcast_to(a.c, self.c.shape),
                             np.full(shape, a.prec, dtype=np.int64))
        return BiSeries(self.ring, c, p, poly=self.poly)

    def __mul__(self, other):
        if isinstance(other, RingElement):
            return self.scale(other)
        a, b = self._align(other)
        ring, D = a.ring, a.D
        va, vb = ring.val(a.c, a.p), ring.val(b.c, b.p)
        m = a.mask()
        out_c = np.zeros_like(a.c)
        out_p = np.full(a.p.shape, ring.cap, dtype=np.int64)
        # iterate over monomials of a; shift b and accumulate
        for i, j in zip(*np.nonzero(m)):
            ai = a.c[i, j]
            Di = D - i - j
            sub_c = b.c[:Di + 1, :Di + 1]
            sub_mask = m[:Di + 1, :Di + 1]
            pr = np.where(sub_mask,
                          np.minimum(a.p[i, j] + vb[:Di + 1, :Di + 1],
                                     b.p[:Di + 1, :Di + 1] + va[i, j]),
                          ring.cap)
            tgt = out_p[i:i + Di + 1, j:j + Di + 1]
            np.minimum(tgt, pr, out=tgt)
            if not np.any(ai != 0):
                continue
            prod = ring.raw_mul(np.broadcast_to(ai, sub_c.shape), sub_c)
            prod[~sub_mask] = 0
            out_c[i:i + Di + 1, j:j + Di + 1] += prod
        out_p = ring.clamp(out_p)
        return BiSeries(ring, ring.reduce(out_c, out_p), out_p,
                        poly=False)

    def flat_terms(self):
        """(i, j) pairs in total-degree order."""
        out = []
        for d in range(self.D + 1):
            for i in range(d + 1):
                out.append((i, d - i))
        return out

    def __repr__(self):
        return f"BiSeries[{self.ring.name}, D={self.D}]"


def bi_substitute(F: BiSeries, g: Series, h: Series) -> Series:
    """F(g(x), h(x)) truncated at the inner degree cap."""
    if g.ring is not h.ring:
        raise RingMismatchError("inner series over different rings")
    ring = g.ring
    if F.ring is not ring:
        raise RingMismatchError(f"outer series over {F.ring.name}, inner over "
                                f"{ring.name}; embed first")
    if g.D != h.D:
        D = min(g.D, h.D)
        log.warning("mixed degree caps %d and %d; truncating to %d", g.D, h.D, D)
        g, h = g.truncate(D), h.truncate(D)
    D = g.D
    v0 = min(int(g.val()[0]), int(h.val()[0]))
    if v0 == 0 and not F.poly:
        raise DivergenceError("inner constant terms must have positive "
                              "valuation for a non-polynomial outer series")
    DF = F.D
    M = DF if v0 == 0 else min(DF, D + -(-ring.cap // v0))
    # powers of g
    pows_c = np.zeros((M + 1, D + 1, ring.n), dtype=object)
    pows_p = np.zeros((M + 1, D + 1), dtype=np.int64)
    cur = Series.const(ring, 1, D)
    for i in range(M + 1):
        pows_c[i], pows_p[i] = cur.c, cur.p
        if i < M:
            cur = cur * g
    pows_v = ring.val(pows_c, pows_p)
    acc = None
    for j in range(M, -1, -1):
        imax = M - j
        coef_c = F.c[:imax + 1, j]          # (imax+1, n)
        coef_p = F.p[:imax + 1, j]
        cv = ring.val(coef_c, coef_p)
        cc = np.broadcast_to(coef_c[:, None, :], (imax + 1, D + 1, ring.n))
        cp = np.broadcast_to(coef_p[:, None], (imax + 1, D + 1))
        cvv = np.broadcast_to(cv[:, None], (imax + 1, D + 1))
        prod_c, prod_p = ring.mul(pows_c[:imax + 1], pows_p[:imax + 1],
                                  cc, cp, va=pows_v[:imax + 1], vb=cvv)
        S_p = prod_p.min(axis=0)
        S_c = ring.reduce(prod_c.sum(axis=0), S_p)
        S = Series(ring, S_c, S_p)
        acc = S if acc is None else acc * h + S
    p = acc.p.copy()
    if not F.poly:
        d = np.arange(D + 1)
        p = np.minimum(p, np.maximum(DF + 1 - d, 0) * v0)
    return Series(ring, acc.c, p, poly=False, canonical=False)


class SigmaPowers:
    """Coefficient table of sigma^m for m, degree <= D (sigma(0) = 0).

    Substitution g(sigma(x)) then is a single contraction, which is much
    cheaper than Horner composition when the same sigma is reused.
    """

    def __init__(self, sigma: Series, D: int):
        ring = sigma.ring
        self.ring = ring
        self.D = D
        self.c = np.zeros((D + 1, D + 1, ring.n), dtype=object)
        self.p = np.zeros((D + 1, D + 1), dtype=np.int64)
        sig = sigma.extend(D) if sigma.D < D and sigma.poly else sigma.truncate(D)
        if sig.D < D:
            raise PreconditionError("sigma is known only to degree "
                                    f"{sig.D} < {D}")
        cur = Series.const(ring, 1, D)
        for m in range(D + 1):
            self.c[m], self.p[m] = cur.c, cur.p
            if m < D:
                cur = cur * sig
        self.v = ring.val(self.c, self.p)

    def substitute(self, g: Series) -> Series:
        """g(sigma(x)) truncated at min(D, g.D); exact in the degree range."""
        R = self.ring
        if g.D > self.D:
            raise PreconditionError(f"table has degree {self.D} < {g.D}")
        D = g.D
        gc = np.broadcast_to(g.c[:D + 1, None], (D + 1, D + 1, R.n))
        gp = np.broadcast_to(g.p[:D + 1, None], (D + 1, D + 1))
        tc, tp = R.mul(gc, gp, self.c[:D + 1, :D + 1], self.p[:D + 1, :D + 1],
                       vb=self.v[:D + 1, :D + 1])
        # sigma^m starts at degree m, so only m <= d contributes to degree d
        mask = np.triu(np.ones((D + 1, D + 1), dtype=bool))
        tp = np.where(mask, tp, R.cap)
        P = tp.min(axis=0)
        return Series(R, R.reduce(tc.sum(axis=0), P), P, poly=False)


def desubstitute(h: Series, sigma: Series, certificate=False, powers=None):
    """Solve g(sigma(x)) = h degree by degree.

    sigma must have zero constant term and linear coefficient of positive
    valuation.  Coefficient n of g loses n * v(sigma_1) of precision.  With
    ``certificate=True`` also returns the residual h - g(sigma(x)).
    ``powers`` may pass a precomputed SigmaPowers table for sigma.
    """
    if h.ring is not sigma.ring:
        raise RingMismatchError("desubstitute over different rings")
    ring = h.ring
    D = h.D
    if sigma.D < D:
        h = h.truncate(sigma.D)
        D = sigma.D
    sv = sigma.val()
    if sv[0] < sigma.p[0] and sigma.c[0].any():
        raise PreconditionError("sigma must have zero constant term")
    s1 = sigma.coeff(1)
    v1 = int(s1.valuation())
    if v1 < 1 or isinstance(s1.valuation(), AtLeast):
        raise PreconditionError("sigma_1 must be nonzero of positive valuation")
    unit_inv = s1.div_pi(v1).inverse()
    tab = powers if powers is not None and powers.D >= D else SigmaPowers(sigma, D)
    spc, spp, spv = tab.c, tab.p, tab.v
    sig = sigma.truncate(D)
    gc = np.zeros((D + 1, ring.n), dtype=object)
    gp = np.zeros(D + 1, dtype=np.int64)
    gv = np.zeros(D + 1, dtype=np.int64)
    uinv_pows = [ring.one()]
    for n in range(D + 1):
        ac, ap = h.c[n], h.p[n]
        if n > 0:
            tc, tp = ring.mul(gc[:n], gp[:n], spc[:n, n], spp[:n, n],
                              va=gv[:n], vb=spv[:n, n])
            sp = min(int(tp.min()), int(ap))
            ac = ring.reduce(ac - tc.sum(axis=0), as_prec(sp))
            ap = sp
        try:
            qc, qp = ring.div_pi(ac, as_prec(ap), n * v1)
        except DivisibilityError:
            raise NotInImageError(
                f"not in the image of substitution: degree {n} coefficient "
                f"is not divisible by sigma_1^{n}", degree=n) from None
        if n >= len(uinv_pows):
            uinv_pows.append(uinv_pows[-1] * unit_inv)
        u = uinv_pows[n]
        rc, rp = ring.mul(qc, qp, u.c, as_prec(u.prec))
        gc[n], gp[n] = rc, rp
        gv[n] = ring.val(rc, rp)
    g = Series(ring, gc, gp, poly=False)
    if certificate:
        return g, h - compose(g, sig)
    return g


@dataclass
class CongruenceResult:
    ok: bool
    degree: Optional[object] = None
    modulus: Optional[float] = None

    def __bool__(self):
        return self.ok


def _diff_arrays(f, g):
    if isinstance(f, FracSeries) or isinstance(g, FracSeries):
        f = f if isinstance(f, FracSeries) else FracSeries(f, 0)
        g = g if isinstance(g, FracSeries) else FracSeries(g, 0)
        a, b, s = f._common(g)
        d = a - b
        return d.val() - s, d.p - s, None
    if isinstance(f, BiSeries):
        d = f - g
        v = d.ring.val(d.c, d.p)
        terms = d.flat_terms()
        idx = tuple(np.array(t) for t in zip(*terms))
        return v[idx], d.p[idx], terms
    D = min(f.D, g.D)
    d = f.truncate(D) - g.truncate(D)
    return d.val(), d.p, None


def congruent_mod(f, g, m, deg=None) -> CongruenceResult:
    """Decide f == g mod (pi^m, x^(deg+1)).

    ``m = math.inf`` compares at whatever precision is available.  Raises
    InsufficientPrecisionError rather than passing silently.
    """
    v, p, terms = _diff_arrays(f, g)
    if terms is not None and deg is not None:
        keep = [k for k, (i, j) in enumerate(terms) if i + j <= deg]
        v, p, terms = v[keep], p[keep], [terms[k] for k in keep]
    elif deg is not None:
        v, p = v[:deg + 1], p[:deg + 1]
    for k in range(len(v)):
        label = terms[k] if terms is not None else k
        nonzero = v[k] < p[k]
        if math.isinf(m):
            if nonzero:
                return CongruenceResult(False, label, m)
            continue
        if nonzero and v[k] < m:
            return CongruenceResult(False, label, m)
        if p[k] < m and not nonzero:
            raise InsufficientPrecisionError(
                f"coefficient {label} is only known modulo pi^{int(p[k])}, "
                f"below the requested {m}", degree=label)
    return CongruenceResult(True, None, m)


def bi_outer(a: Series, b: Series, D: Optional[int] = None) -> BiSeries:
    """The bivariate series a(x) b(y), truncated at total degree D."""
    if a.ring is not b.ring:
        raise RingMismatchError("outer product over different rings")
    ring = a.ring
    D = min(a.D, b.D) if D is None else D
    a, b = a.truncate(D), b.truncate(D)
    da, db = a.D + 1, b.D + 1
    out = BiSeries.zero(ring, D)
    cc, pp = ring.mul(np.broadcast_to(a.c[:, None], (da, db, ring.n)),
                      np.broadcast_to(a.p[:, None], (da, db)),
                      np.broadcast_to(b.c[None], (da, db, ring.n)),
                      np.broadcast_to(b.p[None], (da, db)))
    out.c[:da, :db] = cc
    out.p[:da, :db] = pp
    m = out.mask()
    out.c[~m] = 0
    out.p[~m] = ring.cap
    return out


def compose_bi(f: Series, F: BiSeries) -> BiSeries:
    """f(F(x, y)) for F with zero constant term, truncated at F's degree."""
    ring = F.ring
    if f.ring is not ring:
        raise RingMismatchError("compose_bi over different rings")
    if F.c[0, 0].any():
        raise PreconditionError("compose_bi needs F(0, 0) = 0")
    D = F.D
    M = min(f.degree() if f.poly else f.D, D)
    acc = BiSeries.zero(ring, D)
    one = BiSeries.from_dict(ring, {(0, 0): 1}, D)
    for k in range(M, -1, -1):
        acc = acc * F
        acc = acc + one.scale(f.coeff(k))
    return acc
