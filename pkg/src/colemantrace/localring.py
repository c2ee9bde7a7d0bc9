"""Rings of integers of p-adic towers with absolute precision.

A ring is built as a chain of simple extensions of Z_p.  Every level is
either Eisenstein (totally ramified) or unramified, so the ring is a free
Z_p-module on monomials in the level generators.  Each monomial has a
valuation ``vb[k] < e``, and for any integer coordinate vector

    v(sum c_k beta_k) = min_k (e * v_p(c_k) + vb[k]),

which makes both valuations and canonical forms cheap: an element known
modulo pi^P has coordinate k reduced modulo p^ceil((P - vb[k]) / e).

The array-level methods (``reduce``, ``add``, ``mul``, ``val``,
``div_pi``, ``inv_unit``) accept numpy object arrays of Python ints of
shape ``(..., n)`` together with int64 precision arrays of shape ``(...)``
and are what the series layer is built on.  ``RingElement`` wraps a single
element for interactive use.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from typing import Optional, Sequence

import gmpy2
import numpy as np

from .errors import (DivisibilityError, NonUnitError, RingMismatchError,
                     TowerError)

_BIG = 1 << 40


class AtLeast(int):
    """Valuation of an element that is zero to its precision.

    Behaves as the integer bound in arithmetic; ``isinstance(v, AtLeast)``
    distinguishes it from an exact valuation.
    """

    def __repr__(self):
        return f"AtLeast({int(self)})"

    __str__ = __repr__


def _vp_ufunc(p):
    def vp(c):
        if c == 0:
            return _BIG
        return gmpy2.remove(c, p)[1]
    return np.frompyfunc(vp, 1, 1)


def _ceil_div(a, b):
    return -(-a // b)


def as_prec(prec, shape=()):
    return np.broadcast_to(np.asarray(prec, dtype=np.int64), shape).copy()


class LocalRing:
    """Ring of integers of a tower of simple extensions of Q_p.

    Use ``LocalRing.base(p, cap)`` for Z_p and ``ring.extend(poly)`` to add
    a level.  ``cap`` bounds every precision (in units of this ring's own
    uniformizer) and keeps integer sizes under control.
    """

    def __init__(self, p, cap, n, e, f, vb, tdense, pi, parent=None,
                 degree=1, kind="base", poly=None, name="Zp", gen_name=None):
        self.p = int(p)
        self.cap = int(cap)
        self.n = n
        self.e = e
        self.f = f
        self.q = self.p ** f
        self.vb = np.asarray(vb, dtype=np.int64)
        self.parent = parent
        self.degree = degree
        self.kind = kind
        self.poly = poly
        self.name = name
        self.gen_name = gen_name
        self._tdense = tdense
        self._tsparse = []
        for k in range(n):
            idx = [(i * n + j, int(tdense[i, j, k])) for i in range(n)
                   for j in range(n) if tdense[i, j, k] != 0]
            flat = np.array([t[0] for t in idx], dtype=np.int64)
            coef = np.array([t[1] for t in idx], dtype=object)
            self._tsparse.append((flat, coef, all(t[1] == 1 for t in idx)))
        self._pi = np.array(pi, dtype=object)
        self._vp = _vp_ufunc(self.p)
        self._lock = threading.RLock()
        self._modtab = np.ones((0, n), dtype=object)
        self._wcache = {}
        self._eps_inv = None
        self.depth = 0 if parent is None else parent.depth + 1

    # ------------------------------------------------------------------
    # construction
    @classmethod
    def base(cls, p, cap):
        if not gmpy2.is_prime(int(p)):
            raise TowerError(f"p = {p} is not prime")
        t = np.ones((1, 1, 1), dtype=object)
        return cls(p, cap, 1, 1, 1, [0], t, [int(p)], name="Zp")

    def extend(self, poly, name="b", kind=None, cap=None):
        """Adjoin a root of the monic polynomial ``poly``.

        ``poly`` lists coefficients from the constant term upward; each is
        an int or a coordinate list in this ring.  The level type is
        detected (Eisenstein or unramified-irreducible) unless ``kind`` is
        given, in which case it is checked.
        """
        coeffs = [self._exact_coords(c) for c in poly]
        d = len(coeffs) - 1
        if d < 1:
            raise TowerError("defining polynomial must have degree >= 1")
        one = self._exact_coords(1)
        if list(coeffs[-1]) != list(one):
            raise TowerError("defining polynomial is not monic")
        vals = [self.exact_val(c) for c in coeffs[:-1]]
        eisen = all(v >= 1 for v in vals) and vals[0] == 1
        unram = False
        if not eisen:
            unram = self._irreducible_mod_pi(coeffs)
        if kind is not None:
            if kind == "eisenstein" and not eisen:
                raise TowerError("polynomial is not Eisenstein: need all lower "
                                 "coefficients divisible by the uniformizer and "
                                 "the constant term of valuation exactly 1")
            if kind == "unramified" and not unram:
                raise TowerError("polynomial is not irreducible modulo the "
                                 "uniformizer")
        if eisen:
            kind = "eisenstein"
        elif unram:
            kind = "unramified"
        else:
            raise TowerError(
                "polynomial is neither Eisenstein (lower coefficients divisible "
                "by the uniformizer, constant of valuation 1) nor irreducible "
                "modulo the uniformizer")
        if d == 1:
            raise TowerError("degree-1 polynomial gives a trivial extension; "
                             "omit the level instead")
        n0 = self.n
        N = d * n0
        zero = [0] * n0
        # b^m for m < 2d - 1, expressed on 1, b, ..., b^(d-1)
        bp = []
        for m in range(2 * d - 1):
            if m < d:
                vec = [list(zero) for _ in range(d)]
                vec[m] = list(one)
            else:
                prev = bp[m - 1]
                top = prev[-1]
                vec = [list(zero)] + [list(x) for x in prev[:-1]]
                for i in range(d):
                    pr = self._mul_exact(top, coeffs[i])
                    vec[i] = [a - b for a, b in zip(vec[i], pr)]
            bp.append(vec)
        t = np.zeros((N, N, N), dtype=object)
        basis = [[1 if i == k else 0 for i in range(n0)] for k in range(n0)]
        for j1, k1, j2, k2 in itertools.product(range(d), range(n0),
                                                range(d), range(n0)):
            beta = self._mul_exact(basis[k1], basis[k2])
            for j in range(d):
                cj = self._mul_exact(beta, bp[j1 + j2][j])
                for k in range(n0):
                    if cj[k]:
                        t[j1 * n0 + k1, j2 * n0 + k2, j * n0 + k] += cj[k]
        if kind == "eisenstein":
            e, f = self.e * d, self.f
            vb = [d * int(self.vb[k]) + j for j in range(d) for k in range(n0)]
            pi = [0] * N
            pi[n0] = 1
            new_cap = self.cap * d if cap is None else cap
        else:
            e, f = self.e, self.f * d
            vb = [int(self.vb[k]) for j in range(d) for k in range(n0)]
            pi = list(self._pi) + [0] * (N - n0)
            new_cap = self.cap if cap is None else cap
        return LocalRing(self.p, new_cap, N, e, f, vb, t, pi, parent=self,
                         degree=d, kind=kind, poly=coeffs, name=name,
                         gen_name=name)

    def with_cap(self, cap):
        """Same ring with a different precision cap (shares no state)."""
        r = LocalRing.__new__(LocalRing)
        r.__dict__.update(self.__dict__)
        r.cap = int(cap)
        r._lock = threading.RLock()
        r._modtab = np.ones((0, self.n), dtype=object)
        r._wcache = {}
        r._eps_inv = None
        return r

    # ------------------------------------------------------------------
    # exact helpers used during construction
    def _exact_coords(self, c):
        if isinstance(c, RingElement):
            return [int(x) for x in c.c]
        if isinstance(c, (int, np.integer)):
            v = [0] * self.n
            v[0] = int(c)
            return v
        c = list(c)
        if len(c) > self.n:
            raise TowerError(f"coefficient {c} has too many coordinates")
        if self.parent is not None and any(isinstance(x, (list, tuple)) for x in c):
            # nested: list of parent elements on 1, b, b^2, ...
            n0 = self.parent.n
            out = [0] * self.n
            for j, sub in enumerate(c):
                sc = self.parent._exact_coords(sub)
                out[j * n0:(j + 1) * n0] = sc
            return out
        return [int(x) for x in c] + [0] * (self.n - len(c))

    def _mul_exact(self, a, b):
        n = self.n
        out = [0] * n
        for i in range(n):
            if not a[i]:
                continue
            for j in range(n):
                if not b[j]:
                    continue
                ab = a[i] * b[j]
                for k in range(n):
                    t = self._tdense[i, j, k]
                    if t:
                        out[k] += ab * t
        return out

    def exact_val(self, c):
        """Valuation of an exact integer coordinate vector."""
        best = _BIG
        for k, x in enumerate(c):
            if x:
                best = min(best, self.e * gmpy2.remove(int(x), self.p)[1]
                           + int(self.vb[k]))
        return best

    def _irreducible_mod_pi(self, coeffs):
        # polynomial arithmetic over the residue field, elements as tuples
        d = len(coeffs) - 1

        def red(c):
            return tuple(int(x) for x in self.reduce(np.array(c, dtype=object),
                                                     as_prec(1)))

        def fmul(a, b):
            return red(self._mul_exact(list(a), list(b)))

        def fadd(a, b):
            return red([x + y for x, y in zip(a, b)])

        def fneg(a):
            return red([-x for x in a])

        zero = red([0] * self.n)
        g = [red(c) for c in coeffs]

        def trim(a):
            a = list(a)
            while a and a[-1] == zero:
                a.pop()
            return a

        def pmod(a, m):
            a = trim(a)
            m = trim(m)
            inv_lead = tuple(int(x) for x in self.inv_unit(
                np.array(m[-1], dtype=object), as_prec(1))[0])
            while len(a) >= len(m):
                c = fmul(a[-1], inv_lead)
                sh = len(a) - len(m)
                for i, mc in enumerate(m):
                    a[sh + i] = fadd(a[sh + i], fneg(fmul(c, mc)))
                a = trim(a)
            return a

        def pmul(a, b):
            if not a or not b:
                return []
            out = [zero] * (len(a) + len(b) - 1)
            for i, x in enumerate(a):
                for j, y in enumerate(b):
                    out[i + j] = fadd(out[i + j], fmul(x, y))
            return trim(out)

        def ppow_x(e_, m):
            result = [red(self._exact_coords(1))]
            base = [zero, red(self._exact_coords(1))]
            while e_:
                if e_ & 1:
                    result = pmod(pmul(result, base), m)
                base = pmod(pmul(base, base), m)
                e_ >>= 1
            return result

        def pgcd(a, b):
            a, b = trim(a), trim(b)
            while b:
                a, b = b, pmod(a, b)
            return a

        for i in range(1, d // 2 + 1):
            xq = ppow_x(self.q ** i, g)
            diff = list(xq) + [zero] * max(0, 2 - len(xq))
            diff[1] = fadd(diff[1], fneg(red(self._exact_coords(1))))
            if len(pgcd(g, diff)) > 1:
                return False
        return True

    # ------------------------------------------------------------------
    # precision tables
    def mods(self, prec):
        prec = np.asarray(prec, dtype=np.int64)
        top = int(prec.max()) if prec.size else 0
        if top >= len(self._modtab):
            with self._lock:
                if top >= len(self._modtab):
                    rows = []
                    for P in range(max(top + 1, 2 * len(self._modtab))):
                        rows.append([self.p ** max(0, _ceil_div(P - int(v), self.e))
                                     for v in self.vb])
                    tab = np.empty((len(rows), self.n), dtype=object)
                    tab[:] = rows
                    self._modtab = tab
        return self._modtab[prec]

    def reduce(self, c, prec):
        return c % self.mods(prec)

    def clamp(self, prec):
        return np.clip(prec, 0, self.cap)

    # ------------------------------------------------------------------
    # array arithmetic
    def val(self, c, prec):
        """Valuations (bounded by ``prec``) of canonical coordinate arrays."""
        prec = np.asarray(prec, dtype=np.int64)
        vp = self._vp(c).astype(np.int64)
        v = (vp * self.e + self.vb).min(axis=-1)
        return np.minimum(v, prec)

    def raw_mul(self, a, b):
        if self.n == 1:
            return a * b
        outer = a[..., :, None] * b[..., None, :]
        shape = outer.shape[:-2]
        outer = outer.reshape(shape + (self.n * self.n,))
        return self.contract(outer)

    def contract(self, outer):
        """Apply the structure constants to flattened outer products."""
        shape = outer.shape[:-1]
        out = np.zeros(shape + (self.n,), dtype=object)
        for k, (flat, coef, ones) in enumerate(self._tsparse):
            if len(flat) == 0:
                continue
            g = outer[..., flat]
            if not ones:
                g = g * coef
            out[..., k] = g.sum(axis=-1)
        return out

    def add(self, a, pa, b, pb):
        P = np.minimum(pa, pb)
        return self.reduce(a + b, P), P

    def sub(self, a, pa, b, pb):
        P = np.minimum(pa, pb)
        return self.reduce(a - b, P), P

    def neg(self, a, pa):
        return self.reduce(-a, pa), pa

    def mul(self, a, pa, b, pb, va=None, vb=None):
        if va is None:
            va = self.val(a, pa)
        if vb is None:
            vb = self.val(b, pb)
        P = self.clamp(np.minimum(pa + vb, pb + va))
        return self.reduce(self.raw_mul(a, b), P), P

    def mulp(self, a, b, prec):
        """Product reduced at a caller-supplied precision."""
        return self.reduce(self.raw_mul(a, b), prec)

    def _eps(self):
        if self._eps_inv is None:
            with self._lock:
                if self._eps_inv is None:
                    pe = [int(x) for x in self._pi]
                    acc = self._exact_coords(1)
                    for _ in range(self.e):
                        acc = self._mul_exact(acc, pe)
                    if any(x % self.p for x in acc):
                        raise TowerError("uniformizer power not divisible by p")
                    eps = np.array([x // self.p for x in acc], dtype=object)
                    H = self._hiprec()
                    self._eps_inv = self.inv_unit(eps, as_prec(H), cap=False)[0]
        return self._eps_inv

    def _hiprec(self):
        return 2 * self.cap + 2 * self.e + 2

    def _w(self, m):
        """p^k / pi^m at high precision, k = ceil(m / e)."""
        w = self._wcache.get(m)
        if w is None:
            k = _ceil_div(m, self.e)
            H = as_prec(self._hiprec())
            eps_inv = self._eps()
            acc = np.array(self._exact_coords(1), dtype=object)
            for _ in range(k):
                acc = self.mulp(acc, eps_inv, H)
            pi = self._pi
            for _ in range(k * self.e - m):
                acc = self.mulp(acc, pi, H)
            w = (k, acc)
            with self._lock:
                self._wcache[m] = w
        return w

    def div_pi(self, c, prec, m):
        """Exact division by pi^m; raises DivisibilityError on failure."""
        prec = np.asarray(prec, dtype=np.int64)
        if m == 0:
            return c, prec
        v = self.val(c, prec)
        bad = (v < m) & (v < prec)
        if np.any(bad):
            idx = np.argwhere(bad)[0]
            deg = int(idx[0]) if idx.size else None
            raise DivisibilityError(
                f"element of valuation {int(v[tuple(idx)])} is not divisible "
                f"by pi^{m}", degree=deg)
        k, w = self._w(m)
        prod = self.raw_mul(c, np.broadcast_to(w, c.shape))
        pk = self.p ** k
        P = np.maximum(prec - m, 0)
        return self.reduce(prod // pk, P), P

    def inv_unit(self, c, prec, cap=True):
        """Inverse of units by residue inversion and Newton lifting."""
        prec = np.asarray(prec, dtype=np.int64)
        if cap:
            prec = self.clamp(prec)
        v = self.val(c, prec)
        if np.any((v > 0) & (prec > 0)):
            raise NonUnitError("element is not a unit")
        one = np.zeros(prec.shape + (self.n,), dtype=object)
        one[..., 0] = 1
        p1 = np.minimum(prec, 1)
        # x0 = c^(q-2) is correct modulo pi
        x = self.reduce(one.copy(), p1)
        base = self.reduce(c, p1)
        ex = self.q - 2
        while ex > 0:
            if ex & 1:
                x = self.mulp(x, base, p1)
            base = self.mulp(base, base, p1)
            ex >>= 1
        cur = 1
        top = int(prec.max()) if prec.size else 0
        while cur < top:
            cur = min(2 * cur, top)
            P = np.minimum(prec, cur)
            ax = self.mulp(c, x, P)
            x = self.mulp(x, 2 * one - ax, P)
        return self.reduce(x, prec), prec

    def divide(self, a, pa, b, pb):
        """Exact quotient a / b for a nonzero scalar divisor b."""
        vb_ = int(self.val(b, pb))
        if vb_ >= int(pb):
            raise DivisibilityError("division by an element that is zero to "
                                    "its precision")
        bu, pbu = self.div_pi(b, pb, vb_)
        binv, pbinv = self.inv_unit(bu, pbu)
        q_, pq = self.div_pi(a, pa, vb_)
        return self.mul(q_, pq, np.broadcast_to(binv, q_.shape),
                        np.broadcast_to(pbinv, pq.shape))

    # ------------------------------------------------------------------
    # conversions
    def const(self, x, prec=None):
        """Coordinates of an integer or coordinate list, reduced at prec."""
        prec = self.cap if prec is None else prec
        c = np.array(self._exact_coords(x), dtype=object)
        return self.reduce(c, as_prec(prec))

    def element(self, x, prec=None):
        if isinstance(x, RingElement):
            if x.ring is self:
                return x if prec is None else x.lift_prec(prec)
            return x.embed(self) if prec is None else x.embed(self).lift_prec(prec)
        prec = self.cap if prec is None else min(int(prec), self.cap)
        return RingElement(self, self.const(x, prec), prec)

    def zero(self, prec=None):
        return self.element(0, prec)

    def one(self, prec=None):
        return self.element(1, prec)

    @property
    def uniformizer(self):
        return RingElement(self, self.reduce(self._pi.copy(), as_prec(self.cap)),
                           self.cap)

    @property
    def generator(self):
        if self.parent is None:
            return self.one()
        c = [0] * self.n
        c[self.parent.n] = 1
        return self.element(c)

    def ancestors(self):
        r, out = self, []
        while r is not None:
            out.append(r)
            r = r.parent
        return out

    def is_ancestor_of(self, other):
        return any(r is self for r in other.ancestors())

    def embed_from(self, src, c, prec):
        """Embed coordinates of an ancestor ring into this ring."""
        if src is self:
            return c, np.asarray(prec, dtype=np.int64)
        chain = []
        r = self
        while r is not src:
            if r.parent is None:
                raise RingMismatchError(f"{src.name} is not a subring of {self.name}")
            chain.append(r)
            r = r.parent
        prec = np.asarray(prec, dtype=np.int64)
        for r in reversed(chain):
            pad = np.zeros(c.shape[:-1] + (r.n,), dtype=object)
            pad[..., :c.shape[-1]] = c
            c = pad
            if r.kind == "eisenstein":
                prec = prec * r.degree
            prec = np.minimum(prec, r.cap)
            c = r.reduce(c, prec)
        return c, prec

    def project_to(self, dst, c, prec):
        """Inverse of ``embed_from``; raises if non-base coordinates survive.

        Returns (coords, prec, ok) where ok is a boolean array marking
        positions whose non-base coordinates vanished.
        """
        prec = np.asarray(prec, dtype=np.int64)
        r = self
        ok = np.ones(prec.shape, dtype=bool)
        while r is not dst:
            if r.parent is None:
                raise RingMismatchError(f"{dst.name} is not a subring of {self.name}")
            n0 = r.parent.n
            rest = c[..., n0:]
            ok &= ~np.any(rest != 0, axis=-1)
            c = c[..., :n0]
            if r.kind == "eisenstein":
                prec = -(-prec // r.degree)
            r = r.parent
            c = r.reduce(c, prec)
        return c, prec, ok

    def __repr__(self):
        return (f"LocalRing({self.name}, p={self.p}, n={self.n}, e={self.e}, "
                f"f={self.f}, cap={self.cap})")

    def monomial_names(self):
        if self.parent is None:
            return ["1"]
        inner = self.parent.monomial_names()
        out = []
        for j in range(self.degree):
            for s in inner:
                g = "" if j == 0 else (self.gen_name if j == 1 else
                                       f"{self.gen_name}^{j}")
                if s == "1":
                    out.append(g or "1")
                else:
                    out.append(s if not g else f"{s}*{g}")
        return out


class RingElement:
    """Immutable element of a LocalRing known modulo pi^prec."""

    __slots__ = ("ring", "c", "prec")

    def __init__(self, ring: LocalRing, coords, prec: int, canonical=True):
        self.ring = ring
        c = np.asarray(coords, dtype=object)
        prec = max(0, min(int(prec), ring.cap))
        if not canonical:
            c = ring.reduce(c, as_prec(prec))
        self.c = c
        self.prec = prec

    def _coerce(self, other):
        if isinstance(other, RingElement):
            if other.ring is not self.ring:
                if other.ring.is_ancestor_of(self.ring):
                    return other.embed(self.ring)
                if self.ring.is_ancestor_of(other.ring):
                    raise RingMismatchError("embed the left operand first")
                raise RingMismatchError(
                    f"elements of {self.ring.name} and {other.ring.name}")
            return other
        if isinstance(other, (int, np.integer)):
            return self.ring.element(int(other))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        c, P = self.ring.add(self.c, as_prec(self.prec), o.c, as_prec(o.prec))
        return RingElement(self.ring, c, int(P))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        c, P = self.ring.sub(self.c, as_prec(self.prec), o.c, as_prec(o.prec))
        return RingElement(self.ring, c, int(P))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        c, P = self.ring.neg(self.c, as_prec(self.prec))
        return RingElement(self.ring, c, int(P))

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        c, P = self.ring.mul(self.c, as_prec(self.prec), o.c, as_prec(o.prec))
        return RingElement(self.ring, c, int(P))

    __rmul__ = __mul__

    def __pow__(self, k):
        out = self.ring.one()
        base = self
        k = int(k)
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        c, P = self.ring.divide(self.c, as_prec(self.prec), o.c, as_prec(o.prec))
        return RingElement(self.ring, c, int(P))

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return False
        P = min(self.prec, o.prec)
        a = self.ring.reduce(self.c, as_prec(P))
        b = self.ring.reduce(o.c, as_prec(P))
        return bool(np.all(a == b))

    def __hash__(self):
        return hash((id(self.ring), tuple(self.c), self.prec))

    def valuation(self):
        v = int(self.ring.val(self.c, as_prec(self.prec)))
        if v >= self.prec:
            return AtLeast(self.prec)
        return v

    def is_zero(self):
        return not np.any(self.c != 0)

    def is_unit(self):
        return self.prec > 0 and self.valuation() == 0

    def div_pi(self, m):
        c, P = self.ring.div_pi(self.c, as_prec(self.prec), int(m))
        return RingElement(self.ring, c, int(P))

    def inverse(self):
        c, P = self.ring.inv_unit(self.c, as_prec(self.prec))
        return RingElement(self.ring, c, int(P))

    def lift_prec(self, prec):
        """Reinterpret at a different precision (representative kept)."""
        return RingElement(self.ring, self.c, prec, canonical=prec <= self.prec)

    def embed(self, ring: LocalRing):
        c, P = ring.embed_from(self.ring, self.c, as_prec(self.prec))
        return RingElement(ring, c, int(P))

    def project(self, ring: LocalRing):
        c, P, ok = self.ring.project_to(ring, self.c, as_prec(self.prec))
        if not bool(ok):
            from .errors import DescentError
            raise DescentError("element does not lie in the subring")
        return RingElement(ring, c, int(P))

    def coords(self):
        return [int(x) for x in self.c]

    def __int__(self):
        if any(int(x) for x in self.c[1:]):
            raise ValueError("element is not a rational integer")
        return int(self.c[0])

    def __repr__(self):
        names = self.ring.monomial_names()
        terms = []
        for x, nm in zip(self.c, names):
            x = int(x)
            if x:
                terms.append(str(x) if nm == "1" else f"{x}*{nm}")
        body = " + ".join(terms) if terms else "0"
        return f"{body} (mod pi^{self.prec})"


# ----------------------------------------------------------------------
# towers

@dataclass
class TowerSpec:
    """Validated two-level tower Z_p in O_L in O_K."""

    p: int
    O_L: LocalRing
    O_K: LocalRing
    q_L: int
    q_K: int
    e_KL: int
    f_KL: int
    prec: int
    g_L: Optional[list] = None
    g_K: Optional[list] = None
    degree_cap: int = 32
    extra: dict = field(default_factory=dict)

    @property
    def pi_K(self) -> RingElement:
        return self.O_K.uniformizer

    @property
    def pi_L(self) -> RingElement:
        return self.O_L.uniformizer.embed(self.O_K)

    @property
    def pi_L_native(self) -> RingElement:
        return self.O_L.uniformizer

    @property
    def e_K(self):
        return self.O_K.e

    def describe(self):
        return {"p": self.p, "q_L": self.q_L, "q_K": self.q_K,
                "e_KL": self.e_KL, "f_KL": self.f_KL, "e_K": self.O_K.e,
                "prec": self.prec}


def _is_trivial(g):
    return g is None or (isinstance(g, str) and g.lower() == "trivial")


def tower_build(p: int, g_L=None, g_K=None, default_prec: int = 48,
                degree_cap: int = 32) -> TowerSpec:
    """Validate defining polynomials and build O_L and O_K.

    ``g_L`` is an integer coefficient list (constant first) or "trivial";
    ``g_K`` has entries that are ints or coordinate lists over O_L.
    ``default_prec`` is the working precision in units of pi_K.
    """
    if not gmpy2.is_prime(int(p)):
        raise TowerError(f"p = {p} is not prime")
    if default_prec < 0:
        raise TowerError("precision must be nonnegative")
    # decide ramification of K/L first to size the L cap
    zp = LocalRing.base(p, default_prec)
    O_L = zp
    if not _is_trivial(g_L):
        O_L = zp.extend(g_L, name="a")
    if _is_trivial(g_K):
        O_K = O_L.with_cap(default_prec)
        e_KL, f_KL = 1, 1
        O_L = O_K
    else:
        trial = O_L.extend(g_K, name="b")
        e_KL = trial.e // O_L.e
        f_KL = trial.f // O_L.f
        Lcap = _ceil_div(default_prec, e_KL) + 1
        # rebuild with the right caps
        zp = LocalRing.base(p, Lcap)
        O_L = zp
        if not _is_trivial(g_L):
            O_L = zp.extend(g_L, name="a", cap=Lcap)
        else:
            O_L = zp.with_cap(Lcap)
        O_K = O_L.extend(g_K, name="b", cap=default_prec)
    return TowerSpec(p=int(p), O_L=O_L, O_K=O_K, q_L=O_L.q, q_K=O_K.q,
                     e_KL=e_KL, f_KL=f_KL, prec=default_prec,
                     g_L=None if _is_trivial(g_L) else list(g_L),
                     g_K=None if _is_trivial(g_K) else list(g_K),
                     degree_cap=degree_cap)


def residue_representatives(ring, level: str = "K", prec=None) -> list:
    """Deterministic lifts of the residue field, 0 and 1 first.

    ``ring`` is a LocalRing or a TowerSpec together with level "L" or "K".
    """
    if isinstance(ring, TowerSpec):
        ring = ring.O_L if level.upper() == "L" else ring.O_K
    elif not isinstance(level, str):
        prec, level = level, "K"
    units = [k for k in range(ring.n) if ring.vb[k] == 0]
    out = []
    for digits in itertools.product(range(ring.p), repeat=len(units)):
        c = [0] * ring.n
        for k, dgt in zip(units, reversed(digits)):
            c[k] = dgt
        out.append(ring.element(c, prec))
    return out
