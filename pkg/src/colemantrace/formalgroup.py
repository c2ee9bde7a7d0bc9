"""Lubin-Tate formal groups: group law, endomorphisms, inverse, log, exp.

Everything is built from the Frobenius-type series f by degree-by-degree
recursions in which the only division is by (pi^n - pi) or (pi - pi^(n+1)),
both of valuation exactly one.  The group law is extended lazily, one total
degree at a time, because folds of series with non-zero constant terms
need it to degree D + (precision / constant valuation).

The invariant differential g(x) = dF/dy(x, 0) is computed from its own
functional equation f'(x) g(x) = pi g(f(x)), so log' = 1/g is available to
any degree without building F that far.
"""

from __future__ import annotations

import math
import threading
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import (DivergenceError, DivisibilityError, PreconditionError,
                     RingMismatchError, BudgetError)
from .localring import AtLeast, LocalRing, RingElement, as_prec
from .series import (BiSeries, FracSeries, Series, bi_substitute, compose,
                     conv)


def _ceil_div(a, b):
    return -(-a // b)


class FormalGroup:
    """Lubin-Tate formal group attached to f over ``f.ring``.

    Parameters
    ----------
    f : Series
        f = pi x + ... with f = x^q modulo pi; should be a polynomial.
    D : int
        Default degree cap for the group law and for derived series.
    level : str
        Label ("L" or "K") used in reports.
    """

    def __init__(self, f: Series, D: int = 32, level: str = "K"):
        self.ring: LocalRing = f.ring
        self.f = f
        self.D = int(D)
        self.level = level
        self._validate()
        self.pi = f.coeff(1)
        self._lock = threading.RLock()
        self._comps_c = [None, None]
        self._comps_p = [None, None]
        self._pow = {}
        self._ftab = None
        self._endo = {}
        self._embedded = {}
        self._g = None
        self._log = None
        self._exp = None
        self._iota = None
        self._init_law()

    # ----------------------------------------------------------- checks
    def _validate(self):
        f, ring = self.f, self.ring
        if f.D < 1:
            raise PreconditionError("f needs degree at least 1")
        if f.c[0].any():
            raise PreconditionError("f must have zero constant term")
        v1 = f.coeff(1).valuation()
        if isinstance(v1, AtLeast) or v1 != 1:
            raise PreconditionError("f must be pi*x mod x^2 with pi a "
                                    "uniformizer (valuation 1)")
        q = ring.q
        if q > f.D:
            raise PreconditionError(f"degree cap {f.D} of f is below q = {q}")
        one = ring.one()
        for m in range(2, f.D + 1):
            c = f.coeff(m)
            if m == q:
                if not ((c - one).valuation() >= 1):
                    raise PreconditionError(
                        f"f must be x^q modulo pi: coefficient of x^{q} is not "
                        "1 modulo pi")
            elif c.valuation() < 1:
                raise PreconditionError(
                    f"f must be x^q modulo pi: coefficient of x^{m} is a unit")
        self.q = q
        self.fdeg = f.degree() if f.poly else f.D

    def is_standard(self):
        """True when f = pi x + x^q exactly."""
        f = self.f
        if not f.poly or f.degree() != self.q:
            return False
        for m in range(2, self.q):
            if f.c[m].any():
                return False
        return f.coeff(self.q) == self.ring.one()

    # ------------------------------------------------------- powers of f
    def _powers_of_f(self, n):
        """Table P[i, a] = coefficient of x^a in f^i for i, a <= n."""
        if self._ftab is not None and self._ftab[0].shape[0] > n:
            return self._ftab
        with self._lock:
            if self._ftab is not None and self._ftab[0].shape[0] > n:
                return self._ftab
            size = max(n + 1, 2 * (self._ftab[0].shape[0] if self._ftab else 0))
            Dm = size - 1
            if self.f.D < Dm and not self.f.poly:
                raise BudgetError(f"f is only known to degree {self.f.D}")
            fs = self.f.extend(Dm) if self.f.D < Dm else self.f.truncate(Dm)
            ring = self.ring
            tc = np.zeros((size, size, ring.n), dtype=object)
            tp = np.zeros((size, size), dtype=np.int64)
            cur = Series.const(ring, 1, Dm)
            for i in range(size):
                tc[i], tp[i] = cur.c, cur.p
                if i < Dm:
                    cur = cur * fs
            self._ftab = (tc, tp, ring.val(tc, tp))
            return self._ftab

    def _fcoef(self, m):
        if m <= self.f.D:
            return self.f.c[m], int(self.f.p[m])
        if self.f.poly:
            return np.zeros(self.ring.n, dtype=object), self.ring.cap
        raise BudgetError(f"f is only known to degree {self.f.D}")

    def _denom(self, n):
        """pi^n - pi as coordinates."""
        pi = self.pi
        return (pi ** n) - pi

    # -------------------------------------------------------- group law
    def _init_law(self):
        ring = self.ring
        c1 = np.zeros((2, ring.n), dtype=object)
        c1[0, 0] = 1
        c1[1, 0] = 1
        self._comps_c[0] = np.zeros((1, ring.n), dtype=object)
        self._comps_p[0] = np.full(1, ring.cap, dtype=np.int64)
        self._comps_c[1] = c1
        self._comps_p[1] = np.full(2, ring.cap, dtype=np.int64)
        self._law_deg = 1

    def _extend_law(self, N):
        ring = self.ring
        with self._lock:
            if N <= self._law_deg:
                return
            tc, tp, tv = self._powers_of_f(N)
            mmax = self.fdeg
            for n in range(self._law_deg + 1, N + 1):
                # homogeneous powers of Phi at degree n (Phi_n unknown = 0)
                for m in range(2, min(n, mmax) + 1):
                    acc_c = np.zeros((n + 1, ring.n), dtype=object)
                    acc_p = np.full(n + 1, ring.cap, dtype=np.int64)
                    prev = self._pow.setdefault(m - 1, {}) if m > 2 else None
                    for d in range(1, n - m + 2):
                        A = self._comps_c[d]
                        Ap = self._comps_p[d]
                        if m == 2:
                            B, Bp = self._comps_c[n - d], self._comps_p[n - d]
                        else:
                            if (n - d) not in prev:
                                continue
                            B, Bp = prev[n - d]
                        cc, cp, _ = conv(ring, A, Ap, ring.val(A, Ap),
                                         B, Bp, ring.val(B, Bp), n)
                        acc_c += cc
                        acc_p = np.minimum(acc_p, cp)
                    self._pow.setdefault(m, {})[n] = (ring.reduce(acc_c, acc_p),
                                                      acc_p)
                # f o Phi at degree n without the linear term
                fphi_c = np.zeros((n + 1, ring.n), dtype=object)
                fphi_p = np.full(n + 1, ring.cap, dtype=np.int64)
                for m in range(2, min(n, mmax) + 1):
                    fm, fpm = self._fcoef(m)
                    pc, pp = self._pow[m][n]
                    mc, mp = ring.mul(pc, pp, np.broadcast_to(fm, pc.shape),
                                      np.full(n + 1, fpm, dtype=np.int64))
                    fphi_c += mc
                    fphi_p = np.minimum(fphi_p, mp)
                # Phi_{<n}(f(x), f(y)) at degree n
                I, J, A = [], [], []
                for dsum in range(1, n):
                    for i in range(dsum + 1):
                        j = dsum - i
                        for a in range(i, n - j + 1):
                            I.append(i)
                            J.append(j)
                            A.append(a)
                I = np.array(I)
                J = np.array(J)
                A = np.array(A)
                cc = np.empty((len(I), ring.n), dtype=object)
                cp = np.empty(len(I), dtype=np.int64)
                for k in range(len(I)):
                    cc[k] = self._comps_c[I[k] + J[k]][I[k]]
                    cp[k] = self._comps_p[I[k] + J[k]][I[k]]
                xc, xp, xv = tc[I, A], tp[I, A], tv[I, A]
                yc, yp, yv = tc[J, n - A], tp[J, n - A], tv[J, n - A]
                t1c, t1p = ring.mul(xc, xp, yc, yp, va=xv, vb=yv)
                t2c, t2p = ring.mul(t1c, t1p, cc, cp)
                phif_c = np.zeros((n + 1, ring.n), dtype=object)
                phif_p = np.full(n + 1, ring.cap, dtype=np.int64)
                np.add.at(phif_c, A, t2c)
                np.minimum.at(phif_p, A, t2p)
                E_c = ring.reduce(fphi_c - phif_c, np.minimum(fphi_p, phif_p))
                E_p = np.minimum(fphi_p, phif_p)
                b = self._denom(n)
                try:
                    qc, qp = ring.divide(E_c, E_p, b.c, as_prec(b.prec))
                except DivisibilityError as exc:
                    raise DivisibilityError(
                        f"group-law defect at degree {n} is not divisible by "
                        f"pi^{n} - pi", degree=n) from exc
                self._comps_c.append(qc)
                self._comps_p.append(qp)
                self._law_deg = n

    def law(self, D: Optional[int] = None) -> BiSeries:
        """F(x, y) truncated at total degree D."""
        D = self.D if D is None else D
        self._extend_law(D)
        return BiSeries.from_components(self.ring, self._comps_c[:D + 1],
                                        self._comps_p[:D + 1], D=D, poly=False)

    def homogeneous(self, n):
        """Coefficients of x^i y^(n-i), i = 0..n, as RingElements."""
        self._extend_law(n)
        return [RingElement(self.ring, self._comps_c[n][i],
                            int(self._comps_p[n][i])) for i in range(n + 1)]

    # ---------------------------------------------------- endomorphisms
    def endomorphism(self, a, D: Optional[int] = None) -> Series:
        """[a](x) to degree D, cached by the canonical form of a."""
        ring = self.ring
        D = self.D if D is None else D
        a = ring.element(a) if not isinstance(a, RingElement) else a
        if a.ring is not ring:
            a = a.project(ring) if ring.is_ancestor_of(a.ring) else ring.element(a)
        key = (tuple(int(x) for x in a.c), a.prec)
        hit = self._endo.get(key)
        if hit is not None and hit.D >= D:
            return hit.truncate(D)
        if a.prec >= ring.cap and a == self.pi and self.f.poly:
            # [pi] is f itself; avoid the precision loss of the general solve
            return self.f.extend(D) if self.f.D < D else self.f.truncate(D)
        s = self._build_endo(a, D)
        with self._lock:
            old = self._endo.get(key)
            if old is None or old.D < s.D:
                self._endo[key] = s
        return s

    def _build_endo(self, a: RingElement, D: int) -> Series:
        ring = self.ring
        tc, tp, tv = self._powers_of_f(D)
        mmax = min(self.fdeg, D)
        phc = np.zeros((D + 1, ring.n), dtype=object)
        php = np.full(D + 1, ring.cap, dtype=np.int64)
        phv = np.full(D + 1, ring.cap, dtype=np.int64)
        if D >= 1:
            phc[1], php[1] = a.c, a.prec
            phv[1] = int(a.valuation())
        # powc[m][k] = coefficient of x^k in phi^m
        powc = np.zeros((mmax + 1, D + 1, ring.n), dtype=object)
        powp = np.full((mmax + 1, D + 1), ring.cap, dtype=np.int64)
        if D >= 1:
            powc[1, 1], powp[1, 1] = a.c, a.prec
        for m in range(2, mmax + 1):
            if m <= D:
                cc, cp = ring.mul(powc[m - 1, m - 1], as_prec(powp[m - 1, m - 1]),
                                  a.c, as_prec(a.prec))
                powc[m, m], powp[m, m] = cc, cp
        for n in range(2, D + 1):
            for m in range(2, min(n, mmax) + 1):
                if n == m:
                    continue
                ds = np.arange(1, n - m + 2)
                cc, cp = ring.mul(phc[ds], php[ds], powc[m - 1, n - ds],
                                  powp[m - 1, n - ds], va=phv[ds])
                pm = int(cp.min())
                powc[m, n] = ring.reduce(cc.sum(axis=0), as_prec(pm))
                powp[m, n] = pm
            A_c = np.zeros(ring.n, dtype=object)
            A_p = ring.cap
            for m in range(2, min(n, mmax) + 1):
                fm, fpm = self._fcoef(m)
                mc, mp = ring.mul(powc[m, n], as_prec(powp[m, n]), fm, as_prec(fpm))
                A_c = A_c + mc
                A_p = min(A_p, int(mp))
            ms = np.arange(1, n)
            bc, bp = ring.mul(phc[ms], php[ms], tc[ms, n], tp[ms, n],
                              va=phv[ms], vb=tv[ms, n])
            B_p = int(bp.min())
            num_p = min(A_p, B_p)
            num = ring.reduce(A_c - bc.sum(axis=0), as_prec(num_p))
            b = self._denom(n)
            try:
                qc, qp = ring.divide(num, as_prec(num_p), b.c, as_prec(b.prec))
            except DivisibilityError as exc:
                raise DivisibilityError(
                    f"endomorphism defect at degree {n} not divisible",
                    degree=n) from exc
            phc[n], php[n] = qc, qp
            phv[n] = int(ring.val(qc, qp))
            powc[1, n], powp[1, n] = qc, qp
        return Series(ring, phc, php, poly=False)

    # ---------------------------------------------------------- inverse
    def formal_inverse(self, D: Optional[int] = None) -> Series:
        """iota with F(x, iota(x)) = 0, solved degree by degree."""
        D = self.D if D is None else D
        if self._iota is not None and self._iota.D >= D:
            return self._iota.truncate(D)
        ring = self.ring
        self._extend_law(D)
        ic = np.zeros((D + 1, ring.n), dtype=object)
        ip = np.full(D + 1, ring.cap, dtype=np.int64)
        # powc[j][k]: coefficient of x^k in iota^j
        powc = np.zeros((D + 1, D + 1, ring.n), dtype=object)
        powp = np.full((D + 1, D + 1), ring.cap, dtype=np.int64)
        powc[0, 0, 0] = 1
        if D >= 1:
            ic[1] = ring.const(-1)
            powc[1, 1] = ic[1]
            for j in range(2, D + 1):
                powc[j, j] = ring.const((-1) ** j)
        for n in range(2, D + 1):
            for j in range(2, n):
                ds = np.arange(1, n - j + 2)
                cc, cp = ring.mul(ic[ds], ip[ds], powc[j - 1, n - ds],
                                  powp[j - 1, n - ds])
                pm = int(cp.min())
                powc[j, n] = ring.reduce(cc.sum(axis=0), as_prec(pm))
                powp[j, n] = pm
            terms_c, terms_p = [], []
            I, J = [], []
            for i in range(0, n + 1):
                for j in range(0, n - i + 1):
                    if (i, j) == (0, 1) or i + j < 1 or i + j > n:
                        continue
                    if j > n - i:
                        continue
                    I.append(i)
                    J.append(j)
            I = np.array(I)
            J = np.array(J)
            cc = np.empty((len(I), ring.n), dtype=object)
            cp = np.empty(len(I), dtype=np.int64)
            for k in range(len(I)):
                cc[k] = self._comps_c[I[k] + J[k]][I[k]]
                cp[k] = self._comps_p[I[k] + J[k]][I[k]]
            pc, pp = ring.mul(cc, cp, powc[J, n - I], powp[J, n - I])
            s_p = int(pp.min())
            s = ring.reduce(-pc.sum(axis=0), as_prec(s_p))
            ic[n], ip[n] = s, s_p
            powc[1, n], powp[1, n] = s, s_p
        self._iota = Series(ring, ic, ip, poly=False)
        return self._iota

    # ------------------------------------------------------ embeddings
    def _law_in(self, ring: LocalRing, D: int) -> BiSeries:
        key = (id(ring), D)
        hit = self._embedded.get(key)
        if hit is not None:
            return hit
        F = self.law(D)
        if ring is not self.ring:
            c, p = ring.embed_from(self.ring, F.c, F.p)
            F = BiSeries(ring, c, p, poly=False)
        with self._lock:
            self._embedded[key] = F
        return F

    def _needed_degree(self, D, v0, ring, prec=None):
        P = ring.cap if prec is None else prec
        if v0 >= P:
            return D
        return D + _ceil_div(P, max(v0, 1))

    def _const_val(self, *series):
        return min(int(s.val()[0]) for s in series)

    # --------------------------------------------------- formal algebra
    def add(self, g: Series, h: Series, prec=None) -> Series:
        """g +_F h for series over this ring or an extension."""
        ring = g.ring
        v0 = self._const_val(g, h)
        if v0 == 0:
            raise DivergenceError("formal sum of series with unit constant term")
        DF = self._needed_degree(min(g.D, h.D), v0, ring, prec)
        F = self._law_in(ring, DF)
        if prec is not None:
            g, h = g.with_prec(prec), h.with_prec(prec)
        return bi_substitute(F, g, h)

    def neg(self, h: Series, prec=None) -> Series:
        ring = h.ring
        v0 = self._const_val(h)
        if v0 == 0:
            raise DivergenceError("formal negative of a series with unit "
                                  "constant term")
        Di = self._needed_degree(h.D, v0, ring, prec)
        iota = self.formal_inverse(Di)
        if ring is not self.ring:
            iota = iota.embed(ring)
        return compose(iota, h if prec is None else h.with_prec(prec))

    def sub(self, g: Series, h: Series, prec=None) -> Series:
        return self.add(g, self.neg(h, prec), prec)

    def fold(self, terms: Sequence[Series], prec=None) -> Series:
        """Left fold of the formal sum; empty fold is 0."""
        terms = list(terms)
        if not terms:
            raise PreconditionError("empty fold needs a ring and degree; use "
                                    "fold_or_zero")
        for k, t in enumerate(terms):
            if int(t.val()[0]) == 0:
                raise DivergenceError(f"term {k} has a unit constant term")
        acc = terms[0] if prec is None else terms[0].with_prec(prec)
        for t in terms[1:]:
            acc = self.add(acc, t, prec)
        return acc

    def fold_or_zero(self, terms, ring, D, prec=None):
        terms = list(terms)
        if not terms:
            return Series.zero(ring, D)
        return self.fold(terms, prec)

    def apply_endo(self, a, h: Series, prec=None) -> Series:
        """[a](h(x)) for h over this ring or an extension."""
        ring = h.ring
        v0 = self._const_val(h)
        if v0 == 0:
            raise DivergenceError("[a] applied to a series with unit constant")
        De = self._needed_degree(h.D, v0, ring, prec)
        e = self.endomorphism(a, De)
        if ring is not self.ring:
            e = e.embed(ring)
        return compose(e, h if prec is None else h.with_prec(prec))

    # ---------------------------------------------------- log and exp
    def invariant_differential(self, D: Optional[int] = None) -> Series:
        """g(x) = dF/dy(x, 0) from f'(x) g(x) = pi g(f(x))."""
        D = self.D if D is None else D
        if self._g is not None and self._g.D >= D:
            return self._g.truncate(D)
        ring = self.ring
        tc, tp, tv = self._powers_of_f(D)
        gc = np.zeros((D + 1, ring.n), dtype=object)
        gp = np.full(D + 1, ring.cap, dtype=np.int64)
        gv = np.full(D + 1, ring.cap, dtype=np.int64)
        gc[0] = ring.const(1)
        gv[0] = 0
        pi = self.pi
        # m * f_m as ring elements
        mf = []
        for m in range(2, min(self.fdeg, D + 1) + 1):
            fm, fpm = self._fcoef(m)
            el = RingElement(ring, fm, fpm) * m
            mf.append((m, el))
        for n in range(1, D + 1):
            acc = ring.zero()
            if n > 1:
                ks = np.arange(1, n)
                cc, cp = ring.mul(gc[ks], gp[ks], tc[ks, n], tp[ks, n],
                                  va=gv[ks], vb=tv[ks, n])
                pm = int(cp.min())
                acc = RingElement(ring, ring.reduce(cc.sum(axis=0), as_prec(pm)), pm)
                acc = acc * pi
            for m, el in mf:
                k = n + 1 - m
                if k < 0:
                    continue
                acc = acc - el * RingElement(ring, gc[k], int(gp[k]))
            den = pi - pi ** (n + 1)
            try:
                q = acc / den
            except DivisibilityError as exc:
                raise DivisibilityError(
                    f"invariant differential recursion failed at degree {n}",
                    degree=n) from exc
            gc[n], gp[n] = q.c, q.prec
            gv[n] = int(ring.val(q.c, as_prec(q.prec)))
        self._g = Series(ring, gc, gp, poly=False)
        return self._g

    def log_series(self, D: Optional[int] = None) -> FracSeries:
        """Formal logarithm as num / pi^shift."""
        D = self.D if D is None else D
        if self._log is not None and self._log.D >= D:
            return self._log.truncate(D)
        g = self.invariant_differential(D)
        lg = FracSeries.antiderivative(g.inverse())
        self._check_log_denominators(lg)
        self._log = lg
        return lg

    def _check_log_denominators(self, lg: FracSeries):
        # coefficient of x^n has valuation >= -floor(log_q n) * v(q)/... ;
        # we assert the weaker, always-valid bound -v(n)
        ring = self.ring
        for n in range(1, lg.D + 1):
            v = lg.coeff_val(n)
            bound = -int(ring.element(n).valuation())
            if not isinstance(v, AtLeast) and v < bound:
                raise DivisibilityError(
                    f"log coefficient {n} has valuation {v} < {bound}", degree=n)

    def exp_series(self, D: Optional[int] = None) -> FracSeries:
        """Compositional inverse of log by Newton iteration."""
        D = self.D if D is None else D
        if self._exp is not None and self._exp.D >= D:
            return self._exp.truncate(D)
        ring = self.ring
        lg = self.log_series(D)
        g = self.invariant_differential(D)
        xs = Series.x(ring, D)
        E = FracSeries(xs, 0)
        gF = FracSeries(g, 0)
        k = 1
        while k <= 2 * D:
            delta = lg.compose(E) - xs
            E = E - delta * gF.compose(E)
            k *= 2
        self._exp = E
        return E

    def build_log_exp(self, D: Optional[int] = None):
        return self.log_series(D), self.exp_series(D)

    # ------------------------------------------------------- transport
    def _domain_check(self, h: Series, pi_val: int):
        v = h.val()
        bad = np.nonzero((v < pi_val) & (v < h.p))[0]
        if len(bad):
            from .errors import PreconditionError as PE
            k = int(bad[0])
            raise PE(f"coefficient {k} has valuation {int(v[k])} below "
                     f"v(pi_L) = {pi_val}; transport needs a pi_L-divisible "
                     "series")

    def transport_log(self, h: Series) -> Series:
        ring = h.ring
        pi_val = int(self.ring.uniformizer.embed(ring).valuation()) \
            if ring is not self.ring else 1
        self._domain_check(h, pi_val)
        v0 = max(int(h.val()[0]), pi_val)
        shift_guess = 8
        for _ in range(3):
            Dl = h.D + _ceil_div(ring.cap + shift_guess * pi_val, v0)
            lg = self.log_series(Dl)
            lge = lg.embed(ring) if ring is not self.ring else lg
            if lge.shift <= shift_guess * pi_val:
                break
            shift_guess = _ceil_div(lge.shift, pi_val) + 1
        out = compose(lge.num, h)
        return out.div_pi(lge.shift) if lge.shift else out

    def transport_exp(self, h: Series, max_iter: int = 64) -> Series:
        ring = h.ring
        pi_val = int(self.ring.uniformizer.embed(ring).valuation()) \
            if ring is not self.ring else 1
        self._domain_check(h, pi_val)
        v0 = max(int(h.val()[0]), pi_val)
        Dg = h.D + _ceil_div(ring.cap, v0)
        g = self.invariant_differential(Dg)
        if ring is not self.ring:
            g = g.embed(ring)
        r = h
        for _ in range(max_iter):
            delta = self.transport_log(r) - h
            if delta.is_zero():
                return r
            r = r - delta * compose(g, r)
        raise BudgetError("exp transport did not converge")

    def transport(self, direction: str, h: Series) -> Series:
        if direction == "log":
            return self.transport_log(h)
        if direction == "exp":
            return self.transport_exp(h)
        raise PreconditionError(f"unknown direction {direction!r}")

    def __repr__(self):
        return (f"FormalGroup(level={self.level}, ring={self.ring.name}, "
                f"q={self.q}, D={self.D})")


def standard_f(ring: LocalRing, D: Optional[int] = None, pi=None) -> Series:
    """pi x + x^q for the ring's uniformizer (or a given one)."""
    q = ring.q
    pi = ring.uniformizer if pi is None else ring.element(pi)
    D = q if D is None else D
    coeffs = [0, pi] + [0] * (q - 2) + [1]
    return Series.from_coeffs(ring, coeffs, D=max(D, q))


def multiplicative_f(ring: LocalRing, D: Optional[int] = None) -> Series:
    """(1 + x)^p - 1 over Z_p."""
    from math import comb
    p = ring.p
    coeffs = [0] + [comb(p, k) for k in range(1, p + 1)]
    D = p if D is None else D
    return Series.from_coeffs(ring, coeffs, D=max(D, p))


# functional spellings of the main operations
def build_group_law(f: Series, D: int = 32, level: str = "K") -> FormalGroup:
    return FormalGroup(f, D=D, level=level)


def build_endomorphism(G: FormalGroup, a, D: Optional[int] = None) -> Series:
    return G.endomorphism(a, D)


def formal_inverse(G: FormalGroup, D: Optional[int] = None) -> Series:
    return G.formal_inverse(D)


def formal_fold(G: FormalGroup, terms, prec=None) -> Series:
    return G.fold(terms, prec)


def build_log_exp(G: FormalGroup, D: Optional[int] = None):
    return G.build_log_exp(D)


def transport(G: FormalGroup, direction: str, h: Series) -> Series:
    return G.transport(direction, h)

