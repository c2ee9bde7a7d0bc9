"""Torsion algebra, Coleman's trace operator, its preimage and kernel.

The torsion algebra O_K[u]/(f_K(u)/u) is itself the ring of integers of a
totally ramified extension of degree q - 1 (f_K(u)/u is Eisenstein), so it
is modelled as one more Eisenstein level on top of O_K.  Its valuation is
normalized by the class u0 of u; one unit of pi_K is q - 1 algebra units.

For a root z the series S_z(x) = x +_K z is obtained without the group law
of K: it is the unique series with S_z(0) = z and f_K(S_z) = f_K(x), solved
one degree at a time.  Symmetric sums over the roots then descend to O_K
and are de-substituted through [pi_K](x) = f_K(x).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import (BudgetError, DescentError, DivisibilityError,
                     PreconditionError)
from .formalgroup import FormalGroup
from .localring import LocalRing, RingElement, as_prec, residue_representatives
from .series import Series, SigmaPowers, compose, desubstitute


def _ceil_div(a, b):
    return -(-a // b)


class TorsionAlgebra:
    """O_K[u]/(f_K(u)/u) with the roots of f_K and the series x +_K z.

    Parameters
    ----------
    G_K : FormalGroup
        Formal group of K; f_K must be a polynomial of degree q_K with
        leading coefficient 1.
    """

    def __init__(self, G_K: FormalGroup):
        K = G_K.ring
        f = G_K.f
        q = G_K.q
        if not f.poly or f.degree() != q or not (f.coeff(q) == K.one()):
            raise PreconditionError("the torsion algebra needs f_K to be a "
                                    "polynomial of degree q_K with leading "
                                    "coefficient 1")
        self.G_K = G_K
        self.K = K
        self.q = q
        coeffs = [[int(x) for x in f.c[m]] for m in range(1, q + 1)]
        self.A: LocalRing = K.extend(coeffs, name="u", kind="eisenstein",
                                     cap=K.cap * (q - 1))
        self.u0 = self.A.generator
        self._lock = threading.RLock()
        self._shift = {}
        self._powers = {}
        self.roots = self._build_roots()

    @property
    def scale(self):
        """Algebra valuation units per pi_K."""
        return self.q - 1

    def _build_roots(self):
        A = self.A
        Dz = A.cap
        out = []
        for a in residue_representatives(self.K):
            if a.is_zero():
                out.append(A.zero())
            elif a == self.K.one():
                out.append(self.u0)
            else:
                e = self.G_K.endomorphism(a, Dz)
                out.append(e(self.u0))
        return out

    # ---------------------------------------------------- invariants
    def check_roots(self):
        """Return the worst valuation of f_K at the roots and closure flag."""
        fA = self.G_K.f.embed(self.A)
        worst = None
        for z in self.roots:
            r = fA(z)
            if not r.is_zero():
                v = r.valuation()
                worst = v if worst is None else min(worst, v)
        return worst

    # ---------------------------------------------- x +_K z series
    def shift_series(self, k: int, D: int) -> Series:
        """S(x) = x +_K z_k to degree D in the algebra."""
        key = (k, D)
        hit = self._shift.get(key)
        if hit is not None:
            return hit
        for (kk, DD), s in list(self._shift.items()):
            if kk == k and DD >= D:
                return s.truncate(D)
        s = self._solve_shift(self.roots[k], D)
        with self._lock:
            self._shift[key] = s
        return s

    def _solve_shift(self, z: RingElement, D: int) -> Series:
        A = self.A
        q = self.q
        if z.is_zero():
            return Series.x(A, D)
        fA = self.G_K.f.embed(A)
        fc = [fA.coeff(m) for m in range(q + 1)]
        fprime = A.zero()
        zp = [A.one()]
        for m in range(1, q + 1):
            zp.append(zp[-1] * z)
        for m in range(1, q + 1):
            fprime = fprime + fc[m] * zp[m - 1] * m
        n_ = A.n
        sc = np.zeros((D + 1, n_), dtype=object)
        sp = np.full(D + 1, A.cap, dtype=np.int64)
        sc[0], sp[0] = z.c, z.prec
        powc = np.zeros((q + 1, D + 1, n_), dtype=object)
        powp = np.full((q + 1, D + 1), A.cap, dtype=np.int64)
        for m in range(q + 1):
            powc[m, 0], powp[m, 0] = zp[m].c, zp[m].prec
        mz = [None] + [zp[m - 1] * m for m in range(1, q + 1)]
        for n in range(1, D + 1):
            for m in range(2, q + 1):
                ds = np.arange(0, n)
                cc, cp = A.mul(sc[ds], sp[ds], powc[m - 1, n - ds],
                               powp[m - 1, n - ds])
                pm = int(cp.min())
                powc[m, n] = A.reduce(cc.sum(axis=0), as_prec(pm))
                powp[m, n] = pm
            known = A.zero()
            for m in range(2, q + 1):
                known = known + fc[m] * RingElement(A, powc[m, n], int(powp[m, n]))
            target = fc[n] if n <= q else A.zero()
            s_n = (target - known) / fprime
            sc[n], sp[n] = s_n.c, s_n.prec
            powc[1, n], powp[1, n] = s_n.c, s_n.prec
            for m in range(2, q + 1):
                upd = RingElement(A, powc[m, n], int(powp[m, n])) + mz[m] * s_n
                powc[m, n], powp[m, n] = upd.c, upd.prec
        return Series(A, sc, sp, poly=False)

    # ------------------------------------------------- symmetric sums
    def root_sum(self, f: Series, D: Optional[int] = None) -> Series:
        """sum_z f(x +_K z) in the algebra, truncated at degree D."""
        D = f.D if D is None else D
        fA = f.embed(self.A)
        total = None
        for k in range(len(self.roots)):
            S = self.shift_series(k, D)
            term = compose(fA, S)
            total = term if total is None else total + term
        return total

    def descend(self, h: Series) -> Series:
        """Project a symmetric algebra series to O_K; non-base parts must vanish."""
        out, ok = h.project(self.K)
        if not np.all(ok):
            bad = int(np.nonzero(~ok)[0][0])
            raise DescentError(f"non-base component survives at degree {bad}")
        return out

    def monomial_sums(self, J: int, D: int):
        """Descended sum_z S_z(x)^j for j = 0..J as a (J+1, D+1) table."""
        key = (J, D)
        for (JJ, DD), tab in list(self._powers.items()):
            if JJ >= J and DD == D:
                return tab[0][:J + 1], tab[1][:J + 1]
        K = self.K
        tc = np.zeros((J + 1, D + 1, K.n), dtype=object)
        tp = np.zeros((J + 1, D + 1), dtype=np.int64)
        acc = None
        for k in range(len(self.roots)):
            S = self.shift_series(k, D)
            cur = Series.const(self.A, 1, D)
            rows_c = np.zeros((J + 1, D + 1, self.A.n), dtype=object)
            rows_p = np.zeros((J + 1, D + 1), dtype=np.int64)
            for j in range(J + 1):
                rows_c[j], rows_p[j] = cur.c, cur.p
                if j < J:
                    cur = cur * S
            if acc is None:
                acc = (rows_c, rows_p)
            else:
                c, p = self.A.add(acc[0], acc[1], rows_c, rows_p)
                acc = (c, p)
        c, p, ok = self.A.project_to(K, acc[0], acc[1])
        if not np.all(ok):
            j, d = np.argwhere(~ok)[0]
            raise DescentError(f"non-base component survives in the power sum "
                               f"of x^{j} at degree {d}")
        with self._lock:
            self._powers[key] = (c, p)
        return c, p


@dataclass
class TraceMatrix:
    """Coefficients of L(x^j) for j = 0..J up to y-degree D."""

    c: np.ndarray
    p: np.ndarray
    J: int
    D: int

    def column(self, ring, j) -> Series:
        return Series(ring, self.c[:, j], self.p[:, j])


class TraceOperator:
    """Coleman's trace operator for a formal group over O_K."""

    def __init__(self, G_K: FormalGroup, algebra: TorsionAlgebra):
        self.G_K = G_K
        self.T = algebra
        self.K = G_K.ring
        self._lock = threading.RLock()
        self._mats = {}
        self._tables = {}

    @property
    def q(self):
        return self.G_K.q

    def sigma(self, D):
        return self.G_K.f.extend(D) if self.G_K.f.D < D else self.G_K.f.truncate(D)

    def powers(self, D) -> SigmaPowers:
        """Cached table of [pi_K](x)^m up to degree D."""
        with self._lock:
            for DD, tab in self._tables.items():
                if DD >= D:
                    return tab
        tab = SigmaPowers(self.sigma(D), D)
        with self._lock:
            self._tables[D] = tab
        return tab

    def substitute(self, g: Series) -> Series:
        """g([pi_K](x)) at the degree of g."""
        return self.powers(g.D).substitute(g)

    def desubstitute(self, h: Series) -> Series:
        return desubstitute(h, self.sigma(h.D), powers=self.powers(h.D))

    def apply(self, f: Series, D: Optional[int] = None, method="auto") -> Series:
        """L(f) to y-degree D (defaults to f's degree cap).

        Polynomials go through the monomial matrix unless method="roots";
        truncated series always use the root sums with the tail bound.
        """
        D = f.D if D is None else D
        if f.ring is not self.K:
            raise PreconditionError("trace operator input must be over O_K")
        if f.poly and method != "roots":
            return self.apply_poly(f, D)
        h = self.T.root_sum(f, D)
        hk = self.T.descend(h)
        try:
            return self.desubstitute(hk)
        except DivisibilityError as exc:
            raise DescentError(f"de-substitution failed at degree {exc.degree}: "
                               "precision budget breached") from exc

    def root_sum_K(self, f: Series, D: Optional[int] = None) -> Series:
        """sum_z f(x +_K z) descended to O_K (not de-substituted)."""
        D = f.D if D is None else D
        return self.T.descend(self.T.root_sum(f, D))

    def matrix(self, J: int, D: int) -> TraceMatrix:
        """Matrix whose column j is L(x^j), rows y^0..y^D.

        The power sums of the roots of f_K(X) = y are polynomials in y of
        degree <= j/q, so column j is de-substituted only that far; the
        rows above are checked to vanish and then set to exact zeros.
        """
        for (JJ, DD), M in list(self._mats.items()):
            if JJ >= J and DD == D:
                return TraceMatrix(M.c[:, :J + 1], M.p[:, :J + 1], J, D)
        K = self.K
        q = self.q
        Dr = min(D, J // q + 1)
        tc, tp = self.T.monomial_sums(J, Dr)
        mc = np.zeros((D + 1, J + 1, K.n), dtype=object)
        mp = np.full((D + 1, J + 1), K.cap, dtype=np.int64)
        for j in range(J + 1):
            h = Series(K, tc[j], tp[j])
            try:
                col = self.desubstitute(h)
            except DivisibilityError as exc:
                raise DescentError(f"de-substitution of the x^{j} power sum "
                                   f"failed at degree {exc.degree}") from exc
            top = min(Dr, j // q)
            v = col.val()
            extra = np.nonzero(v[top + 1:] < col.p[top + 1:])[0]
            if len(extra):
                raise DescentError(f"L(x^{j}) has a nonzero coefficient at "
                                   f"degree {top + 1 + int(extra[0])} > j/q")
            mc[:top + 1, j], mp[:top + 1, j] = col.c[:top + 1], col.p[:top + 1]
        M = TraceMatrix(mc, mp, J, D)
        with self._lock:
            self._mats[(J, D)] = M
        return M

    def apply_poly(self, f: Series, D: Optional[int] = None) -> Series:
        """L(f) for a polynomial f via the cached monomial matrix."""
        if not f.poly:
            raise PreconditionError("apply_poly needs a polynomial")
        D = f.D if D is None else D
        J = max(f.degree(), 0)
        M = self.matrix(J, D)
        K = self.K
        cf = np.broadcast_to(f.c[:J + 1][None], (D + 1, J + 1, K.n))
        pf = np.broadcast_to(f.p[:J + 1][None], (D + 1, J + 1))
        pc, pp = K.mul(M.c, M.p, cf, pf)
        P = pp.min(axis=1)
        return Series(K, K.reduce(pc.sum(axis=1), P), P, poly=True)

    # ---------------------------------------------------- linear algebra
    def preimage(self, s: Series, J: Optional[int] = None) -> Series:
        """A polynomial t with L(t) = s, echelon solution with free variables 0."""
        K = self.K
        D = s.D
        v = s.val()
        bad = np.nonzero((v < 1) & (v < s.p))[0]
        if len(bad):
            raise PreconditionError(f"target is not divisible by pi_K "
                                    f"(coefficient {int(bad[0])})")
        J = self.q * (D + 1) + self.q - 1 if J is None else J
        M = self.matrix(J, D)
        ech = column_echelon(K, M.c, M.p)
        c, p = ech.solve(s.c, s.p)
        return Series(K, c, p, poly=True)

    def kernel(self, D: int) -> List[Series]:
        """Polynomials of degree <= D spanning the truncated kernel of L."""
        M = self.matrix(D, D)
        ech = column_echelon(self.K, M.c, M.p)
        return [Series(self.K, c, p, poly=True) for c, p in ech.kernel()]

    def eigen_nullspace(self, alpha: RingElement, D: int) -> List[Series]:
        """Polynomial solutions of L(g) = alpha g at truncation D."""
        K = self.K
        M = self.matrix(D, D)
        c = M.c.copy()
        p = M.p.copy()
        a = K.element(alpha)
        for j in range(D + 1):
            nc, np_ = K.sub(c[j, j], as_prec(p[j, j]), a.c, as_prec(a.prec))
            c[j, j], p[j, j] = nc, np_
        ech = column_echelon(K, c, p)
        return [Series(K, cc, pp, poly=True) for cc, pp in ech.kernel()]


class Echelon:
    """Result of column echelon reduction M U = C over a DVR."""

    def __init__(self, ring, C, Cp, U, Up, pivots):
        self.ring = ring
        self.C, self.Cp = C, Cp
        self.U, self.Up = U, Up
        self.pivots = pivots      # list of (row, col)

    def rank(self):
        return len(self.pivots)

    def solve(self, s, sp):
        """Forward substitution; returns coordinates of t in the monomial basis."""
        R = self.ring
        rows, cols = self.Cp.shape
        tprime_c = np.zeros((cols, R.n), dtype=object)
        tprime_p = np.full(cols, R.cap, dtype=np.int64)
        piv_of_row = {r: c for r, c in self.pivots}
        used = []
        for r in range(rows):
            # residual of row r
            acc_c, acc_p = s[r], int(sp[r])
            if used:
                idx = np.array(used)
                pc, pp = R.mul(self.C[r, idx], self.Cp[r, idx],
                               tprime_c[idx], tprime_p[idx])
                acc_p = min(acc_p, int(pp.min()))
                acc_c = R.reduce(acc_c - pc.sum(axis=0), as_prec(acc_p))
            if r in piv_of_row:
                c = piv_of_row[r]
                try:
                    qc, qp = R.divide(acc_c, as_prec(acc_p), self.C[r, c],
                                      as_prec(self.Cp[r, c]))
                except DivisibilityError:
                    raise BudgetError(
                        f"linear system inconsistent at row {r}; increase the "
                        "degree or precision budget") from None
                tprime_c[c], tprime_p[c] = qc, qp
                used.append(c)
            else:
                v = int(R.val(acc_c, as_prec(acc_p)))
                if v < acc_p:
                    raise BudgetError(
                        f"linear system inconsistent at row {r} (residual of "
                        f"valuation {v}); increase the degree budget")
        # t = U t'
        pc, pp = R.mul(self.U, self.Up,
                       np.broadcast_to(tprime_c[None], self.U.shape),
                       np.broadcast_to(tprime_p[None], self.Up.shape))
        P = pp.min(axis=1)
        return R.reduce(pc.sum(axis=1), P), P

    def kernel(self):
        """Columns of U whose image columns vanish."""
        R = self.ring
        pivot_cols = {c for _, c in self.pivots}
        out = []
        for c in range(self.Cp.shape[1]):
            if c in pivot_cols:
                continue
            col = self.C[:, c]
            if np.any(col != 0):
                continue
            # certified only as far as the image column is known to vanish
            P = np.minimum(self.Up[:, c], int(self.Cp[:, c].min()))
            out.append((self.ring.reduce(self.U[:, c], P), P))
        return out


def column_echelon(R: LocalRing, M, Mp) -> Echelon:
    """Column reduction with valuation pivoting, row by row.

    For each row the unused column of least valuation becomes the pivot and
    clears the row in the other unused columns.  Column operations are
    unimodular, so zero columns of the result give a saturated kernel.
    """
    rows, cols = Mp.shape
    C = M.copy()
    Cp = Mp.copy()
    U = np.zeros((cols, cols, R.n), dtype=object)
    U[np.arange(cols), np.arange(cols), 0] = 1
    Up = np.full((cols, cols), R.cap, dtype=np.int64)
    free = list(range(cols))
    pivots = []
    for r in range(rows):
        if not free:
            break
        idx = np.array(free)
        v = R.val(C[r, idx], Cp[r, idx])
        nz = v < Cp[r, idx]
        if not np.any(nz):
            continue
        vmin = int(v[nz].min())
        k = int(idx[np.nonzero(nz & (v == vmin))[0][0]])
        pivots.append((r, k))
        free.remove(k)
        if not free:
            break
        others = np.array(free)
        piv_c, piv_p = C[r, k], as_prec(Cp[r, k])
        fc, fp = R.divide(C[r, others], Cp[r, others], piv_c, piv_p)
        # C[:, others] -= C[:, k] * factor ; same for U
        for X, Xp in ((C, Cp), (U, Up)):
            colc = np.broadcast_to(X[:, k][:, None], (X.shape[0], len(others), R.n))
            colp = np.broadcast_to(Xp[:, k][:, None], (X.shape[0], len(others)))
            prc, prp = R.mul(colc, colp,
                             np.broadcast_to(fc[None], colc.shape),
                             np.broadcast_to(fp[None], colp.shape))
            nc, np_ = R.sub(X[:, others], Xp[:, others], prc, prp)
            X[:, others] = nc
            Xp[:, others] = np_
        # the pivot row is now exactly zero in the other columns
        C[r, others] = 0
    return Echelon(R, C, Cp, U, Up, pivots)


# functional spellings of the main operations
def build_torsion_algebra(G_K: FormalGroup) -> TorsionAlgebra:
    return TorsionAlgebra(G_K)


def _operator(G_K, algebra) -> TraceOperator:
    op = getattr(algebra, "_operator", None)
    if op is None or op.G_K is not G_K:
        op = TraceOperator(G_K, algebra)
        algebra._operator = op
    return op


def trace_operator(G_K: FormalGroup, algebra: TorsionAlgebra, f: Series,
                   D: Optional[int] = None) -> Series:
    return _operator(G_K, algebra).apply(f, D)


def trace_preimage(G_K: FormalGroup, algebra: TorsionAlgebra, s: Series) -> Series:
    return _operator(G_K, algebra).preimage(s)


def kernel_basis(G_K: FormalGroup, algebra: TorsionAlgebra, D: int) -> List[Series]:
    return _operator(G_K, algebra).kernel(D)

