"""Norm-compatible modules, eigenspaces of the trace operator and the maps
between them.

Notation: L-level formal group G_L over O_L (embedded into O_K when acting
on O_K-series), K-level formal group G_K over O_K, torsion algebra for the
roots of f_K.  Valuations are normalized by pi_K unless stated otherwise.

Membership tests compare the two sides of a defining equation with ordinary
subtraction.  For a formal group law a -_F b = (a - b) * unit, so the two
differences generate the same ideal and the verdicts agree.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Union

import numpy as np

from .errors import (BudgetError, ColemanError, ConvergenceError,
                     DescentError, DivisibilityError, PreconditionError)
from .formalgroup import FormalGroup, standard_f
from .localring import RingElement, TowerSpec, as_prec
from .series import Series, compose, desubstitute
from .trace import TorsionAlgebra, TraceOperator

log = logging.getLogger(__name__)

Alpha = Union[RingElement, Series, int]


def _ceil_div(a, b):
    return -(-a // b)


# ---------------------------------------------------------------- context
@dataclass
class Context:
    """Everything the eigenspace maps need for one tower and budget."""

    tower: TowerSpec
    G_L: FormalGroup
    G_K: FormalGroup
    algebra: TorsionAlgebra
    trace: TraceOperator
    D: int = 32
    N: int = 16

    @classmethod
    def build(cls, tower: TowerSpec, D: int = 32, N: int = 16):
        K, L = tower.O_K, tower.O_L
        G_K = FormalGroup(standard_f(K), D=D, level="K")
        G_L = G_K if L is K else FormalGroup(standard_f(L), D=D, level="L")
        algebra = TorsionAlgebra(G_K)
        return cls(tower, G_L, G_K, algebra, TraceOperator(G_K, algebra), D, N)

    @property
    def K(self):
        return self.tower.O_K

    @property
    def L(self):
        return self.tower.O_L

    @property
    def q_K(self):
        return self.G_K.q

    @property
    def q_L(self):
        return self.G_L.q

    def f_K(self, D):
        f = self.G_K.f
        return f.extend(D) if f.D < D else f.truncate(D)

    def alpha_L(self, alpha) -> RingElement:
        """alpha as an element of O_L (ints and O_L elements accepted)."""
        if isinstance(alpha, RingElement):
            if alpha.ring is self.L:
                return alpha
            try:
                return alpha.project(self.L)
            except DescentError:
                raise PreconditionError("alpha must lie in O_L") from None
        return self.L.element(alpha)


# --------------------------------------------------------------- reports
@dataclass
class MembershipReport:
    """Verdict of a congruence check with the precision it was decided at."""

    verdict: str
    checked_precision: int
    checked_degree: int
    witness: Optional[int] = None
    kind: str = ""
    detail: str = ""

    @property
    def passed(self):
        return self.verdict == "pass"

    def to_dict(self):
        return {"verdict": self.verdict,
                "checked_precision": int(self.checked_precision),
                "checked_degree": int(self.checked_degree),
                "witness": None if self.witness is None else int(self.witness),
                "kind": self.kind, "detail": self.detail}

    def __str__(self):
        w = "" if self.witness is None else f", witness degree {self.witness}"
        return (f"{self.kind or 'check'}: {self.verdict} (mod pi^"
                f"{self.checked_precision} up to degree {self.checked_degree}{w})")


def zero_report(diff: Series, modulus: Optional[int] = None,
                degree: Optional[int] = None, kind="") -> MembershipReport:
    """Decide diff == 0 mod pi^modulus up to the requested degree.

    With modulus None the check runs at the precision available, which must
    be at least 1.  Definite nonzero coefficients give "fail"; precision or
    degree shortfall gives "indeterminate".
    """
    v = diff.val()
    p = diff.p
    deg = diff.D if degree is None else min(degree, diff.D)
    m = modulus
    for d in range(deg + 1):
        bound = p[d] if m is None else min(p[d], m)
        if v[d] < bound:
            return MembershipReport("fail", int(v[d]), d, witness=d, kind=kind,
                                    detail="coefficient is nonzero at its "
                                           "precision")
    if m is None:
        P = int(p[:deg + 1].min())
        if P < 1:
            bad = int(np.nonzero(p[:deg + 1] < 1)[0][0])
            return MembershipReport("indeterminate", 0, bad - 1, kind=kind,
                                    detail="no precision left")
        return MembershipReport("pass", P, deg, kind=kind)
    short = np.nonzero(p[:deg + 1] < m)[0]
    if len(short):
        d0 = int(short[0])
        return MembershipReport("indeterminate", m, d0 - 1, kind=kind,
                                detail=f"precision {int(p[d0])} < {m} at "
                                       f"degree {d0}")
    return MembershipReport("pass", m, deg, kind=kind)


def achieved(diff: Series, modulus: int):
    """Largest D' with every coefficient <= D' known mod pi^modulus."""
    ok = diff.p >= modulus
    if ok.all():
        return diff.D
    return int(np.argmin(ok)) - 1


# -------------------------------------------------------- building blocks
def _check_const(f: Series, what="series"):
    v0 = int(f.val()[0])
    if v0 < 1 and v0 < f.p[0]:
        raise PreconditionError(f"{what} needs a constant term divisible by "
                                "pi_K")


def lt_root_sum(f: Series, ctx: Context, prec: Optional[int] = None) -> Series:
    """Fold of f(x +_K z) over all roots z under the L-level law, in O_K.

    prec is the target precision in pi_K units; the fold works in the
    torsion algebra at (q_K - 1) times that.
    """
    _check_const(f)
    A = ctx.algebra
    P = ctx.K.cap if prec is None else min(prec, ctx.K.cap)
    PA = P * A.scale
    fA = f.with_prec(P).embed(A.A)
    terms = [compose(fA, A.shift_series(k, f.D)) for k in range(len(A.roots))]
    total = ctx.G_L.fold(terms, prec=PA)
    return A.descend(total)


def pi_K_substitute(f: Series, ctx: Context) -> Series:
    """f([pi_K]_K(x)) at the degree of f."""
    return ctx.trace.substitute(f)


def endo_L(alpha, h: Series, ctx: Context, prec=None) -> Series:
    """[alpha]_L(h) for a series over O_K."""
    return ctx.G_L.apply_endo(ctx.alpha_L(alpha), h, prec)


def t_operator(f: Series, alpha, ctx: Context, prec: Optional[int] = None) -> Series:
    """T(f) = (LT-fold of f(x +_K z)) -_L [alpha]_L(f([pi_K] x))."""
    _check_const(f, "T")
    P = ctx.K.cap if prec is None else prec
    left = lt_root_sum(f, ctx, P)
    right = endo_L(alpha, pi_K_substitute(f, ctx), ctx, P)
    return ctx.G_L.sub(left, right, P)


def check_membership(kind: str, r: Series, alpha: Optional[Alpha], ctx: Context,
                     modulus: Optional[int] = None, degree: Optional[int] = None,
                     restricted: bool = False) -> MembershipReport:
    """Test r against the defining equation of the module named by kind.

    A: LT-fold of r(x +_K z) = [alpha]_L(r([pi_K] x)), v(r(0)) >= 1.
    D: LT-fold of r(x +_K z) = 0.
    E: L(r) = alpha r (alpha constant or a series).
    C: L(r) = 0.
    restricted adds the pi_L-divisibility requirement of the pi_L-variants.
    """
    kind = kind.upper()
    if kind not in "ADEC" or len(kind) != 1:
        raise PreconditionError(f"unknown membership kind {kind!r}")
    if r.is_zero():
        return MembershipReport("pass", int(r.p.min()), r.D, kind=kind)
    if restricted:
        vpl = int(ctx.tower.pi_L.valuation())
        v = r.val()
        bad = np.nonzero((v < vpl) & (v < r.p))[0]
        if len(bad):
            return MembershipReport("fail", int(v[bad[0]]), int(bad[0]),
                                    witness=int(bad[0]), kind=kind,
                                    detail="not divisible by pi_L")
    try:
        if kind in "AD":
            _check_const(r, f"kind {kind} membership")
            P = ctx.K.cap if modulus is None else min(ctx.K.cap, modulus + 2)
            left = lt_root_sum(r, ctx, P)
            if kind == "A":
                right = endo_L(alpha, pi_K_substitute(r, ctx), ctx, P)
                diff = left - right
            else:
                diff = left
        else:
            Lr = ctx.trace.apply(r)
            if kind == "C":
                diff = Lr
            elif isinstance(alpha, Series):
                diff = Lr - alpha.truncate(r.D) * r
            else:
                a = ctx.K.element(alpha if not isinstance(alpha, RingElement)
                                  else alpha.embed(ctx.K))
                diff = Lr - r.scale(a)
    except (BudgetError, DivisibilityError) as exc:
        return MembershipReport("indeterminate", 0, -1, kind=kind,
                                detail=f"budget: {exc}")
    return zero_report(diff, modulus, degree, kind=kind)


# ------------------------------------------------------------ phi and k, w
def phi_alpha(r: Series, alpha, ctx: Context, prec=None) -> Series:
    """[q_K/alpha]_L(r) -_L r([pi_K] x)."""
    a = ctx.alpha_L(alpha)
    qk = ctx.L.element(ctx.q_K)
    try:
        ratio = qk / a
        qk.div_pi(1) / a
    except ColemanError:
        raise PreconditionError("alpha must divide q_K / pi_L in O_L") from None
    _check_const(r, "phi")
    left = endo_L(ratio, r, ctx, prec)
    right = pi_K_substitute(r, ctx)
    return ctx.G_L.sub(left, right, prec)


@dataclass
class KWPair:
    """k = -x^(q-1)/(q-1) and w with L(k) = pi_K w."""

    k: Series
    w: Series
    ctx: Context = field(repr=False)
    _winv: dict = field(default_factory=dict, repr=False)

    def w_pi_inverse(self, D: int) -> Series:
        """1 / w([pi_K](x)) to degree D."""
        hit = self._winv.get(D)
        if hit is None:
            w = self.w if self.w.D >= D else _extend_w(self, D)
            hit = self.ctx.trace.substitute(w.truncate(D)).inverse()
            self._winv[D] = hit
        return hit


def _extend_w(kw: KWPair, D: int) -> Series:
    k = _k_series(kw.ctx, D)
    return kw.ctx.trace.apply(k).div_pi(1)


def _k_series(ctx: Context, D: int) -> Series:
    q = ctx.q_K
    K = ctx.K
    coef = -(K.element(q - 1).inverse())
    return Series.from_coeffs(K, [0] * (q - 1) + [coef], D=D, poly=True)


def build_k_w(ctx: Context, D: Optional[int] = None) -> KWPair:
    """Construct k and w and assert their defining properties."""
    if not ctx.G_K.is_standard():
        raise PreconditionError("k and w are only built for f_K = pi_K x + x^q")
    D = ctx.D if D is None else D
    K = ctx.K
    q = ctx.q_K
    A = ctx.algebra
    k = _k_series(ctx, D)
    # k(u0) = pi_K / (q - 1) in the torsion algebra
    ku = k.embed(A.A)(A.u0)
    target = (ctx.tower.pi_K / K.element(q - 1)).embed(A.A)
    if not (ku == target):
        raise ColemanError("k(u0) != pi_K/(q-1) in the torsion algebra")
    Lk = ctx.trace.apply(k)
    try:
        w = Lk.div_pi(1)
    except DivisibilityError as exc:
        raise ColemanError("L(k) is not divisible by pi_K") from exc
    if not w.coeff(0).is_unit():
        raise ColemanError("w(0) is not a unit")
    return KWPair(k, w, ctx)


# ----------------------------------------------------------------- rho
def _alpha_over_pi(alpha, ctx: Context, D: int):
    """alpha / pi_K as an O_K element or series (exact)."""
    if isinstance(alpha, Series):
        a = alpha.truncate(D) if alpha.D >= D else alpha
        try:
            return a.div_pi(1)
        except DivisibilityError:
            raise PreconditionError("series alpha must be divisible by pi_K") \
                from None
    a = alpha if isinstance(alpha, RingElement) else ctx.K.element(alpha)
    a = ctx.K.element(a)
    try:
        return a.div_pi(1)
    except DivisibilityError:
        raise PreconditionError("alpha must be divisible by pi_L") from None


def _alpha_is_zero(alpha):
    if isinstance(alpha, Series):
        return alpha.is_zero()
    if isinstance(alpha, RingElement):
        return alpha.is_zero()
    return alpha == 0


def rho(g: Series, alpha: Alpha, kw: KWPair) -> Series:
    """g - alpha(f_K) k g(f_K) / (pi_K w(f_K))."""
    if _alpha_is_zero(alpha) or g.is_zero():
        return g
    ctx = kw.ctx
    D = g.D
    beta = _alpha_over_pi(alpha, ctx, D)
    sub = ctx.trace.substitute
    corr = sub(g) * kw.w_pi_inverse(D)
    corr = corr * kw.k.truncate(D) if kw.k.D >= D else corr * _k_series(ctx, D)
    if isinstance(beta, Series):
        corr = corr * sub(beta)
    else:
        corr = corr.scale(beta)
    return g - corr


def _alpha_valuation(alpha, ctx: Context):
    if isinstance(alpha, Series):
        return int(alpha.val().min())
    a = alpha if isinstance(alpha, RingElement) else ctx.K.element(alpha)
    return int(ctx.K.element(a).valuation())


def rho_inverse(h: Series, alpha: Alpha, kw: KWPair,
                N_target: Optional[int] = None) -> Series:
    """Fixed point g_1 = h, g_{i+1} = h - rho(g_1 + ... + g_i)."""
    ctx = kw.ctx
    N_target = ctx.N if N_target is None else N_target
    if _alpha_is_zero(alpha):
        return h
    va = _alpha_valuation(alpha, ctx)
    need = 2
    if va < need:
        raise ConvergenceError(
            "the iteration contracts only when alpha/pi_K is not a unit "
            f"(v(alpha) = {va} in pi_K units; need >= {need})")
    g = h
    last = None
    for it in range(N_target + 4):
        inc = h - rho(g, alpha, kw)
        v = int(inc.val().min())
        P = int(inc.p.min())
        if v >= min(N_target, P):
            return g
        if last is not None and v <= last:
            raise ConvergenceError(f"no valuation gain at step {it} "
                                   f"(v = {v}); check the hypotheses on alpha")
        last = v
        g = g + inc
    raise ConvergenceError("iteration cap reached before precision "
                           f"{N_target}")


# ----------------------------------------------------- exponent and maps
def power_exponent(ctx: Context) -> int:
    """Least m with [pi_L]^m sending pi_K-divisible series to pi_L-divisible."""
    return power_exponent_for(ctx.tower.e_KL, ctx.q_L)


def power_exponent_for(e_KL: int, q_L: int) -> int:
    m, v = 0, 1
    while v < e_KL:
        v = min(e_KL + v, q_L * v)
        m += 1
    return m


def map_A_to_C(r: Series, alpha, ctx: Context, prec=None,
               check: bool = False) -> Series:
    """log_L([pi_L^m](phi_alpha(r))) with m = power_exponent."""
    if check:
        rep = check_membership("A", r, alpha, ctx)
        if rep.verdict == "fail":
            raise PreconditionError(f"input is not in A^alpha: {rep}")
    h = phi_alpha(r, alpha, ctx, prec)
    m = power_exponent(ctx)
    if m:
        h = endo_L(ctx.L.uniformizer ** m, h, ctx, prec)
    return ctx.G_L.transport_log(h)


_DIRECTIONS = {"A-to-E": ("A", "E", "log"), "E-to-A": ("E", "A", "exp"),
               "D-to-C": ("D", "C", "log"), "C-to-D": ("C", "D", "exp")}


def log_transport_iso(r: Series, direction: str, alpha, ctx: Context,
                      check: bool = False) -> Series:
    """log_L or exp_L between the pi_L-restricted modules."""
    if direction not in _DIRECTIONS:
        raise PreconditionError(f"unknown direction {direction!r}")
    src, dst, way = _DIRECTIONS[direction]
    if check:
        rep = check_membership(src, r, alpha, ctx, restricted=True)
        if rep.verdict == "fail":
            raise PreconditionError(f"input fails kind {src}: {rep}")
    out = ctx.G_L.transport(way, r)
    if check:
        rep = check_membership(dst, out, alpha, ctx, restricted=True)
        if rep.verdict == "fail":
            raise ColemanError(f"output fails kind {dst}: {rep}")
    return out


# ------------------------------------------- the unit-reduction criterion
def standing_hypotheses(alpha, ctx: Context) -> List[str]:
    """Every violated assumption of the unit-reduction criterion."""
    bad = []
    if not ctx.G_L.is_standard():
        bad.append("f_L must be pi_L x + x^q_L")
    if not ctx.G_K.is_standard():
        bad.append("f_K must be pi_K x + x^q_K")
    if ctx.q_L < 3:
        bad.append("q_L must be at least 3")
    if ctx.tower.pi_L.valuation() < 2:
        bad.append("pi_K^2 must divide pi_L")
    try:
        a = ctx.alpha_L(alpha)
        expected = ctx.L.element(ctx.q_K) / (ctx.L.uniformizer ** ctx.tower.f_KL)
        if not (a == expected):
            bad.append("alpha must equal q_K / pi_L^f(K/L)")
        if a.valuation() < 1:
            bad.append("pi_L must divide alpha")
    except (ColemanError, ZeroDivisionError) as exc:
        bad.append(f"alpha is not admissible ({exc})")
    return bad


def unit_reduction_check(s: Series, alpha, ctx: Context,
                         prec: int = 4) -> MembershipReport:
    """Whether the LT-fold of s(x +_K z) matches [alpha]_L(s([pi_K]x)) mod pi_K^2."""
    bad = standing_hypotheses(alpha, ctx)
    v0 = int(s.val()[0])
    if v0 < 1 and v0 < s.p[0]:
        bad.append("pi_K must divide s(0)")
    if bad:
        raise PreconditionError("; ".join(bad))
    T = t_operator(s, alpha, ctx, prec)
    return zero_report(T, 2, kind="criterion")


def twist_candidate(s0: Series, ctx: Context, D: Optional[int] = None) -> Series:
    """s(x) = s0(x^q_K) truncated at D."""
    t = ctx.tower
    if t.e_KL < 2:
        raise PreconditionError("the twist needs a ramified extension K/L")
    if ctx.K.element(t.p).valuation() < 2:
        raise PreconditionError("the twist needs pi_K^2 | p")
    D = ctx.D if D is None else D
    q = ctx.q_K
    K = ctx.K
    if s0.degree() * q > D:
        log.warning("twist of degree %d truncated at D=%d", s0.degree() * q, D)
    c = np.zeros((D + 1, K.n), dtype=object)
    p = np.full(D + 1, K.cap, dtype=np.int64)
    for i in range(min(s0.D, D // q) + 1):
        c[i * q], p[i * q] = s0.c[i], s0.p[i]
    poly = s0.poly and s0.degree() * q <= D
    if not s0.poly and (s0.D + 1) * q <= D:
        p[(s0.D + 1) * q:] = 0
    return Series(K, c, p, poly=poly)


@dataclass
class LiftResult:
    r: Series
    stages: int
    valuations: List[int]
    checked_precision: int
    checked_degree: int


def lift_budget(N_target: int, degree: int, q: int):
    """(working degree, working precision) for certifying T(r) mod pi^N_target
    up to the given degree.

    De-substitution loses d at degree d and the truncation tail of r costs
    (D_w + 1 - d)/(q - 1) in the root sums, so both grow with the degree.
    """
    P = N_target + degree + 2
    Dw = (q - 1) * P + degree
    return Dw, P


def lift_to_A(s: Series, alpha, ctx: Context, N_target: int = 10,
              degree: int = 8, max_stages: Optional[int] = None) -> LiftResult:
    """Successive correction s -_L (t_1 +_L ... +_L t_n) with T -> 0.

    The result is certified up to ``degree``; the working degree and
    precision follow from lift_budget.  Each correction is the echelon
    trace preimage of the de-substituted T(current).
    """
    rep = unit_reduction_check(s, alpha, ctx)
    if rep.verdict != "pass":
        raise PreconditionError(f"s fails the mod pi_K^2 criterion: {rep}")
    Dw, P = lift_budget(N_target, degree, ctx.q_K)
    if P > ctx.K.cap:
        raise BudgetError(f"lift needs precision {P} > ring cap {ctx.K.cap}")
    if s.D < Dw:
        if not s.poly:
            raise BudgetError(f"lift needs s to degree {Dw}, got {s.D}")
        s = s.extend(Dw)
    s = s.truncate(Dw).with_prec(P)
    Dy = degree
    cur = s
    total = None
    vals = []
    max_stages = N_target + 4 if max_stages is None else max_stages
    for stage in range(max_stages + 1):
        T = t_operator(cur, alpha, ctx, P)
        Tw = T.truncate(Dy)
        v = int(Tw.val().min())
        vals.append(v)
        if v >= N_target:
            return LiftResult(cur, stage, vals, int(Tw.p.min()), Dy)
        if len(vals) > 1 and v <= vals[-2]:
            raise ConvergenceError(f"stage {stage}: T did not gain valuation "
                                   f"({vals[-2]} -> {v})")
        try:
            sn = ctx.trace.desubstitute(T.truncate(Dy))
            tn = ctx.trace.preimage(sn)
        except ColemanError as exc:
            raise type(exc)(f"lift stage {stage}: {exc}") from exc
        tn = tn.with_prec(P)
        log.debug("lift stage %d: v(T)=%d v(s_n)=%d v(t_n)=%d", stage, v,
                  int(sn.val().min()), int(tn.val().min()))
        if tn.D > Dw:
            tn = tn.truncate(Dw)
        else:
            tn = tn.extend(Dw)
        total = tn if total is None else ctx.G_L.add(total, tn, P)
        cur = ctx.G_L.sub(s, total, P)
    raise ConvergenceError(f"no convergence after {max_stages} stages")
