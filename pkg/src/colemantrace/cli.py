"""Command-line entry point.

Usage: ``coleman [global options] VERB [verb options] [inputs]``.  Global
options (tower, budgets, seed, output path) may also come from a YAML/JSON
config via ``--config``; the verb and its arguments then go in the config's
``command`` list when none is given on the command line.

Outputs are JSON result envelopes holding the series and a metadata block
with the requested budget (D, N) and the achieved budget (D', N').  Timings
go to stderr so that outputs are byte-identical across runs.

Exit status: 0 pass, 1 a mathematical check failed, 2 budget, precondition
or indeterminate outcome.
"""

from __future__ import annotations

import argparse
import ast
import logging
import sys
import time
from typing import List, Optional, Sequence

import numpy as np

from . import io
from .errors import (BudgetError, ColemanError, ConvergenceError,
                     DivergenceError, InsufficientPrecisionError,
                     PreconditionError, SerializationError, TowerError)
from .localring import RingElement
from .series import BiSeries, FracSeries, Series

log = logging.getLogger("colemantrace")

EXIT_PASS, EXIT_FAIL, EXIT_BUDGET = 0, 1, 2

_BUDGET_ERRORS = (BudgetError, PreconditionError, InsufficientPrecisionError,
                  ConvergenceError, DivergenceError, SerializationError,
                  TowerError)


class CommandError(PreconditionError):
    """Bad verb arguments."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CommandError(f"{self.prog}: {message}")


# ---------------------------------------------------------------- alpha
_NAMES = ("pi_L", "pi_K", "x")


def parse_alpha(text: str, ctx, D: Optional[int] = None):
    """Evaluate an expression in ints, pi_L, pi_K and x with + - * ^.

    Returns an int, an O_K element, or an O_K series when x occurs.
    """
    D = ctx.D if D is None else D
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError:
        raise CommandError(f"cannot parse alpha {text!r}") from None
    K = ctx.K

    def lift(v):
        if isinstance(v, int):
            return K.element(v)
        return v

    def as_series(v):
        if isinstance(v, Series):
            return v
        return Series.const(K, lift(v), D)

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return node.value
        if isinstance(node, ast.Name):
            if node.id == "pi_L":
                return ctx.tower.pi_L
            if node.id == "pi_K":
                return ctx.tower.pi_K
            if node.id == "x":
                return Series.x(K, D)
            raise CommandError(f"unknown name {node.id!r} in alpha")
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            v = ev(node.operand)
            return -v
        if isinstance(node, ast.BinOp):
            a, b = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Pow):
                if not isinstance(b, int) or b < 0:
                    raise CommandError("exponents must be non-negative integers")
                return a ** b
            if isinstance(a, int) and isinstance(b, int):
                pass
            elif isinstance(a, Series) or isinstance(b, Series):
                a, b = as_series(a), as_series(b)
            else:
                a, b = lift(a), lift(b)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
        raise CommandError(f"unsupported syntax in alpha {text!r}")

    return ev(tree)


# -------------------------------------------------------------- parsers
def _global_parser():
    g = _Parser(prog="coleman", add_help=True, allow_abbrev=False,
                description="Lubin-Tate formal groups, Coleman's trace "
                            "operator and eigenspace maps.",
                epilog="verbs: fgl {build,endo,log,exp,inverse}, "
                       "trace {apply,preimage,kernel}, "
                       "eigen {kw,rho,rho-inv,phi,transport}, check, lift, "
                       "twist, map-a-to-c, suite acceptance. "
                       "Exit status: 0 pass, 1 mathematical failure, "
                       "2 budget, precondition or input error.")
    g.add_argument("--config", help="YAML or JSON job config")
    g.add_argument("--tower", help="preset name (C1, C3) or JSON mapping "
                                   "{p, g_L, g_K}")
    g.add_argument("-D", type=int, help="degree budget (default 32)")
    g.add_argument("-N", type=int, help="precision budget (default 16)")
    g.add_argument("--prec", type=int, help="internal precision override")
    g.add_argument("--seed", type=int, help="seed for randomized suites")
    g.add_argument("--alpha", help="eigenvalue expression, e.g. 'pi_K^2*(1+x)'")
    g.add_argument("-o", "--output", help="output path (default stdout)")
    g.add_argument("-v", "--verbose", action="count", default=0)
    return g


def _verb_parser():
    v = _Parser(prog="coleman", allow_abbrev=False)
    sub = v.add_subparsers(dest="verb", required=True)

    fgl = sub.add_parser("fgl", help="formal group laws")
    fs = fgl.add_subparsers(dest="op", required=True)
    for name in ("build", "endo", "log", "exp", "inverse"):
        p = fs.add_parser(name)
        p.add_argument("--level", choices=("K", "L"), default="K")
        if name == "endo":
            p.add_argument("--a", required=True, help="scalar expression")
        if name in ("log", "exp"):
            p.add_argument("input", nargs="?",
                           help="series to transport; omit for the series itself")

    tr = sub.add_parser("trace", help="Coleman's trace operator")
    ts = tr.add_subparsers(dest="op", required=True)
    for name in ("apply", "preimage"):
        ts.add_parser(name).add_argument("input", nargs="?")
    ts.add_parser("kernel").add_argument("--dim", type=int,
                                         help="emit at most this many elements")

    ei = sub.add_parser("eigen", help="eigenspace maps")
    es = ei.add_subparsers(dest="op", required=True)
    es.add_parser("kw")
    for name in ("rho", "rho-inv", "phi", "transport"):
        p = es.add_parser(name)
        p.add_argument("input", nargs="?")
        if name == "transport":
            p.add_argument("--direction", required=True,
                           choices=("A-to-E", "E-to-A", "D-to-C", "C-to-D"))

    ch = sub.add_parser("check", help="module membership")
    ch.add_argument("--kind", required=True, choices=("A", "D", "E", "C"))
    ch.add_argument("--modulus", type=int)
    ch.add_argument("--degree", type=int)
    ch.add_argument("--restricted", action="store_true",
                    help="also require pi_L-divisibility")
    ch.add_argument("input", nargs="?")

    li = sub.add_parser("lift", help="lift a criterion-passing s into A")
    li.add_argument("--degree", type=int, default=8,
                    help="degree up to which T(r) is certified")
    li.add_argument("input", nargs="?")

    tw = sub.add_parser("twist", help="s0(x) -> s0(x^q_K)")
    tw.add_argument("input", nargs="?")

    mc = sub.add_parser("map-a-to-c", help="log_L([pi_L^m] phi(r))")
    mc.add_argument("input", nargs="?")

    su = sub.add_parser("suite", help="deterministic check suites")
    su.add_argument("name", choices=("acceptance",))
    su.add_argument("--only", help="comma-separated criterion numbers")
    return v


_VERBS = {"fgl", "trace", "eigen", "check", "lift", "twist", "map-a-to-c",
          "suite"}


# ------------------------------------------------------------- helpers
def _achieved(obj, N=None):
    """(D', N') of an output: degree and minimum coefficient precision."""
    if isinstance(obj, FracSeries):
        return _achieved(obj.num)
    if isinstance(obj, Series):
        return int(obj.D), int(obj.p.min())
    if isinstance(obj, BiSeries):
        m = obj.mask() if hasattr(obj, "mask") else np.ones_like(obj.p, bool)
        return int(obj.D), int(obj.p[m].min())
    if hasattr(obj, "checked_precision"):
        return int(obj.checked_degree), int(obj.checked_precision)
    if isinstance(obj, (list, tuple)) and obj:
        pairs = [_achieved(x) for x in obj]
        if any(a is None for a, _ in pairs):
            return None, None
        return min(a for a, _ in pairs), min(b for _, b in pairs)
    return None, None


def _worst(reports):
    order = {"pass": 0, "indeterminate": 1, "fail": 2}
    return max(reports, key=lambda r: order[r.verdict]) if reports else None


def _exit_for(report) -> int:
    if report is None or report.verdict == "pass":
        return EXIT_PASS
    return EXIT_FAIL if report.verdict == "fail" else EXIT_BUDGET


class _Job:
    """Lazily built tower, formal groups and context for one command."""

    def __init__(self, cfg: io.JobConfig):
        self.cfg = cfg
        self.tower = cfg.build_tower()
        self._ctx = None

    @property
    def ctx(self):
        if self._ctx is None:
            from .eigen import Context
            self._ctx = Context.build(self.tower, self.cfg.D, self.cfg.N)
        return self._ctx

    def group(self, level):
        return self.ctx.G_K if level == "K" else self.ctx.G_L

    def alpha(self, required=True):
        if self.cfg.alpha is None:
            if required:
                raise CommandError("this command needs --alpha")
            return None
        return parse_alpha(self.cfg.alpha, self.ctx)

    def read(self, path):
        if path is None:
            if not self.cfg.inputs:
                raise CommandError("no input file given")
            path = self.cfg.inputs[0]
        obj = io.read(path)
        if isinstance(obj, Series) and not (obj.ring is self.ctx.K
                                            or obj.ring is self.ctx.L):
            src = io.tower_of(obj)
            if (src.p, src.g_L, src.g_K) != (self.tower.p, self.tower.g_L,
                                              self.tower.g_K):
                raise CommandError(f"{path}: series belongs to another tower")
            ring = self.ctx.K if obj.ring is src.O_K else self.ctx.L
            obj = Series(ring, obj.c, np.minimum(obj.p, ring.cap), poly=obj.poly,
                         canonical=False)
        return obj


# ------------------------------------------------------------ dispatch
def _run_fgl(job, a):
    G = job.group(a.level)
    D = job.cfg.D
    if a.op == "build":
        return G.law(D), {}, None
    if a.op == "endo":
        scalar = parse_alpha(a.a, job.ctx)
        if a.level == "L" and isinstance(scalar, RingElement):
            scalar = job.ctx.alpha_L(scalar)
        if isinstance(scalar, Series):
            raise CommandError("endomorphism scalars must be constants")
        return G.endomorphism(scalar, D), {}, None
    if a.op == "inverse":
        return G.formal_inverse(D), {}, None
    if a.input is None and not job.cfg.inputs:
        out = G.log_series(D) if a.op == "log" else G.exp_series(D)
        return out, {"shift": out.shift}, None
    return G.transport(a.op, job.read(a.input)), {}, None


def _run_trace(job, a):
    from .eigen import zero_report
    tr = job.ctx.trace
    if a.op == "kernel":
        basis = tr.kernel(job.cfg.D)
        meta = {"dimension": len(basis)}
        if a.dim is not None:
            basis = basis[:a.dim]
        return basis, meta, None
    f = job.read(a.input)
    if a.op == "apply":
        return tr.apply(f), {}, None
    g = tr.preimage(f)
    back = tr.apply(g)
    rep = _budget_report(back.truncate(min(back.D, f.D)) - f.truncate(
        min(back.D, f.D)), job.cfg.N, "preimage")
    return g, {"report": rep.to_dict()}, rep


def _budget_report(diff, N, kind):
    """Zero check mod pi^N up to the largest degree known to that precision."""
    from .eigen import MembershipReport, achieved, zero_report
    d = achieved(diff, N)
    if d < 0:
        return MembershipReport("indeterminate", N, -1, kind=kind,
                                detail=f"no coefficient known mod pi^{N}")
    return zero_report(diff, N, d, kind=kind)


def _each(obj, fn):
    return [fn(x) for x in obj] if isinstance(obj, list) else fn(obj)


def _run_eigen(job, a):
    from . import eigen as E
    ctx = job.ctx
    if a.op == "kw":
        kw = E.build_k_w(ctx)
        return [kw.k, kw.w], {}, None
    f = job.read(a.input)
    alpha = job.alpha()
    D = max(x.D for x in f) if isinstance(f, list) else f.D
    if a.op in ("rho", "rho-inv"):
        kw = E.build_k_w(ctx, D)
    if a.op == "rho":
        return _each(f, lambda h: E.rho(h, alpha, kw)), {}, None
    if a.op == "rho-inv":
        pairs = _each(f, lambda h: (h, E.rho_inverse(h, alpha, kw, job.cfg.N)))
        pairs = pairs if isinstance(pairs, list) else [pairs]
        reps = [_budget_report(E.rho(g, alpha, kw) - h, job.cfg.N, "rho")
                for h, g in pairs]
        out = [g for _, g in pairs]
        rep = _worst(reps)
        return (out if isinstance(f, list) else out[0],
                {"report": rep.to_dict()}, rep)
    if a.op == "phi":
        return _each(f, lambda r: E.phi_alpha(r, alpha, ctx)), {}, None
    out = _each(f, lambda r: E.log_transport_iso(r, a.direction, alpha, ctx,
                                                 check=True))
    return out, {"direction": a.direction}, None


def _run_check(job, a):
    from .eigen import check_membership
    obj = job.read(a.input)
    items = obj if isinstance(obj, list) else [obj]
    alpha = job.alpha(required=a.kind in "AE")
    reps = [check_membership(a.kind, r, alpha, job.ctx, a.modulus, a.degree,
                             a.restricted) for r in items]
    worst = _worst(reps)
    out = reps if isinstance(obj, list) else reps[0]
    return out, {"verdict": worst.verdict}, worst


def _run_lift(job, a):
    from .eigen import lift_to_A
    s = job.read(a.input)
    res = lift_to_A(s, job.alpha(), job.ctx, job.cfg.N, a.degree)
    meta = {"stages": res.stages, "valuations": res.valuations,
            "report": {"verdict": "pass", "kind": "lift",
                       "checked_precision": job.cfg.N,
                       "checked_degree": res.checked_degree}}
    return res.r, meta, None


def _run_suite(job, a):
    from .acceptance import run_acceptance
    only = None
    if a.only:
        only = [int(x) for x in a.only.split(",")]
    results = run_acceptance(only=only, seed=job.cfg.seed, stream=sys.stderr)
    meta = {"criteria": [r.to_dict() for r in results]}
    bad = [r for r in results if not r.passed]
    if not bad:
        code = EXIT_PASS
    elif any(r.verdict == "fail" for r in bad):
        code = EXIT_FAIL
    else:
        code = EXIT_BUDGET
    return None, meta, code


def run_command(cfg: io.JobConfig):
    """Dispatch cfg.command; returns (exit status, result document)."""
    if not cfg.command:
        raise CommandError("no command given")
    args = _verb_parser().parse_args(cfg.command)
    job = _Job(cfg)
    t0 = time.perf_counter()
    runner = {"fgl": _run_fgl, "trace": _run_trace, "eigen": _run_eigen,
              "check": _run_check, "lift": _run_lift, "suite": _run_suite}
    if args.verb == "twist":
        from .eigen import twist_candidate
        out = _each(job.read(args.input), lambda s: twist_candidate(s, job.ctx))
        meta, rep = {}, None
    elif args.verb == "map-a-to-c":
        from .eigen import map_A_to_C
        alpha = job.alpha()
        out = _each(job.read(args.input),
                    lambda r: map_A_to_C(r, alpha, job.ctx, check=True))
        meta, rep = {}, None
    else:
        out, meta, rep = runner[args.verb](job, args)
    log.info("%s: %.2fs", " ".join(cfg.command), time.perf_counter() - t0)
    Dp, Np = _achieved(out)
    full = {"command": list(cfg.command), "tower": cfg.tower.to_dict(),
            "D": cfg.D, "N": cfg.N, "achieved": {"D": Dp, "N": Np}}
    if cfg.alpha is not None:
        full["alpha"] = cfg.alpha
    full.update(meta)
    code = rep if isinstance(rep, int) else _exit_for(rep)
    return code, io.result_doc(out, full, job.tower)


def build_config(gargs, command: List[str]) -> io.JobConfig:
    text = ""
    if gargs.config:
        with open(gargs.config, "r", encoding="utf-8") as fh:
            text = fh.read()
    base = io.yaml.safe_load(text) if text else {}
    if not isinstance(base, dict):
        raise io.ConfigError("top level must be a mapping")
    if gargs.tower:
        t = gargs.tower
        base["tower"] = t if t in io.PRESETS else io.yaml.safe_load(t)
    for key, val in (("D", gargs.D), ("N", gargs.N), ("prec", gargs.prec),
                     ("seed", gargs.seed), ("alpha", gargs.alpha),
                     ("output", gargs.output)):
        if val is not None:
            base[key] = val
    if command:
        base["command"] = command
    return io.parse_config(io.json.dumps(base))


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        # global options may appear before or after the verb
        gargs, command = _global_parser().parse_known_args(argv)
    except CommandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    logging.basicConfig(level=logging.WARNING - 10 * min(gargs.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s",
                        stream=sys.stderr)
    t0 = time.perf_counter()
    try:
        cfg = build_config(gargs, command)
        code, doc = run_command(cfg)
    except _BUDGET_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ColemanError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    text = io.json.dumps(doc, sort_keys=True, indent=1) + "\n"
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"[{' '.join(cfg.command)}] exit {code}, "
          f"{time.perf_counter() - t0:.2f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
