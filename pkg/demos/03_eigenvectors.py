"""Eigenvectors of the trace operator from its kernel.

rho(g) = g - alpha(f) k g(f) / (pi w(f)) maps the alpha-eigenspace onto the
kernel; rho_inverse runs the fixed-point iteration the other way.

Run: python3 demos/03_eigenvectors.py
"""

from colemantrace.eigen import (Context, build_k_w, check_membership, rho,
                                rho_inverse, zero_report)
from colemantrace.localring import tower_build
from colemantrace.series import Series

ctx = Context.build(tower_build(3, None, None, default_prec=48), D=16, N=12)
K = ctx.K
kw = build_k_w(ctx)
print("k =", kw.k)
print("w(0) =", kw.w.coeff(0), "(a unit)")

# Start from a kernel element; pi-divisibility keeps the iteration inside
# the domain where it contracts.
h = ctx.trace.kernel(16)[2].scale(ctx.tower.pi_L)

# L on a truncated series needs extra degree: (q - 1) * 6 + q * 16 = 60
# covers degree 16 at mod 3^6.
Dint = 64
for label, alpha in (("9", K.element(9)),
                     ("9(1 + x)", Series.from_coeffs(K, [9, 9], D=Dint))):
    g = rho_inverse(h.extend(Dint), alpha, kw, 12)
    back = zero_report(rho(g, alpha, kw) - h.extend(Dint), 12, 16)
    eig = check_membership("E", g, alpha, ctx, modulus=6, degree=16)
    print(f"alpha = {label}: rho(g) = h {back}; L(g) = alpha g {eig}")

# A unit alpha does not contract; the iteration says so instead of looping.
try:
    rho_inverse(h.extend(Dint), K.element(3), kw, 12)
except Exception as exc:
    print("alpha = 3:", type(exc).__name__, exc)
