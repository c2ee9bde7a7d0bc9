"""The unit-reduction criterion and the lift into the norm-coherent module,
in the tower L = Q_3(s), s^2 = 3, K = L(t), t^2 = s, with alpha = pi_L.

Run: python3 demos/04_tower_pipeline.py     (about 20 seconds)
"""

import time

from colemantrace.eigen import (Context, build_k_w, check_membership,
                                lift_budget, lift_to_A, log_transport_iso,
                                map_A_to_C, rho_inverse, standing_hypotheses,
                                twist_candidate, unit_reduction_check)
from colemantrace.localring import tower_build
from colemantrace.series import Series

T = tower_build(3, [-3, 0, 1], [[0, -1], 0, 1], default_prec=40)
ctx = Context.build(T, D=32, N=16)
K = ctx.K
alpha = T.pi_L_native
print("standing hypotheses violated:", standing_hypotheses(alpha, ctx) or "none")

# Twist s0 = pi_K + x + x^2 into s(x) = s0(x^3) and test it mod pi_K^2.
N_target, degree = 10, 8
Dw, P = lift_budget(N_target, degree, ctx.q_K)
print(f"lift budget: working degree {Dw}, working precision {P}")
s = twist_candidate(Series.from_coeffs(K, [T.pi_K, 1, 1], D=12), ctx, D=Dw)
print("criterion on the twist:", unit_reduction_check(s, alpha, ctx))

t0 = time.perf_counter()
res = lift_to_A(s, alpha, ctx, N_target=N_target, degree=degree)
print(f"lift: {res.stages} stages, v(T) per stage {res.valuations}, "
      f"{time.perf_counter() - t0:.1f}s")

# From eigenvectors to the A-module and on to the kernel of L.
kw = build_k_w(ctx)
h = ctx.trace.kernel(16)[2].scale(T.pi_L).extend(48)
g = rho_inverse(h, alpha, kw, 12)
r = log_transport_iso(g, "E-to-A", alpha, ctx)
print("exp(g) in A:", check_membership("A", r, alpha, ctx, modulus=8, degree=16))
c = map_A_to_C(r, alpha, ctx)
print("map to C:", check_membership("C", c, alpha, ctx, modulus=8, degree=8))
