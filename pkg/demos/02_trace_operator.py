"""Coleman's trace operator on power series.

L(f)(f_K(x)) is the sum of f(x +_K z) over the roots z of f_K.  The roots
live in the torsion algebra; symmetric sums descend back to O_K.

Run: python3 demos/02_trace_operator.py
"""

import time

import numpy as np

from colemantrace.eigen import Context
from colemantrace.localring import tower_build
from colemantrace.series import Series

ctx = Context.build(tower_build(3, None, None, default_prec=40), D=16, N=8)
K = ctx.K

# Residues print as integers mod 3^40, so -6 shows as a large number.
# For f = 3x + x^3 the roots of X^3 + 3X - y have power sums 3, 0, -6, 3y,
# 18, ...  L(x^j) is exactly that power sum as a polynomial in y.
for j in range(6):
    Lx = ctx.trace.apply(Series.from_coeffs(K, [0] * j + [1], D=8))
    print(f"L(x^{j}) = {Lx}")

# Constants are multiplied by q = 3 and every image is divisible by 3.
print("L(5) =", ctx.trace.apply(Series.const(K, 5, 8)).coeff(0))
f = Series.from_coeffs(K, [1, 2, 0, 7, 1, 1], D=8)
print("v(L(f)) =", ctx.trace.apply(f).min_val())

# A preimage of a 3-divisible series, by echelon solve on the matrix of L.
s = Series.from_coeffs(K, [3, 0, 6, 9], D=12)
t0 = time.perf_counter()
g = ctx.trace.preimage(s)
back = ctx.trace.apply(g).truncate(12)
print("L(preimage(s)) == s:", back == s, "at precision", int((back - s).p.min()),
      f"({time.perf_counter() - t0:.2f}s)")

# The kernel of L at degree 32 and the absence of unit eigenvalues.
ker = ctx.trace.kernel(32)
print("dim ker L at degree 32:", len(ker))
print("dim ker (L - 1) at degree 32:",
      len(ctx.trace.eigen_nullspace(K.element(1), 32)))
