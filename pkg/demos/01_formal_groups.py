"""Lubin-Tate formal groups over Z_3 and over a ramified tower.

Run: python3 demos/01_formal_groups.py
"""

from colemantrace.formalgroup import build_group_law, standard_f
from colemantrace.localring import tower_build
from colemantrace.series import Series, compose

# Z_3 with f = 3x + x^3, carried to 20 digits of precision
Zp = tower_build(3, None, None, default_prec=20).O_K
G = build_group_law(standard_f(Zp), D=9)
print(G)

# The group law is x + y plus corrections starting at total degree 3.
F = G.law(5)
print("F(x, y) up to degree 5:")
for i, j in F.flat_terms():
    c = F.coeff(i, j)
    if not c.is_zero():
        print(f"  x^{i} y^{j}: {c}")

# 8 * F_21 = 1, so the x^2 y coefficient is the 3-adic inverse of 8.
print("8 * F_21 =", F.coeff(2, 1) * Zp.element(8))

# Endomorphisms: [a] commutes with f and [3] is f itself.
e2 = G.endomorphism(2, 9)
print("[2](x) =", e2)
print("[2] o [2] == [4]:", compose(e2, e2) == G.endomorphism(4, 9))
print("[3] == f:", G.endomorphism(3, 9) == G.f.extend(9))

# The logarithm has genuine denominators; it is stored as num / 3^shift.
lg = G.log_series(9)
print("log denominator 3^%d, v(log_3) = %d" % (lg.shift, lg.coeff_val(3)))

# log turns the group law into addition, so exp(log(h)) = h for 3 | h.
h = Series.from_coeffs(Zp, [0, 3, 9, 6], D=12)
print("exp(log(h)) == h:", G.transport_exp(G.transport_log(h)) == h)

# The same construction works at the top of the tower Q_3(s)(t), s^2 = 3,
# t^2 = s, where f_K = t x + x^3 lives over a ring with 4 coordinates.
T = tower_build(3, [-3, 0, 1], [[0, -1], 0, 1], default_prec=16)
GK = build_group_law(standard_f(T.O_K), D=8)
print(GK, "e(K/L) =", T.e_KL)
print("F_K = x + y mod degree 3:", GK.law(8).coeff(1, 1).is_zero())
