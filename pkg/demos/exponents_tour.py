"""
Growth exponents
================

Maximal point counts in [-N, N]^2 across a family of curves grow far slower
than N^(1/3), while y = x^d grows exactly like N^(1/d). The same experiment
on a degree-1 del Pezzo surface counts points fibre by fibre.
"""

from intpoints import bounds_lab as bl
from intpoints.delpezzo import DP1Surface, dp_exponent_experiment

Ns = [10**3, 10**4, 10**5, 10**6]
for d in (2, 3, 5):
    t = bl.exponent_experiment(("power", d), Ns)
    print(f"y = x^{d}: counts {[r.max_count for r in t.rows]}, slope {t.slope:.4f} (1/d = {1 / d:.4f})")

t = bl.exponent_experiment(bl.box_family(50), Ns)
print(f"|A|,|B| <= 50: max counts {[r.max_count for r in t.rows]}, slope {t.slope:.4f}")
for r in t.rows:
    print(f"  N = {r.N:>8}: {r.max_count} points on y^2 = x^3 {r.argmax[0]:+d}x {r.argmax[1]:+d}")

S = DP1Surface((1, 0, 0, 0, 1), (1, 0, 0, 0, 0, 0, 1))
dp = dp_exponent_experiment(S, [2, 4, 6, 8, 10])
print("\ndel Pezzo  y^2 = x^3 + (u^4 + v^4) x + (u^6 + v^6)")
for r in dp.rows:
    print(f"  N = {r['N']:>2}: total {r['total']:>5}, best fibre {r['fiber_max']}, disc-zero pairs {r['disc_zero']}")
print(f"  slopes: total {dp.total_slope:.3f}, per fibre {dp.fiber_slope:.3f}; flags {dp.flags}")
