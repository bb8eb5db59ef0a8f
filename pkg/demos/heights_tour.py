"""
Canonical heights, two ways
===========================

Each integral point gets its height from the local decomposition
(archimedean q-series plus exact finite parts) and from exact doubling.
The two routes share no code past the curve equation.
"""

from intpoints.curve_models import BoxSpec, ShortCurve
from intpoints.heights import canonical_height_decomposed, point
from intpoints.point_enum import enumerate_box

# y^2 = x^3 + 17 has sixteen integral points; take those with y > 0
E = ShortCurve(0, 17)
pts = [(x, y) for x, y in enumerate_box(E, BoxSpec.square(10**6)).points if y > 0]

print(f"{'x':>6} {'y':>8} {'lambda_inf':>11} {'sum lambda_p':>13} {'decomposed':>11} {'doubling':>11} {'gap':>9}")
for x, y in pts:
    br = canonical_height_decomposed(E, point(E, x, y))
    fin = sum(v for _, v in br.finite_parts)
    print(f"{x:>6} {y:>8} {br.lambda_inf:11.6f} {fin:13.6f} {br.total:11.6f} {br.oracle:11.6f} {br.residual:9.1e}")

# the finite parts never exceed (1/12) log|disc|
print(f"\n(1/12) log|disc| = {br.tate_bound:.6f}")
