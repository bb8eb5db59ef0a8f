"""
Counting integral points
========================

Exact enumeration, the large-sieve certificate and the counting pipeline
on the same boxes. Every certified bound sits above the exact count.
"""

from intpoints.curve_models import BoxSpec, LongCurve, ShortCurve
from intpoints.point_enum import (
    enumerate_box,
    gradient_decomposition,
    main_theorem_pipeline,
    sieve_certificate,
    square_x_count,
)

E = ShortCurve(-2, 1)
for a in (0, 10**4, 10**5):
    cert = sieve_certificate(E, (a, a + 10**4))
    print(f"x in [{a}, {a + 10**4}]: {square_x_count(E, (a, a + 10**4))} square values, "
          f"sieve bound {cert.bound:.0f} from {len(cert.setup.prime_set)} primes")

print()
for curve, N in ((ShortCurve(0, 1), 1000), (LongCurve(0, 3, 0, -2, 5), 2000), (ShortCurve(-(10**9), 7), 1000)):
    rep = main_theorem_pipeline(curve, N)
    print(f"{curve}  N={N}: {rep.count} points, certified <= {rep.upper_bound:.0f}, branch {rep.branch}")

# steep and flat pieces of the x-range for a large negative A
dec = gradient_decomposition(ShortCurve(-3 * 10**8, 1), 1000, 0.01, 10)
print(f"\nsteep arcs {dec.steep_arcs}\nflat windows {[(round(lo, 2), round(hi, 2)) for lo, hi, _ in dec.flat_windows]}"
      f"\nlength cap {dec.length_cap:.1f}, covers {dec.covers()}")

print(f"\n{len(enumerate_box(ShortCurve(0, 17), BoxSpec.square(10**6)).points)} points on y^2 = x^3 + 17")
