"""
From j to tau and back
======================

Real j-invariants live on three arcs of the upper half plane. We locate tau
for a few j values, then compare the Jacobi product for the discriminant
with the Eisenstein route computed two ways.
"""

import numpy as np

from intpoints import lattice_modular as lm

for j in (-1e6, -1.0, 0.0, 1.0, 1000.0, 1728.0, 1e6):
    fit = lm.associate_tau(j, with_residual=True)
    print(f"j = {j:>10g}  tau = {fit.tau.value:.10f}  arc {fit.tau.region}  residual {fit.residual:.1e}")

# the float difference g2^3 - 27 g3^2 loses digits as |j| grows;
# forming E4^3 - E6^2 exactly before substituting q does not
print(f"\n{'Im tau':>7} {'|j|':>10} {'float route':>12} {'exact route':>12}")
for b in np.linspace(1.0, 8.0, 8):
    tau = lm.TauPoint.on_arc("C1", float(b))
    d = lm.delta_tau(tau)
    e1 = abs(lm.delta_eisenstein(tau) - d) / abs(d)
    e2 = abs(lm.delta_eisenstein_qexp(tau) - d) / abs(d)
    print(f"{b:7.2f} {abs(lm.j_of_tau(tau)):10.3e} {e1:12.1e} {e2:12.1e}")

c = lm.j_qexp_coeffs(64)
print(f"\nc(0) = {c[0]}, c(1) = {c[1]}, Petersson ratio at n = 64: {lm.petersson_ratio(64, c[64]):.4f}")
