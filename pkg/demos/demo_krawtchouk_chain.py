"""The Krawtchouk chain: an inhomogeneous model the asymptotics nail exactly.

Hoppings sqrt(q(1-q)(n+1)(N-n-1)) and a linear field give an equally
spaced spectrum; rescaled by 1/N the energies are exactly k/N.  The local
band edges B(x) +/- 2J(x) trace an ellipse, so turning points, level
spacing and the filling fraction all come out in closed form, and the
continuum level spacing 1/N is exact rather than asymptotic.
"""

import numpy as np

from fermichain import analytic, exact, wkb
from fermichain.profiles import Krawtchouk, make_builtin

N, q = 400, 0.25
lat, cont = make_builtin(Krawtchouk(q=q), N)
spectrum = exact.diagonalize(lat)

print(f"Krawtchouk chain, N = {N}, q = {q} (rescaled energies)")
print("=" * 60)
print(f"spectrum vs k/N, sup error: "
      f"{np.abs(spectrum.energies - np.arange(N) / N).max():.2e}")

for eps in (0.2, 0.5, 0.8):
    print(f"eps = {eps}: level spacing {wkb.level_spacing(cont, eps):.10f} "
          f"(exact 1/N = {1 / N}),  filling {wkb.filling_fraction(cont, eps):.10f}")

# Region pattern vs the Fermi energy: below q two depletion zones, between
# q and 1-q a saturated head and depleted tail, above 1-q two saturated.
for nu in (0.125, 0.5, 0.875):
    M = int(nu * N)
    st = exact.filled_state(spectrum, M)
    prof = wkb.density_profile(cont, st.fermi_energy, lat.site_positions)
    pattern = " + ".join(
        f"{r.kind}[{r.lower:.1f}, {r.upper:.1f}]" for r in prof.regions)
    print(f"\nnu = {nu}:  {pattern}")
    x1, x2 = analytic.krawtchouk_turning_points(q, st.fermi_energy)
    print(f"  closed-form turning points: {N * x1:.2f}, {N * x2:.2f}")
    rho = exact.density_exact(spectrum, st)
    diff = np.abs(rho - prof.density)
    print(f"  bulk |exact - WKB| <= {diff[N//20:-N//20].max():.4f}, "
          f"mean {diff.mean():.5f}")

# Reflection symmetry of the density: a rho(x, eps_F) = 1 - a rho(l-x, 1-eps_F).
st = exact.filled_state(spectrum, 100)
d1 = exact.density_exact(spectrum, st)
d2 = exact.density_exact(spectrum, exact.filled_state(spectrum, 300))
print(f"\nreflection identity  rho(n, M) + rho(N-1-n, N-M) = 1:  residue "
      f"{np.abs(d1 + d2[::-1] - 1).max():.2e}")
