"""Cosine chains: multiple wells, eigenfunction bookkeeping, frequencies.

The plain cosine chain modulates the hopping once across the chain; for
|eps_F| > 2 - 2 J0 a depletion or saturation interval opens in the middle.
The asymmetric generalization (faster modulation plus a quadratic field)
produces up to three disjoint wells at a single energy.  Each exact
eigenfunction then localizes in one well, and the fraction of modes per
well is predicted by the inverse normalizations A_i^-2 alone.
"""

import numpy as np

from fermichain import analytic, exact, wkb
from fermichain.profiles import AsymmetricCosine, Cosine, make_builtin

N = 400
print("cosine chain, J0 = 1/2")
print("=" * 60)
lat, cont = make_builtin(Cosine(J0=0.5), N)
spectrum = exact.diagonalize(lat)
for nu in (0.4, 0.1):
    st = exact.filled_state(spectrum, int(nu * N))
    prof = wkb.density_profile(cont, st.fermi_energy, lat.site_positions)
    kinds = [r.kind for r in prof.regions]
    rho = exact.density_exact(spectrum, st)
    bulk = np.abs(rho - prof.density)[N // 20:-N // 20].max()
    print(f"nu = {nu}: eps_F = {st.fermi_energy:.5f}, regions {kinds}, "
          f"bulk |exact - WKB| <= {bulk:.4f}")

numax = analytic.cosine_numax(0.5)
print(f"largest filling with a depletion interval: nu_max = {numax:.6f}")
print(f"  (equals the filling at eps_F = 2 J0 - 2: "
      f"{wkb.filling_fraction(cont, -1.0):.6f})")

print("\nasymmetric cosine chain, J0 = 3/4, b = 5, r = 2")
print("=" * 60)
lat, cont = make_builtin(AsymmetricCosine(J0=0.75, b=5.0, r=2), N)
spectrum = exact.diagonalize(lat)

# Mid-spectrum energy with four turning points and three wells.
e_mid = float(spectrum.energies[N // 2 - 1])
wd = wkb.wells(cont, e_mid)
print(f"energy {e_mid:.5f}: {len(wd.wells)} wells")
for i, w in enumerate(wd.wells):
    print(f"  well {i}: [{w.lower:8.3f}, {w.upper:8.3f}]  "
          f"({w.lower_kind} | {w.upper_kind})")

freqs = wkb.well_frequencies(wd)
print(f"predicted mode fractions per well: {np.round(freqs, 6)}")

counts = [0, 0, 0]
band = range(N // 2 - 21, N // 2 + 19)
for k in band:
    idx = exact.localize_eigenfunction(spectrum, k, wd)
    counts[idx] += 1
print(f"measured localization counts over {len(band)} mid-spectrum modes: "
      f"{counts}  (prediction {np.round(40 * freqs, 1)})")

# The critical Fermi energies where the well topology changes, with the
# fillings they produce.
print("\ncritical energies vs computed fillings:")
for e_i, nu_i in analytic.asymmetric_cosine_critical_energies():
    print(f"  e = {e_i:8.4f}:  filling {wkb.filling_fraction(cont, e_i):.4f} "
          f"(reference {nu_i})")
