"""The homogeneous chain: every asymptotic formula against its exact value.

With constant hopping J and field B the single-particle problem is solved
in closed form, which makes the uniform chain the cleanest end-to-end
check of the toolkit: eigensolver vs the cosine spectrum, the continuum
level spacing vs actual level gaps, and the flat density profile with its
Friedel oscillations confined to the edges.
"""

import numpy as np

from fermichain import analytic, exact, wkb
from fermichain.profiles import Homogeneous, make_builtin

N = 400
lat, cont = make_builtin(Homogeneous(J=1.0, B=0.0), N)
spectrum = exact.diagonalize(lat)

print(f"homogeneous chain, N = {N}, J = 1, B = 0")
print("=" * 60)

ref, _ = analytic.homogeneous_spectrum(1.0, 0.0, N)
print(f"eigensolver vs closed-form spectrum, sup error: "
      f"{np.abs(spectrum.energies - ref).max():.2e}")

# Level spacing: the continuum formula 2 pi J sqrt(1 - (eps/2J)^2) / N
# against actual eigenvalue gaps, mid-band.
k = N // 2
gap = spectrum.energies[k + 1] - spectrum.energies[k]
spacing = wkb.level_spacing(cont, float(spectrum.energies[k]))
print(f"mid-band level gap {gap:.6f} vs continuum spacing {spacing:.6f} "
      f"({abs(spacing / gap - 1) * 100:.2f}% off)")

# Density at one quarter filling: the asymptotic profile is flat at
# arccos(-eps_F/2)/pi while the exact one oscillates around it near the
# chain ends only.
M = N // 4
st = exact.filled_state(spectrum, M)
rho = exact.density_exact(spectrum, st)
prof = wkb.density_profile(cont, st.fermi_energy, lat.site_positions)
print(f"\nquarter filling: eps_F = {st.fermi_energy:.6f}, "
      f"flat WKB density = {prof.density[0]:.6f}")
diff = np.abs(rho - prof.density)
print(f"  |exact - WKB| at the edge sites : {diff[:3].max():.4f}")
print(f"  |exact - WKB| in the bulk      : {diff[N//20:-N//20].max():.4f}")
print("  (edge excess = Friedel oscillations, amplitude ~ 1/n)")

# The Friedel term is captured exactly by the finite-N closed form.
closed = analytic.homogeneous_density_exact(1.0, 0.0, N, M)
print(f"  finite-N closed form reproduces diagonalization to "
      f"{np.abs(rho - closed).max():.2e}")

# Wavefunction: eigenvector component n sits at x = (n+1) a.
kk = 130
wd = wkb.wells(cont, float(spectrum.energies[kk]))
x, vals = wkb.wkb_wavefunction(cont, float(spectrum.energies[kk]), wd,
                               lat.mode_positions)
ex = spectrum.modes[:, kk] / np.sqrt(lat.lattice_spacing)
if np.sign(vals[0]) != np.sign(ex[0]):
    vals = -vals
print(f"\nmode {kk}: WKB wavefunction vs eigenvector, relative error "
      f"{np.abs(vals - ex).max() / np.abs(ex).max():.2e}  (expected ~ 1/N)")
