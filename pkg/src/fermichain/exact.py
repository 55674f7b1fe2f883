"""Exact diagonalization of finite chains.

Single-particle spectra and eigenfunctions of the tridiagonal Hamiltonian,
the monic orthogonal-polynomial recurrence used as a spectral cross-check,
correlation matrices of M-filled states, exact local densities, block
entanglement entropies, and per-well eigenfunction localization.  This
module is the oracle against which the WKB asymptotics are validated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
from scipy.special import xlogy

from .numerics import TridiagonalSymmetric, eigensolve_tridiagonal
from .profiles import LatticeProfile


class ExactError(ValueError):
    """Invalid state or numerically unusable data in the exact module."""


@dataclass(frozen=True)
class SingleParticleSpectrum:
    """Eigenvalues (ascending) and orthonormal eigenvector matrix.

    Column k of ``modes`` is the single-particle eigenfunction of energy
    ``energies[k]``, with the sign fixed so that the first component that
    is not negligibly small is positive.
    """

    energies: np.ndarray
    modes: np.ndarray
    profile: LatticeProfile

    @property
    def num_sites(self) -> int:
        return self.energies.size


@dataclass(frozen=True)
class FilledState:
    """The state occupying the M lowest single-particle modes."""

    M: int
    fermi_energy: Optional[float]
    filling: float
    zero_mode_degenerate: bool = False


@dataclass(frozen=True)
class CorrelationMatrix:
    """Two-point function <c+_n c_m> in an M-filled state (rank-M projector)."""

    entries: np.ndarray
    state: FilledState


def _fix_signs(v: np.ndarray) -> np.ndarray:
    # First component above a relative threshold decides the column sign;
    # a hard zero test would make golden outputs depend on rounding noise.
    out = v.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        big = np.abs(col) > 1e-12 * np.abs(col).max()
        first = int(np.argmax(big))
        if col[first] < 0:
            out[:, k] = -col
    return out


def diagonalize(p: LatticeProfile) -> SingleParticleSpectrum:
    """Full spectrum and eigenfunctions of the chain Hamiltonian."""
    m = TridiagonalSymmetric(p.fields, p.hoppings)
    energies, modes = eigensolve_tridiagonal(m, want_vectors=True)
    return SingleParticleSpectrum(energies, _fix_signs(modes), p)


def filled_state(s: SingleParticleSpectrum, M: int) -> FilledState:
    """M-filled state bookkeeping; flags a zero mode at the Fermi level."""
    N = s.num_sites
    if not 0 <= M <= N:
        raise ExactError(f"M={M} outside [0, {N}]")
    if M == 0:
        return FilledState(0, None, 0.0)
    eF = float(s.energies[M - 1])
    return FilledState(M, eF, M / N, zero_mode_degenerate=abs(eF) <= 1e-12)


def critical_polynomial(
    p: LatticeProfile, eps: float
) -> Tuple[np.ndarray, np.ndarray]:
    """Values P_0..P_N of the monic polynomial recurrence at ``eps``.

    P_{n+1} = (eps - b_n) P_n - a_{n-1} P_{n-1} with a_n = J_n^2, b_n = B_n,
    P_{-1} = 0 and P_0 = 1.  The spectrum of the chain is the root set of
    the last entry P_N.  To keep sign information exact for large N the
    values are returned scaled: P_n = values[n] * 2.0 ** exponents[n].
    """
    N = p.num_sites
    a = p.hoppings ** 2
    b = p.fields
    values = np.empty(N + 1)
    exponents = np.zeros(N + 1, dtype=np.int64)
    p_prev, e_prev = 0.0, 0    # P_{n-1}
    p_cur, e_cur = 1.0, 0      # P_n
    values[0] = 1.0
    for n in range(N):
        # Both terms are brought to a common power-of-two exponent before
        # the sum; down-shifts can only underflow (harmlessly, below the
        # double-precision contribution threshold), never overflow.
        coupling = a[n - 1] if n > 0 else 0.0
        t1 = (eps - b[n]) * p_cur
        t2 = -coupling * p_prev
        E = max(e_cur if t1 != 0.0 else e_prev, e_prev if t2 != 0.0 else e_cur)
        s1 = e_cur - E
        s2 = e_prev - E
        p_new = (t1 * (2.0 ** s1) if s1 > -1074 else 0.0) + \
                (t2 * (2.0 ** s2) if s2 > -1074 else 0.0)
        e_new = E
        if p_new != 0.0:
            mant, ex = math.frexp(p_new)
            p_new, e_new = mant, E + ex
        values[n + 1] = p_new
        exponents[n + 1] = e_new
        p_prev, e_prev = p_cur, e_cur
        p_cur, e_cur = p_new, e_new
    return values, exponents


def correlation_matrix(s: SingleParticleSpectrum, st: FilledState) -> CorrelationMatrix:
    """C = Phi_M Phi_M^T over the M lowest modes."""
    if st.M > s.num_sites:
        raise ExactError("filled state does not match the spectrum size")
    occ = s.modes[:, : st.M]
    return CorrelationMatrix(occ @ occ.T, st)


def density_exact(s: SingleParticleSpectrum, st: FilledState) -> np.ndarray:
    """Site occupations <c+_n c_n> (the diagonal of the correlation matrix)."""
    if st.M > s.num_sites:
        raise ExactError("filled state does not match the spectrum size")
    return (s.modes[:, : st.M] ** 2).sum(axis=1)


def _binary_entropy(lam: np.ndarray, kind: str, alpha: float) -> np.ndarray:
    if kind == "von_neumann":
        return -(xlogy(lam, lam) + xlogy(1.0 - lam, 1.0 - lam))
    if kind == "renyi":
        if alpha <= 0:
            raise ExactError("Renyi index must be positive")
        if alpha == 1.0:
            return _binary_entropy(lam, "von_neumann", alpha)
        return np.log(lam ** alpha + (1.0 - lam) ** alpha) / (1.0 - alpha)
    raise ExactError(f"unknown entropy kind {kind!r}")


def entanglement_entropy(
    c: CorrelationMatrix,
    block: Union[range, Tuple[int, int]],
    kind: str = "von_neumann",
    alpha: float = 2.0,
) -> float:
    """Block entropy from the truncated correlation matrix.

    ``block`` is a contiguous half-open site range (start, stop).  The block
    eigenvalues are clamped to [0, 1] within a 1e-12 window; anything
    further outside indicates a broken projector and raises.
    """
    if isinstance(block, range):
        start, stop = block.start, block.stop
        if block.step != 1:
            raise ExactError("block must be contiguous")
    else:
        start, stop = block
    N = c.entries.shape[0]
    if not (0 <= start <= stop <= N):
        raise ExactError(f"block [{start}, {stop}) outside [0, {N})")
    if start == stop:
        return 0.0
    sub = c.entries[start:stop, start:stop]
    lam = np.linalg.eigvalsh(sub)
    if lam.min() < -1e-12 or lam.max() > 1 + 1e-12:
        raise ExactError(
            f"block eigenvalues outside [0,1] beyond tolerance: "
            f"[{lam.min()}, {lam.max()}]"
        )
    lam = np.clip(lam, 0.0, 1.0)
    return float(_binary_entropy(lam, kind, alpha).sum())


def localize_eigenfunction(
    s: SingleParticleSpectrum, k: int, wells
) -> Optional[int]:
    """Index of the well holding the majority of mode k's weight.

    Weight is the squared eigenvector mass on lattice sites inside each
    well interval of the decomposition.  Returns None ("delocalized") when
    no well reaches a strict majority, which also resolves symmetric ties.
    """
    if not 0 <= k < s.num_sites:
        raise ExactError(f"mode index {k} out of range")
    if not wells.wells:
        return None
    weight = s.modes[:, k] ** 2
    x = s.profile.site_positions
    slack = 1e-9 * s.profile.length
    fractions = [
        float(weight[(x >= w.lower - slack) & (x <= w.upper + slack)].sum())
        for w in wells.wells
    ]
    best = int(np.argmax(fractions))
    if fractions[best] > 0.5 + 1e-9:
        return best
    return None
