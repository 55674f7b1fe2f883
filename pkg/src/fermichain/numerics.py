"""Shared numerical kernels.

Symmetric tridiagonal eigensolver, quadrature that is robust to inverse
square-root endpoint singularities, bracketed root finding, and the
Clausen function Cl2.  Everything here is a pure function of its inputs,
so concurrent use is safe.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import quad
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq
from scipy.special import zeta


class NumericsError(Exception):
    """Base class for numerical-kernel failures."""


class InvalidInputError(NumericsError):
    """Non-finite or malformed input data."""


class BracketError(NumericsError):
    """Root bracket does not enclose a sign change."""


class DomainError(NumericsError):
    """Argument outside the documented domain of a special function."""


class ConvergenceError(NumericsError):
    """Quadrature or iteration failed to reach the requested tolerance.

    Carries the best available estimate and its error bound.
    """

    def __init__(self, message: str, estimate: float, error_bound: float):
        super().__init__(f"{message} (estimate={estimate!r}, bound={error_bound!r})")
        self.estimate = estimate
        self.error_bound = error_bound


@dataclass(frozen=True)
class Tolerance:
    """Accuracy request: absolute and relative targets plus an iteration cap."""

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_iter: int = 60

    def __post_init__(self):
        if self.abs_tol < 0 or self.rel_tol < 0:
            raise InvalidInputError("tolerances must be nonnegative")
        if self.abs_tol == 0 and self.rel_tol == 0:
            raise InvalidInputError("at least one of abs_tol, rel_tol must be positive")
        if self.max_iter < 1:
            raise InvalidInputError("max_iter must be a positive integer")


DEFAULT_ROOT_TOL = Tolerance(abs_tol=1e-10, rel_tol=1e-10, max_iter=60)
# Quadrature target 1e-9 relative; the iteration cap maps to the adaptive
# subdivision limit.
DEFAULT_QUAD_TOL = Tolerance(abs_tol=1e-12, rel_tol=1e-9, max_iter=200)


@dataclass(frozen=True)
class TridiagonalSymmetric:
    """Real symmetric tridiagonal matrix: diagonal B_n, off-diagonal J_n."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=float)
        e = np.asarray(self.offdiag, dtype=float)
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)
        if d.ndim != 1 or d.size < 1:
            raise InvalidInputError("diag must be a 1-d array of length >= 1")
        if e.ndim != 1 or e.size != d.size - 1:
            raise InvalidInputError("offdiag length must be len(diag) - 1")
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
            raise InvalidInputError("matrix entries must be finite")

    @property
    def size(self) -> int:
        return self.diag.size


class Singularity(enum.Enum):
    """Declared endpoint behavior of an integrand."""

    NONE = "none"
    AT_LOWER = "inverse-sqrt-at-lower"
    AT_UPPER = "inverse-sqrt-at-upper"
    BOTH = "inverse-sqrt-both"


@dataclass(frozen=True)
class IntegrandSpec:
    """Integrand with declared inverse-square-root endpoint singularities."""

    f: Callable[[float], float]
    lower: float
    upper: float
    singularity: Singularity = Singularity.NONE

    def __post_init__(self):
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise InvalidInputError("integration bounds must be finite")
        if self.lower > self.upper:
            raise InvalidInputError("lower bound exceeds upper bound")


def eigensolve_tridiagonal(
    m: TridiagonalSymmetric, want_vectors: bool = True
) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """Eigenvalues (ascending) and, optionally, orthonormal eigenvectors.

    Backed by LAPACK's symmetric tridiagonal drivers.  Eigenvalues of a
    Jacobi matrix with nonzero off-diagonal entries are simple, so the
    returned array is strictly increasing in that case; zero hoppings
    decouple the matrix and may produce repeated eigenvalues.
    """
    if m.size == 1:
        w = np.array([m.diag[0]])
        if want_vectors:
            return w, np.array([[1.0]])
        return w, None
    if want_vectors:
        w, v = eigh_tridiagonal(m.diag, m.offdiag)
        return w, v
    w = eigh_tridiagonal(m.diag, m.offdiag, eigvals_only=True)
    return w, None


def _quad_checked(f, lo, hi, tol: Tolerance, points=None) -> float:
    if lo == hi:
        return 0.0
    res = quad(
        f,
        lo,
        hi,
        epsabs=tol.abs_tol,
        epsrel=tol.rel_tol,
        limit=max(tol.max_iter, 50),
        points=points,
        full_output=1,
    )
    value, abserr = res[0], res[1]
    requested = max(tol.abs_tol, tol.rel_tol * abs(value))
    if len(res) > 3 and abserr > 50 * requested:
        raise ConvergenceError("quadrature did not converge: " + res[3], value, abserr)
    return value


def integrate(
    spec: IntegrandSpec,
    tol: Tolerance = DEFAULT_QUAD_TOL,
    points: Optional[Sequence[float]] = None,
) -> float:
    """Improper integral of ``spec.f`` over [lower, upper].

    Inverse-square-root endpoint singularities are removed before the
    adaptive pass with the substitution u^2 = distance to the singular
    endpoint; when both ends are singular the interval is split at its
    midpoint.  Interior breakpoints may be passed via ``points`` for
    integrands with known kinks (regular case only).
    """
    f, lo, hi = spec.f, spec.lower, spec.upper
    if lo == hi:
        return 0.0
    kind = spec.singularity
    if kind is Singularity.NONE:
        pts = None
        if points is not None:
            pts = sorted(p for p in points if lo < p < hi)
            pts = pts or None
        return _quad_checked(f, lo, hi, tol, points=pts)
    if kind is Singularity.BOTH:
        mid = 0.5 * (lo + hi)
        left = IntegrandSpec(f, lo, mid, Singularity.AT_LOWER)
        right = IntegrandSpec(f, mid, hi, Singularity.AT_UPPER)
        return integrate(left, tol) + integrate(right, tol)
    if kind is Singularity.AT_LOWER:
        def g(u):
            return 2.0 * u * f(lo + u * u) if u > 0.0 else 0.0
        return _quad_checked(g, 0.0, math.sqrt(hi - lo), tol)
    # Singularity.AT_UPPER
    def g(u):
        return 2.0 * u * f(hi - u * u) if u > 0.0 else 0.0
    return _quad_checked(g, 0.0, math.sqrt(hi - lo), tol)


def find_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: Tolerance = DEFAULT_ROOT_TOL,
) -> float:
    """Root of ``f`` inside [lo, hi] by Brent's bracketed method.

    Requires a sign change over the bracket; the returned point is always
    contained in the initial bracket.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise BracketError(f"no sign change on [{lo}, {hi}]: f={flo}, {fhi}")
    return brentq(
        f,
        lo,
        hi,
        xtol=max(tol.abs_tol, 1e-14),
        rtol=max(tol.rel_tol, 4 * np.finfo(float).eps),
        maxiter=max(tol.max_iter, 2),
    )


# zeta(2n) for the accelerated Clausen series; 60 terms cover theta <= pi
# with geometric ratio <= 1/4.
_ZETA_EVEN = zeta(2.0 * np.arange(1, 61))
_CL2_COEFF = _ZETA_EVEN / (np.arange(1, 61) * (2 * np.arange(1, 61) + 1))


def clausen_cl2(theta: float) -> float:
    """Clausen's integral Cl2(theta) = sum_{n>=1} sin(n theta)/n^2.

    Valid for theta in [0, 2*pi]; callers reduce mod 2*pi themselves.
    Evaluated through the accelerated series
    Cl2(t) = t - t*log(t) + sum_n zeta(2n) t^{2n+1} / (n (2n+1) (2pi)^{2n}),
    after folding [pi, 2*pi] back with Cl2(2*pi - t) = -Cl2(t).
    """
    t = float(theta)
    if not math.isfinite(t) or t < -1e-12 or t > 2 * math.pi + 1e-12:
        raise DomainError(f"theta={theta!r} outside [0, 2*pi]")
    t = min(max(t, 0.0), 2 * math.pi)
    sign = 1.0
    if t > math.pi:
        t = 2 * math.pi - t
        sign = -1.0
    if t == 0.0:
        return 0.0
    r = (t / (2 * math.pi)) ** 2
    total = t * (1.0 - math.log(t))
    power = t
    for c in _CL2_COEFF:
        power *= r
        term = c * power
        total += term
        if abs(term) < 1e-18:
            break
    return sign * total
