r"""Scalar radial profiles of the Calabi-Eguchi-Hanson geometry.

Everything on the quotient chart is rotationally symmetric and therefore a
function of the squared radius ``u = |z|^2`` alone.  The two profile
functions that determine every tensor downstream are

    e^psi(u) = f'(u) = (1 + (a/u)^n)^(1/n),
    phi(u)   = -u f''(u) e^(-psi) = a^n / (a^n + u^n),

where ``f`` is the Kahler potential

    f(u) = (a^n + u^n)^(1/n)
         + (a/n) * sum_{j=0}^{n-1} zeta^j log((1 + u^n/a^n)^(1/n) - zeta^j),

with ``zeta = exp(2 pi i / n)`` and the additive constant fixed to zero.
The log-sum is real for u > 0 because the branches pair into conjugates;
:func:`potential` asserts the cancellation.

The closed forms here are written to avoid overflow near ``u = 0`` (where
``(a/u)^n`` blows up) by factoring the small ratio out first.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DomainError",
    "GeometryParams",
    "RadialProfile",
    "radius_sq",
    "f_prime",
    "f_second",
    "potential",
    "roots_of_unity_sum",
    "radial_profile",
    "fs_profile",
    "euclidean_profile",
]


class DomainError(ValueError):
    """Input outside the domain of a closed-form expression."""


@dataclass(frozen=True)
class GeometryParams:
    """Complex dimension ``n >= 2`` and scale ``a > 0`` (units of length^2)."""

    n: int
    a: float

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 2:
            raise DomainError(f"dimension n must be an integer >= 2, got {self.n!r}")
        if not self.a > 0:
            raise DomainError(f"scale a must be positive, got {self.a!r}")


@dataclass(frozen=True)
class RadialProfile:
    """Profile values at one radius: ``e_psi = f'(u)``, ``phi``, ``phi'``.

    ``e_psi > 0`` and ``phi < 1`` together are equivalent to positive
    definiteness of the rotationally symmetric metric they generate.
    """

    u: float
    e_psi: float
    phi: float
    phi_prime: float


def radius_sq(z) -> float:
    """Squared Euclidean norm ``u = sum_mu z^mu conj(z^mu)``; exact at 0."""
    z = np.asarray(z, dtype=complex)
    return float(np.vdot(z, z).real)


def _check_u(u: float, where: str) -> float:
    u = float(u)
    if not u > 0:
        raise DomainError(f"{where} requires u > 0, got u={u!r}")
    return u


def f_prime(u: float, params: GeometryParams) -> float:
    """Potential derivative ``f'(u) = (1 + (a/u)^n)^(1/n)``.

    Strictly decreasing, -> 1 as u -> infinity.  For u < a the equivalent
    form ``(a/u) (1 + (u/a)^n)^(1/n)`` is used so the power never overflows.
    """
    u = _check_u(u, "f_prime")
    n, a = params.n, params.a
    if u >= a:
        return (1.0 + (a / u) ** n) ** (1.0 / n)
    return (a / u) * (1.0 + (u / a) ** n) ** (1.0 / n)


def f_second(u: float, params: GeometryParams) -> float:
    """Second derivative ``f''(u) = -phi(u) e^psi(u) / u`` (negative)."""
    u = _check_u(u, "f_second")
    return -_phi(u, params) * f_prime(u, params) / u


def _phi(u: float, params: GeometryParams) -> float:
    # a^n/(a^n+u^n) without forming either power alone
    return 1.0 / (1.0 + (u / params.a) ** params.n)


def _one_minus_phi(u: float, params: GeometryParams) -> float:
    # u^n/(a^n+u^n), stable against cancellation for u << a
    return 1.0 / (1.0 + (params.a / u) ** params.n)


def potential(u: float, params: GeometryParams) -> float:
    """Kahler potential ``f(u)`` with principal-branch logs and constant 0.

    Raises
    ------
    DomainError
        If ``u <= 0``.
    ArithmeticError
        If the imaginary parts of the root-of-unity weighted logs fail to
        cancel to round-off (they cancel exactly in exact arithmetic).
    """
    u = _check_u(u, "potential")
    n, a = params.n, params.a
    x = u / a
    # alpha = (1 + x^n)^(1/n) > 1, overflow-safe for large x
    if x <= 1.0:
        alpha = (1.0 + x**n) ** (1.0 / n)
    else:
        alpha = x * (1.0 + x ** (-float(n))) ** (1.0 / n)
    zeta = cmath.exp(2j * cmath.pi / n)
    acc = 0.0 + 0.0j
    scale = 0.0
    for j in range(n):
        term = zeta**j * cmath.log(alpha - zeta**j)
        acc += term
        scale += abs(term)
    val = a * (alpha + acc / n)
    if abs(val.imag) > 1e-9 * max(1.0, scale):
        raise ArithmeticError(
            f"log branches failed to cancel: residual imag {val.imag!r}"
        )
    return val.real


def roots_of_unity_sum(alpha: complex, n: int) -> complex:
    """Evaluate ``(1/n) sum_j zeta^j / (alpha - zeta^j)`` by direct summation.

    Equals ``1/(alpha^n - 1)`` for every ``|alpha| != 1`` (the poles sit on
    the unit circle).  Kept as an explicit sum so it can serve as the
    brute-force side of that identity.
    """
    if n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    alpha = complex(alpha)
    if abs(abs(alpha) - 1.0) < 1e-9:
        raise DomainError(f"|alpha| = 1 is the pole set, got alpha={alpha!r}")
    zeta = cmath.exp(2j * cmath.pi / n)
    return sum(zeta**j / (alpha - zeta**j) for j in range(n)) / n


def radial_profile(u: float, params: GeometryParams) -> RadialProfile:
    """Bundle ``(e^psi, phi, phi')`` at radius ``u`` for the Ricci-flat profile.

    ``phi' = -(n/u) phi (1 - phi)``, with both factors computed in their
    overflow-safe forms.
    """
    u = _check_u(u, "radial_profile")
    phi = _phi(u, params)
    phi_prime = -(params.n / u) * phi * _one_minus_phi(u, params)
    return RadialProfile(u=u, e_psi=f_prime(u, params), phi=phi, phi_prime=phi_prime)


def fs_profile(u: float, scale: float = 1.0) -> RadialProfile:
    """Profile of the round projective metric, potential ``scale*log(scale+u)``.

    Useful as a rotationally-symmetric control that is *not* Ricci-flat.
    """
    if not scale > 0:
        raise DomainError(f"scale must be positive, got {scale!r}")
    u = float(u)
    if u < 0:
        raise DomainError(f"fs_profile requires u >= 0, got {u!r}")
    s = scale
    return RadialProfile(
        u=u, e_psi=s / (s + u), phi=u / (s + u), phi_prime=s / (s + u) ** 2
    )


def euclidean_profile(u: float) -> RadialProfile:
    """Flat-metric profile: ``e^psi = 1``, ``phi = 0``."""
    return RadialProfile(u=float(u), e_psi=1.0, phi=0.0, phi_prime=0.0)
