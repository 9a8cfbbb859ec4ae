r"""Real Hessian of the squared distance to the zero section.

With ``psi(u)`` the squared distance (see
:func:`cehgeom.geodesics.radial_arclength`) and ``z = x + i y``, the
covariant Hessian of ``psi(u(z))`` assembles, in the real coordinates
``(x_1..x_n, y_1..y_n)``, into the rank-two perturbation

    H = 2 psi' ( 1 + A v (x) v + B w (x) w ),
    v = (x; y),  w = (y; -x),

where ``B = Upsilon = (n-1) a^n / (u (a^n+u^n))`` comes from the connection
term ``Gamma . grad(psi)`` and ``A = 2 psi''/psi' - Upsilon``.  Since
``v . w = 0`` and ``|v|^2 = |w|^2 = u``, the spectrum is exactly

    lambda_1 = 2 psi'                 (multiplicity 2n-2),
    lambda_2 = 2 psi' (1 + A u) = 2 u (psi')^2 / psi,
    lambda_3 = 2 psi' (1 + Upsilon u),

all positive for u > 0: the distance function is strictly convex off the
zero section, which is what forces compact minimal submanifolds into it.

The radial derivatives have closed forms in terms of ``psi`` itself:

    psi'  = sqrt(psi/u) (u^n/(a^n+u^n))^((n-1)/(2n)),
    psi'' = (psi'/2 psi) (psi' + psi ((n-2) a^n - u^n) / (u (a^n+u^n))).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geodesics import radial_arclength
from .tensors import check_point
from .profiles import DomainError, GeometryParams, radial_profile, radius_sq

__all__ = [
    "HessianSpectrum",
    "upsilon",
    "psi_prime",
    "psi_second_derivative",
    "hessian_blocks",
    "hessian_spectrum",
]


def upsilon(u: float, params: GeometryParams) -> float:
    """Connection coefficient ``(n-1) a^n / (u (a^n+u^n))``."""
    if not u > 0:
        raise DomainError(f"upsilon requires u > 0, got {u!r}")
    return (params.n - 1) * radial_profile(u, params).phi / u


def psi_prime(u: float, params: GeometryParams) -> float:
    """Radial derivative of the squared distance to the zero section."""
    if not u > 0:
        raise DomainError(f"psi_prime requires u > 0, got {u!r}")
    n = params.n
    dist = radial_arclength(u, params).distance
    # (u^n/(a^n+u^n))^((n-1)/(2n)), overflow-safe
    frac = 1.0 / (1.0 + (params.a / u) ** n)
    return dist / np.sqrt(u) * frac ** ((n - 1.0) / (2.0 * n))


def psi_second_derivative(u: float, params: GeometryParams) -> float:
    """Second radial derivative of the squared distance.

    Uses ``((n-2) a^n - u^n)/(a^n+u^n) = (n-1) phi - 1`` to stay stable at
    both ends of the radial range.
    """
    if not u > 0:
        raise DomainError(f"psi_second_derivative requires u > 0, got {u!r}")
    n = params.n
    psi = radial_arclength(u, params).psi
    dp = psi_prime(u, params)
    phi = radial_profile(u, params).phi
    return dp / (2.0 * psi) * (dp + psi * ((n - 1) * phi - 1.0) / u)


@dataclass(frozen=True)
class HessianSpectrum:
    """Closed-form eigenvalues of the real Hessian with their coefficients.

    ``lambda1`` occurs with multiplicity ``2n-2``; the other two are simple.
    """

    lambda1: float
    lambda2: float
    lambda3: float
    upsilon: float
    coef_a: float
    coef_b: float

    def multiset(self, n: int) -> np.ndarray:
        """Sorted eigenvalue multiset of the ``2n x 2n`` Hessian."""
        return np.sort(
            np.array([self.lambda1] * (2 * n - 2) + [self.lambda2, self.lambda3])
        )


def hessian_blocks(z, params: GeometryParams) -> np.ndarray:
    """Assembled ``2n x 2n`` real symmetric Hessian in ``(x..., y...)`` order."""
    z = check_point(z)
    u = radius_sq(z)
    n = z.size
    x, y = z.real, z.imag
    dp = psi_prime(u, params)
    ups = upsilon(u, params)
    ca = 2.0 * psi_second_derivative(u, params) / dp - ups
    cb = ups
    xx, yy = np.outer(x, x), np.outer(y, y)
    xy, yx = np.outer(x, y), np.outer(y, x)
    top = np.hstack([ca * xx + cb * yy, ca * xy - cb * yx])
    bot = np.hstack([ca * yx - cb * xy, cb * xx + ca * yy])
    return 2.0 * dp * (np.eye(2 * n) + np.vstack([top, bot]))


def hessian_spectrum(z, params: GeometryParams) -> HessianSpectrum:
    """Closed-form spectrum of :func:`hessian_blocks` at the same point."""
    z = check_point(z)
    u = radius_sq(z)
    psi = radial_arclength(u, params).psi
    dp = psi_prime(u, params)
    ups = upsilon(u, params)
    ca = 2.0 * psi_second_derivative(u, params) / dp - ups
    return HessianSpectrum(
        lambda1=2.0 * dp,
        lambda2=2.0 * u * dp**2 / psi,
        lambda3=2.0 * dp * (1.0 + u * ups),
        upsilon=ups,
        coef_a=ca,
        coef_b=ups,
    )
