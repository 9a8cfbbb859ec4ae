r"""Connection and curvature of the Ricci-flat metric, in closed form.

On a Kahler manifold only the holomorphic connection coefficients survive,
``Gamma^lam_{mu alpha} = g_{mu nubar, alpha} g^{nubar lam}``, symmetric in
the lower pair.  For any rotationally symmetric potential they reduce to

    Gamma^lam_{mu alpha} = -(phi/u) (delta^lam_mu zbar_alpha
                                     + delta^lam_alpha zbar_mu)
        + [(phi(1-phi) - u phi') / (u(1-phi))] zbar_mu zbar_alpha z^lam / u,

which needs only ``phi`` and ``phi'`` -- an overall rescaling of the metric
drops out.  The Ricci-flat profile has ``phi' = -(n/u) phi (1-phi)``, which
collapses the second coefficient to ``(n+1) phi / u`` and gives the
specialised form in :func:`christoffel_ceh`.

The fully lowered curvature tensor ``R_{mu nubar alpha betabar}`` has three
groups of terms: quadratic in the metric, bilinear in ``zbar (x) z`` against
the metric with weight ``-(n+1) e^{-(n-1) psi}``, and quartic in ``z`` with
weight ``+(n+1)(n+2) e^{-2(n-1) psi}``; the common prefactor is
``phi e^{-psi} / u``.  Contracting everything against the inverse metric
gives the squared curvature norm

    K(u) = n (n+2) (n^2 - 1) a^{2n} / (a^n + u^n)^{2(n+1)/n},

strictly decreasing from ``n(n+2)(n^2-1)/a^2`` at the zero section to zero.
"""

from __future__ import annotations

import numpy as np

from .tensors import check_point, hermitian_outer, metric, metric_inverse
from .profiles import (
    DomainError,
    GeometryParams,
    RadialProfile,
    radial_profile,
    radius_sq,
)

__all__ = [
    "christoffel_rot_sym",
    "christoffel_ceh",
    "riemann",
    "ricci",
    "kretschmann",
    "kretschmann_radial",
    "kretschmann_contracted",
]


def christoffel_rot_sym(z, profile: RadialProfile) -> np.ndarray:
    """Connection of a general rotationally symmetric Kahler metric.

    ``profile`` carries ``(phi, phi')`` at ``u = |z|^2`` (checked); the
    result is indexed ``[lam, mu, alpha]`` and symmetric in ``(mu, alpha)``.

    Raises
    ------
    DomainError
        If ``phi >= 1`` (degenerate metric) or ``z`` is the zero vector.
    """
    z = check_point(z)
    u = radius_sq(z)
    if abs(profile.u - u) > 1e-8 * max(1.0, u):
        raise ValueError(f"profile evaluated at u={profile.u!r} but |z|^2={u!r}")
    if profile.phi >= 1.0:
        raise DomainError(f"degenerate metric: phi={profile.phi!r} >= 1")
    n = z.size
    zb = np.conj(z)
    delta = np.eye(n)
    phi, dphi = profile.phi, profile.phi_prime
    # [lam, mu, alpha]
    sym = np.einsum("lm,a->lma", delta, zb) + np.einsum("la,m->lma", delta, zb)
    cubic = np.einsum("m,a,l->lma", zb, zb, z) / u
    coef = (phi * (1.0 - phi) - u * dphi) / (u * (1.0 - phi))
    return -(phi / u) * sym + coef * cubic


def christoffel_ceh(z, params: GeometryParams) -> np.ndarray:
    """Connection of the Ricci-flat metric, indexed ``[lam, mu, alpha]``.

    ``Gamma^lam_{mu alpha} = -(phi/u) (zbar_mu delta^lam_alpha
    + zbar_alpha delta^lam_mu - (n+1) zbar_alpha zbar_mu z^lam / u)``.
    """
    z = check_point(z)
    u = radius_sq(z)
    n = params.n
    prof = radial_profile(u, params)
    zb = np.conj(z)
    delta = np.eye(n)
    sym = np.einsum("la,m->lma", delta, zb) + np.einsum("lm,a->lma", delta, zb)
    cubic = np.einsum("a,m,l->lma", zb, zb, z) / u
    return -(prof.phi / u) * (sym - (n + 1) * cubic)


def riemann(z, params: GeometryParams) -> np.ndarray:
    """Fully lowered curvature tensor, indexed ``[mu, nu, alpha, beta]``
    for ``R_{mu nubar alpha betabar}``.

    Symmetric under exchange of the holomorphic pair ``mu <-> alpha`` and of
    the anti-holomorphic pair ``nu <-> beta``; Hermitian in the sense
    ``R[m,n,a,b] = conj(R[n,m,b,a])``.
    """
    z = check_point(z)
    u = radius_sq(z)
    n = params.n
    prof = radial_profile(u, params)
    g = metric(z, params)
    pref = prof.phi / (u * prof.e_psi)
    w = prof.e_psi ** (-(n - 1))
    zbz = hermitian_outer(z) / u

    t1 = np.einsum("an,mb->mnab", g, g) + np.einsum("mn,ab->mnab", g, g)
    t2 = (
        np.einsum("mb,an->mnab", zbz, g)
        + np.einsum("ab,mn->mnab", zbz, g)
        + np.einsum("mn,ab->mnab", zbz, g)
        + np.einsum("an,mb->mnab", zbz, g)
    )
    t3 = np.einsum("mn,ab->mnab", zbz, zbz)
    return pref * (t1 - (n + 1) * w * t2 + (n + 1) * (n + 2) * w**2 * t3)


def ricci(z, params: GeometryParams) -> np.ndarray:
    """Ricci tensor by contraction, ``g^{nubar alpha} R_{mu nubar alpha betabar}``.

    Identically zero for this metric; returned so the residual can be
    inspected.  The independent route through ``-d dbar log det g`` lives in
    :func:`cehgeom.numdiff.fd_ricci_log_det`.
    """
    z = check_point(z)
    ginv = metric_inverse(z, params)
    return np.einsum("na,mnab->mb", ginv, riemann(z, params))


def kretschmann_radial(u: float, params: GeometryParams) -> float:
    """Squared curvature norm as a function of the radius alone.

    ``K = n(n+2)(n^2-1) a^{2n} (a^n + u^n)^{-2(n+1)/n}``; evaluated through
    the profile functions so neither power overflows.
    """
    n, a = params.n, params.a
    prof = radial_profile(u, params)
    # a^n/(a^n+u^n)^((n+1)/n) = phi * e^-psi / u
    pref = prof.phi / (u * prof.e_psi)
    return float(n * (n + 2) * (n**2 - 1) * pref**2)


def kretschmann(z, params: GeometryParams) -> float:
    """Squared curvature norm at a point of the quotient chart."""
    z = check_point(z)
    return kretschmann_radial(radius_sq(z), params)


def kretschmann_contracted(z, params: GeometryParams) -> float:
    """Brute-force curvature norm: contract the Riemann tensor with itself,
    every index raised explicitly with the inverse metric."""
    z = check_point(z)
    r = riemann(z, params)
    ginv = metric_inverse(z, params)
    val = np.einsum(
        "mnab,rscd,sm,nr,da,bc->", r, r, ginv, ginv, ginv, ginv, optimize=True
    )
    return float(val.real)
