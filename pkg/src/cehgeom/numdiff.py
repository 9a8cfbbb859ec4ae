r"""Finite-difference oracle for every closed-form tensor in the package.

All derivatives are Wirtinger derivatives taken through real central
differences: with ``z^mu = x^mu + i y^mu``,

    d/dz^mu    = (d/dx^mu - i d/dy^mu) / 2,
    d/dzbar^mu = (d/dx^mu + i d/dy^mu) / 2.

The oracle never evaluates the closed-form Christoffel or curvature
expressions it is checking, except as the comparison target:
first derivatives of the *metric* give the connection, an anti-holomorphic
derivative of that gives the curvature, and the complex Hessian of the
scalar potential gives back the metric.

Step sizes follow the usual truncation/cancellation compromise: second-order
central differences with a relative step of 1e-5 for first derivatives, and
fourth-order stencils with a relative step of 1e-3 for anything involving
two derivatives (a second-order stencil at that step would sit right at the
1e-6 certification tolerance; the fourth-order one clears it by three
orders of magnitude).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import curvature as _curvature
from .tensors import check_point, metric
from .profiles import GeometryParams, potential, radius_sq

__all__ = [
    "FDConfig",
    "FD_FIRST",
    "FD_SECOND",
    "wirtinger_partial",
    "complex_hessian",
    "holomorphic_hessian",
    "fd_metric_from_potential",
    "fd_christoffel",
    "fd_riemann",
    "fd_ricci_log_det",
    "CheckResult",
    "VerificationReport",
    "verify_pipeline",
]


@dataclass(frozen=True)
class FDConfig:
    """Relative step and stencil order for central differences.

    ``step`` is scaled by ``max(1, |z|)`` at the evaluation point.
    ``scheme`` is ``"central2"`` (3-point, O(h^2)) or ``"central4"``
    (5-point, O(h^4)).
    """

    step: float = 1e-5
    scheme: str = "central2"

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError(f"step must be positive, got {self.step!r}")
        if self.scheme not in ("central2", "central4"):
            raise ValueError(f"unknown scheme {self.scheme!r}")


#: defaults for first derivatives and for nested second derivatives
FD_FIRST = FDConfig(step=1e-5, scheme="central2")
FD_SECOND = FDConfig(step=1e-3, scheme="central4")


def _directional(field_fn, z, e, h, scheme):
    if scheme == "central2":
        return (field_fn(z + h * e) - field_fn(z - h * e)) / (2.0 * h)
    return (
        -field_fn(z + 2 * h * e)
        + 8.0 * field_fn(z + h * e)
        - 8.0 * field_fn(z - h * e)
        + field_fn(z - 2 * h * e)
    ) / (12.0 * h)


def wirtinger_partial(
    field_fn: Callable, z, index: int, conjugate: bool = False,
    cfg: FDConfig = FD_FIRST,
):
    """Central-difference estimate of ``d field / dz^index`` (or conjugate).

    ``field_fn`` maps a complex vector to a scalar or ndarray; the derivative
    has the same shape as the field value.
    """
    z = np.asarray(z, dtype=complex)
    h = cfg.step * max(1.0, float(np.linalg.norm(z)))
    e = np.zeros_like(z)
    e[index] = 1.0
    dx = _directional(field_fn, z, e, h, cfg.scheme)
    dy = _directional(field_fn, z, 1j * e, h, cfg.scheme)
    if conjugate:
        return 0.5 * (dx + 1j * dy)
    return 0.5 * (dx - 1j * dy)


def complex_hessian(field_fn: Callable, z, cfg: FDConfig = FD_SECOND) -> np.ndarray:
    """Mixed Hessian ``H[mu, nu] = d_mu dbar_nu field`` of a scalar field."""
    z = np.asarray(z, dtype=complex)
    n = z.size
    return np.array(
        [
            [
                wirtinger_partial(
                    lambda w, nu=nu: wirtinger_partial(
                        field_fn, w, nu, conjugate=True, cfg=cfg
                    ),
                    z,
                    mu,
                    cfg=cfg,
                )
                for nu in range(n)
            ]
            for mu in range(n)
        ]
    )


def holomorphic_hessian(field_fn: Callable, z, cfg: FDConfig = FD_SECOND) -> np.ndarray:
    """Pure Hessian ``H[mu, nu] = d_mu d_nu field`` of a scalar field."""
    z = np.asarray(z, dtype=complex)
    n = z.size
    return np.array(
        [
            [
                wirtinger_partial(
                    lambda w, nu=nu: wirtinger_partial(field_fn, w, nu, cfg=cfg),
                    z,
                    mu,
                    cfg=cfg,
                )
                for nu in range(n)
            ]
            for mu in range(n)
        ]
    )


def fd_metric_from_potential(
    z, params: GeometryParams, cfg: FDConfig = FD_SECOND
) -> np.ndarray:
    """Metric recovered as the mixed Hessian of the Kahler potential."""
    z = check_point(z)
    return complex_hessian(lambda w: potential(radius_sq(w), params), z, cfg)


def fd_christoffel(
    metric_fn: Callable, z, cfg: FDConfig = FD_FIRST,
    metric_inv: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Connection from first derivatives of the metric.

    ``Gamma^lam_{mu alpha} = g_{mu nubar, alpha} g^{nubar lam}``; the inverse
    is taken numerically from ``metric_fn`` unless supplied.  Output is
    indexed ``[lam, mu, alpha]``.
    """
    z = np.asarray(z, dtype=complex)
    n = z.size
    if metric_inv is None:
        metric_inv = np.linalg.inv(metric_fn(z))
    gamma = np.empty((n, n, n), dtype=complex)
    for alpha in range(n):
        dg = wirtinger_partial(metric_fn, z, alpha, cfg=cfg)  # [mu, nu]
        gamma[:, :, alpha] = (dg @ metric_inv).T  # [mu, lam] -> [lam, mu]
    return gamma


def fd_riemann(
    christoffel_fn: Callable, metric_fn: Callable, z, cfg: FDConfig = FD_FIRST
) -> np.ndarray:
    """Curvature from the anti-holomorphic derivative of a connection field.

    ``R^lam_{mu betabar alpha} = - dbar_beta Gamma^lam_{mu alpha}``, then the
    upper index is lowered with the metric.  Output is the fully lowered
    tensor indexed ``[mu, nu, alpha, beta]``.
    """
    z = np.asarray(z, dtype=complex)
    n = z.size
    g = metric_fn(z)
    out = np.empty((n, n, n, n), dtype=complex)
    for beta in range(n):
        dgamma = -wirtinger_partial(
            christoffel_fn, z, beta, conjugate=True, cfg=cfg
        )  # [lam, mu, alpha]
        out[:, :, :, beta] = np.einsum("lma,ln->mna", dgamma, g)
    return out


def fd_ricci_log_det(
    metric_fn: Callable, z, cfg: FDConfig = FD_SECOND
) -> np.ndarray:
    """Ricci tensor as ``-d dbar log det g``, entirely from the metric field."""

    def log_det(w):
        return np.log(np.linalg.det(metric_fn(w)).real)

    return -complex_hessian(log_det, np.asarray(z, dtype=complex), cfg)


# ---------------------------------------------------------------------------
# certification pipeline
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.residual < self.tol)


@dataclass
class VerificationReport:
    """Residuals of the six derivative-chain and algebraic identities."""

    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            c.name: {"residual": c.residual, "tol": c.tol, "passed": c.passed}
            for c in self.checks
        }


#: default tolerances; algebraic identities vs identities through stencils
TOL_ALGEBRAIC = 1e-12
TOL_FD_METRIC = 1e-6
TOL_FD_CHRISTOFFEL = 1e-6
TOL_FD_RIEMANN = 1e-5
TOL_FD_RICCI = 1e-5
TOL_KRETSCHMANN_REL = 1e-9


def verify_pipeline(
    z,
    params: GeometryParams,
    cfg: FDConfig = FD_FIRST,
    metric_fn: Optional[Callable] = None,
    tol_scale: float = 1.0,
) -> VerificationReport:
    """Certify the full derivative chain at one point.

    Checks, in order: the metric is the mixed Hessian of the potential, the
    connection is ``g_{,alpha} g^{-1}``, the curvature is ``-dbar Gamma``
    lowered, the Ricci tensor from ``-d dbar log det g`` vanishes, the
    determinant is one, and the curvature-norm scalar from brute-force
    contraction matches its closed form.

    ``metric_fn`` replaces the metric *field* consumed by the stencils and
    algebraic checks (fault injection for negative controls); the closed-form
    connection and curvature stay canonical comparison targets.
    """
    z = check_point(z)
    if metric_fn is None:
        metric_fn = lambda w: metric(w, params)
    second = FDConfig(step=max(cfg.step, FD_SECOND.step), scheme="central4")

    checks = []

    g = metric_fn(z)
    g_fd = fd_metric_from_potential(z, params, second)
    checks.append(
        CheckResult("metric_vs_potential", float(np.abs(g - g_fd).max()),
                    TOL_FD_METRIC * tol_scale)
    )

    gamma = _curvature.christoffel_ceh(z, params)
    gamma_fd = fd_christoffel(metric_fn, z, cfg)
    checks.append(
        CheckResult("christoffel_vs_metric", float(np.abs(gamma - gamma_fd).max()),
                    TOL_FD_CHRISTOFFEL * tol_scale)
    )

    riem = _curvature.riemann(z, params)
    riem_fd = fd_riemann(
        lambda w: _curvature.christoffel_ceh(w, params), metric_fn, z, cfg
    )
    checks.append(
        CheckResult("riemann_vs_christoffel", float(np.abs(riem - riem_fd).max()),
                    TOL_FD_RIEMANN * tol_scale)
    )

    ric_fd = fd_ricci_log_det(metric_fn, z, second)
    checks.append(
        CheckResult("ricci_log_det", float(np.abs(ric_fd).max()),
                    TOL_FD_RICCI * tol_scale)
    )

    det = np.linalg.det(g).real
    checks.append(
        CheckResult("det_unity", float(abs(det - 1.0)), TOL_ALGEBRAIC * tol_scale)
    )

    k_closed = _curvature.kretschmann_radial(radius_sq(z), params)
    k_contr = _curvature.kretschmann_contracted(z, params)
    checks.append(
        CheckResult("kretschmann_consistency",
                    float(abs(k_contr - k_closed) / abs(k_closed)),
                    TOL_KRETSCHMANN_REL * tol_scale)
    )

    return VerificationReport(checks)
