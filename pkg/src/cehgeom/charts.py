r"""Trivialization charts on the resolution and the metric across the zero
section.

The total space restricted to the i-th standard affine set is coordinatized
by a fiber coordinate ``z`` (which may vanish) and base coordinates
``zeta_k``, ``k != i``.  The blow-down map sends

    (i, z, zeta)  ->  w,   w_i = z^(1/n),  w_k = z^(1/n) zeta_k,

with the principal n-th root; the root ambiguity is exactly the deck group
of the quotient, so the image is well defined as an orbit.  Conversely
``z = (w_i)^n`` and ``zeta_k = w_k / w_i`` are invariant under the group and
recover the chart point without any branch choice.

Pulled back through the blow-down, the Ricci-flat metric becomes

    P(u) [ (1+|zeta|^2)/n^2 |dz|^2
           + |z|^2 |dzeta|^2
           + (1/n) sum_k (zbar zeta_k dz dzetabar_k + c.c.) ]
    + F(u) g_FS,

    P = ((1+|zeta|^2) / (a^n+u^n)^(1/n))^(n-1),
    F = a (a / (a^n+u^n)^(1/n))^(n-1),
    u = |z|^(2/n) (1+|zeta|^2),

manifestly smooth at ``z = 0``, where the fiber block is
``(1+|zeta|^2)^n / (a^(n-1) n^2)``, the mixed block vanishes, and the base
block is ``a`` times the Fubini-Study metric.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tensors import check_point, fubini_study
from .profiles import DomainError, GeometryParams

__all__ = [
    "ChartError",
    "ChartPoint",
    "PullbackMetric",
    "chart_to_quotient",
    "quotient_to_chart",
    "transition",
    "transition_jacobian",
    "chart_jacobian",
    "pullback_metric",
    "zero_section_restriction",
]


class ChartError(DomainError):
    """Point outside the domain of the requested chart."""


@dataclass(frozen=True)
class ChartPoint:
    """Point of the total space in trivialization ``i`` (1-based slot index).

    ``zeta`` lists the base coordinates for slots ``k != i`` in increasing
    slot order; ``z = 0`` encodes a zero-section point.
    """

    i: int
    z: complex
    zeta: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "z", complex(self.z))
        object.__setattr__(
            self, "zeta", np.atleast_1d(np.asarray(self.zeta, dtype=complex))
        )
        n = self.zeta.size + 1
        if not 1 <= self.i <= n:
            raise ChartError(f"chart index {self.i} out of range 1..{n}")

    @property
    def n(self) -> int:
        return self.zeta.size + 1

    @property
    def slots(self) -> list:
        """1-based slots carried by ``zeta``, in storage order."""
        return [k for k in range(1, self.n + 1) if k != self.i]

    def base_norm_sq(self) -> float:
        return float(np.vdot(self.zeta, self.zeta).real)

    def radius_sq(self) -> float:
        """``u = |z|^(2/n) (1 + |zeta|^2)`` of the underlying quotient point."""
        return abs(self.z) ** (2.0 / self.n) * (1.0 + self.base_norm_sq())


def _check_dim(p: ChartPoint, params: GeometryParams):
    if p.n != params.n:
        raise ChartError(
            f"chart point lives in dimension {p.n}, params have n={params.n}"
        )


def chart_to_quotient(p: ChartPoint, params: GeometryParams) -> np.ndarray:
    """Blow-down of a chart point with ``z != 0`` to a lift in C^n.

    The principal n-th root is used; any other root gives the same orbit.
    """
    _check_dim(p, params)
    if p.z == 0:
        raise ChartError("z = 0 maps to the zero section, not the quotient chart")
    n = p.n
    root = complex(p.z) ** (1.0 / n)
    w = np.empty(n, dtype=complex)
    w[p.i - 1] = root
    for pos, k in enumerate(p.slots):
        w[k - 1] = root * p.zeta[pos]
    return w


def quotient_to_chart(w, i: int) -> ChartPoint:
    """Chart coordinates of a lift ``w`` in trivialization ``i``.

    ``z = (w_i)^n`` and ``zeta_k = w_k / w_i`` are invariant under the deck
    group, so the result is independent of the chosen lift.
    """
    w = check_point(w)
    n = w.size
    if not 1 <= i <= n:
        raise ChartError(f"chart index {i} out of range 1..{n}")
    wi = w[i - 1]
    if wi == 0:
        raise ChartError(f"point has w_{i} = 0, not in chart {i}")
    zeta = np.array([w[k - 1] / wi for k in range(1, n + 1) if k != i])
    return ChartPoint(i=i, z=complex(wi**n), zeta=zeta)


def transition(p: ChartPoint, j: int) -> ChartPoint:
    """The same point of the total space in chart ``j``.

    Works for ``z = 0`` too: the fiber coordinate transforms by the bundle
    cocycle ``z' = z zeta_j^n`` and the base projectively, no roots needed.
    """
    n = p.n
    if not 1 <= j <= n:
        raise ChartError(f"chart index {j} out of range 1..{n}")
    if j == p.i:
        return p
    pos_j = p.slots.index(j)
    zj = p.zeta[pos_j]
    if zj == 0:
        raise ChartError(f"point not in chart {j}: zeta_{j} = 0")
    new_zeta = np.empty(n - 1, dtype=complex)
    for pos, k in enumerate(k for k in range(1, n + 1) if k != j):
        new_zeta[pos] = 1.0 / zj if k == p.i else p.zeta[p.slots.index(k)] / zj
    return ChartPoint(i=j, z=complex(p.z) * zj**n, zeta=new_zeta)


def transition_jacobian(p: ChartPoint, j: int) -> np.ndarray:
    """Holomorphic Jacobian of :func:`transition`, rows new coords
    ``(z', zeta')``, columns old coords ``(z, zeta)``."""
    n = p.n
    if j == p.i:
        return np.eye(n, dtype=complex)
    pos_j = p.slots.index(j)
    zj = p.zeta[pos_j]
    if zj == 0:
        raise ChartError(f"point not in chart {j}: zeta_{j} = 0")
    new_slots = [k for k in range(1, n + 1) if k != j]
    jac = np.zeros((n, n), dtype=complex)
    jac[0, 0] = zj**n                      # dz'/dz
    jac[0, 1 + pos_j] = n * complex(p.z) * zj ** (n - 1)
    for pos, k in enumerate(new_slots):
        if k == p.i:
            jac[1 + pos, 1 + pos_j] = -1.0 / zj**2
        else:
            pos_k = p.slots.index(k)
            jac[1 + pos, 1 + pos_k] = 1.0 / zj
            jac[1 + pos, 1 + pos_j] = -p.zeta[pos_k] / zj**2
    return jac


def chart_jacobian(p: ChartPoint, params: GeometryParams) -> np.ndarray:
    """Jacobian ``dw^mu / d(z, zeta)`` of the blow-down map, for ``z != 0``.

    Its determinant is the constant ``1/n``.
    """
    _check_dim(p, params)
    if p.z == 0:
        raise ChartError("blow-down Jacobian needs z != 0")
    n = p.n
    root = complex(p.z) ** (1.0 / n)
    jac = np.zeros((n, n), dtype=complex)
    jac[p.i - 1, 0] = root / (n * p.z)
    for pos, k in enumerate(p.slots):
        jac[k - 1, 0] = root * p.zeta[pos] / (n * p.z)
        jac[k - 1, 1 + pos] = root
    return jac


@dataclass(frozen=True)
class PullbackMetric:
    """Hermitian blocks of the pulled-back metric in chart coordinates
    ``(z, zeta_1, ..., zeta_{n-1})``.

    ``block_zetazeta`` is the full base block, the sum of the fiber-induced
    part and ``fs_scale`` times the Fubini-Study matrix.
    """

    block_zz: float
    block_zzeta: np.ndarray
    block_zetazeta: np.ndarray
    fs_scale: float

    def matrix(self) -> np.ndarray:
        """Assembled Hermitian n x n matrix, fiber coordinate first."""
        m = self.block_zzeta.size
        h = np.empty((m + 1, m + 1), dtype=complex)
        h[0, 0] = self.block_zz
        h[0, 1:] = self.block_zzeta
        h[1:, 0] = np.conj(self.block_zzeta)
        h[1:, 1:] = self.block_zetazeta
        return h

    def real_form(self) -> np.ndarray:
        """Riemannian metric on the underlying 2n real coordinates, ordered
        ``(Re z, Im z, Re zeta_1, Im zeta_1, ...)``."""
        h = self.matrix()
        n = h.shape[0]
        s, t = h.real, h.imag
        big = np.block([[s, t], [-t, s]])
        perm = np.arange(2 * n).reshape(2, n).T.reshape(-1)
        return big[np.ix_(perm, perm)]


def pullback_metric(p: ChartPoint, params: GeometryParams) -> PullbackMetric:
    """The Ricci-flat metric through the blow-down, valid down to ``z = 0``."""
    _check_dim(p, params)
    n, a = params.n, params.a
    s = 1.0 + p.base_norm_sq()
    u = p.radius_sq()
    # (a^n + u^n)^(1/n) without overflow: a * (1 + (u/a)^n)^(1/n)
    x = u / a
    if x <= 1.0:
        nth_root = a * (1.0 + x**n) ** (1.0 / n)
    else:
        nth_root = a * x * (1.0 + x ** (-float(n))) ** (1.0 / n)
    pref = (s / nth_root) ** (n - 1)
    fs_scale = a * (a / nth_root) ** (n - 1)
    block_zz = pref * s / n**2
    block_zzeta = pref * np.conj(p.z) * p.zeta / n
    base = pref * abs(p.z) ** 2 * np.eye(n - 1) + fs_scale * fubini_study(p.zeta)
    return PullbackMetric(
        block_zz=float(block_zz),
        block_zzeta=block_zzeta,
        block_zetazeta=base,
        fs_scale=float(fs_scale),
    )


def zero_section_restriction(zeta, params: GeometryParams) -> np.ndarray:
    """Metric induced on the zero section: ``a`` times Fubini-Study."""
    return params.a * fubini_study(zeta)
