r"""Geodesic flow on the quotient chart and on the zero section.

On a Kahler manifold the geodesic equation keeps only the holomorphic
connection, and for the Ricci-flat metric it closes over two invariants of
the state, ``u = |z|^2`` and the C^n pairing ``<z, zdot> = sum zbar zdot``:

    zddot = phi(u) (2 <z,zdot>/u zdot - (n+1) <z,zdot>^2/u^2 z),

with ``phi = a^n/(a^n+u^n)``.  This is the contraction of the closed-form
connection with the velocity, so straight lines are recovered at infinity
and radial rays are preserved.

The squared distance from radius ``u`` to the zero section is the quadrature

    sqrt(psi)(u) = (sqrt(a)/n) * integral_0^{(u/a)^(n/2)} (tau^2+1)^{-(n-1)/(2n)} dtau,

smooth and increasing, with ``psi ~ u`` at infinity.

Closed-geodesic dichotomy: along any trajectory, at an interior critical
point ``T`` of ``u(t)`` one has ``<z,zdot>(T) = i alpha u(T)`` for real
``alpha``, and

    uddot(T) = 2 (n-1) phi(u) u alpha^2 + 2 |zdot|^2  >=  0,

so ``u`` admits no interior maximum and nothing off the zero section closes
up.  The zero section itself carries ``a`` times the Fubini-Study metric,
all of whose geodesics are closed; at unit speed their common period is
``pi sqrt(a)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple, Optional

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.optimize import brentq

from .tensors import check_point, fubini_study, metric
from .profiles import DomainError, GeometryParams, radial_profile, radius_sq

__all__ = [
    "GeodesicState",
    "Trajectory",
    "ArcLength",
    "CriticalPoint",
    "ClosedGeodesicReport",
    "FSTrajectory",
    "geodesic_rhs",
    "energy",
    "integrate",
    "radial_arclength",
    "classify_closed",
    "fs_energy",
    "zero_section_geodesic",
]

#: inner integration cutoff, relative to the scale a
U_MIN_FACTOR = 1e-8

#: |zeta|^2 at which the base integrator hops to a neighbouring chart
_CHART_ESCAPE_SQ = 9.0

# classifications / terminations
CONSTANT = "constant"
ESCAPES = "escapes"
RETURNS = "returns_to_start"
HIT_CUTOFF = "hit_inner_cutoff"
COMPLETED = "completed"
ESCAPED = "escaped"


@dataclass(frozen=True)
class GeodesicState:
    """Position (a lift, nonzero) and complex velocity on the quotient chart."""

    z: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "z", check_point(self.z))
        v = np.atleast_1d(np.asarray(self.v, dtype=complex))
        if v.shape != self.z.shape:
            raise DomainError("velocity shape must match position shape")
        object.__setattr__(self, "v", v)


@dataclass
class Trajectory:
    """Time-ordered samples of one geodesic run.

    ``termination`` is one of ``completed`` (reached ``t_end``), ``escaped``
    (crossed the escape radius) or ``hit_inner_cutoff``.  ``sol`` keeps the
    integrator's dense output for refinement work.
    """

    t: np.ndarray
    z: np.ndarray
    v: np.ndarray
    u: np.ndarray
    energy: np.ndarray
    termination: str
    sol: object = field(default=None, repr=False)

    def state(self, k: int) -> GeodesicState:
        return GeodesicState(self.z[k], self.v[k])

    def energy_drift(self) -> float:
        e0 = self.energy[0]
        return float(np.abs(self.energy - e0).max() / abs(e0)) if e0 else 0.0


def geodesic_rhs(z, v, params: GeometryParams) -> np.ndarray:
    """Acceleration of the geodesic flow at state ``(z, v)``.

    Equals ``-Gamma^lam_{mu alpha} v^mu v^alpha`` for the closed-form
    connection, contracted analytically.
    """
    z = check_point(z)
    v = np.asarray(v, dtype=complex)
    u = radius_sq(z)
    n = params.n
    phi = radial_profile(u, params).phi
    ip = np.vdot(z, v)  # sum conj(z) v
    return phi * (2.0 * ip / u * v - (n + 1) * ip**2 / u**2 * z)


def energy(z, v, params: GeometryParams) -> float:
    """Kinetic energy ``g_{mu nubar} v^mu conj(v^nu)``; conserved by the flow."""
    g = metric(z, params)
    return float(np.einsum("m,mn,n->", v, g, np.conj(v)).real)


def _pack(z, v):
    return np.concatenate([z.real, z.imag, v.real, v.imag])


def _unpack(y, n):
    return y[:n] + 1j * y[n : 2 * n], y[2 * n : 3 * n] + 1j * y[3 * n :]


def integrate(
    state: GeodesicState,
    t_end: float,
    params: GeometryParams,
    tol: float = 1e-10,
    u_min: Optional[float] = None,
    u_escape: Optional[float] = None,
) -> Trajectory:
    """Integrate the flow over ``[0, t_end]`` with an adaptive embedded
    Runge-Kutta scheme (DOP853) at relative tolerance ``tol``.

    Terminates early when ``u`` falls to ``u_min`` (default ``1e-8 a``; the
    connection has ``1/u`` factors and crossing the zero section belongs to
    the chart machinery, not this integrator) or exceeds ``u_escape``.
    """
    n = params.n
    if state.z.size != n:
        raise DomainError(f"state has dimension {state.z.size}, params n={n}")
    if u_min is None:
        u_min = U_MIN_FACTOR * params.a

    def rhs(t, y):
        z, v = _unpack(y, n)
        u = np.vdot(z, z).real
        phi = 1.0 / (1.0 + (u / params.a) ** n)
        ip = np.vdot(z, v)
        acc = phi * (2.0 * ip / u * v - (n + 1) * ip**2 / u**2 * z)
        return _pack(v, acc)

    def cutoff(t, y):
        z, _ = _unpack(y, n)
        return np.vdot(z, z).real - u_min

    cutoff.terminal = True
    cutoff.direction = -1
    events = [cutoff]

    if u_escape is not None:

        def escape(t, y):
            z, _ = _unpack(y, n)
            return np.vdot(z, z).real - u_escape

        escape.terminal = True
        escape.direction = 1
        events.append(escape)

    sol = solve_ivp(
        rhs,
        (0.0, float(t_end)),
        _pack(state.z, state.v),
        method="DOP853",
        rtol=tol,
        atol=tol * 1e-2,
        dense_output=True,
        events=events,
    )
    if sol.status == 1:
        hit = sol.t_events[0].size > 0
        termination = HIT_CUTOFF if hit else ESCAPED
    else:
        termination = COMPLETED

    zs = (sol.y[:n] + 1j * sol.y[n : 2 * n]).T
    vs = (sol.y[2 * n : 3 * n] + 1j * sol.y[3 * n :]).T
    us = np.einsum("km,km->k", zs, np.conj(zs)).real
    es = np.array([energy(zk, vk, params) for zk, vk in zip(zs, vs)])
    return Trajectory(
        t=sol.t, z=zs, v=vs, u=us, energy=es, termination=termination, sol=sol
    )


class ArcLength(NamedTuple):
    """Squared distance ``psi`` to the zero section and its square root."""

    psi: float
    distance: float


@lru_cache(maxsize=4096)
def _sqrt_psi(u: float, n: int, a: float) -> float:
    # integral of (tau^2+1)^(-beta) over [0, X], X = (u/a)^(n/2).  For X > 1
    # the power-law tail is split off analytically (QUADPACK silently loses
    # the O(1) correction on huge intervals) and the remainder is pushed to
    # the compact integrand s^(2 beta - 2) ((1+s^2)^(-beta) - 1), s = 1/tau,
    # which is smooth and bounded down to s = 0.
    if u == 0.0:
        return 0.0
    beta = (n - 1.0) / (2.0 * n)
    upper = (u / a) ** (n / 2.0)
    if upper <= 1.0:
        val, _ = quad(
            lambda tau: (tau * tau + 1.0) ** (-beta), 0.0, upper,
            epsabs=1e-13, epsrel=1e-13,
        )
    else:
        head, _ = quad(
            lambda tau: (tau * tau + 1.0) ** (-beta), 0.0, 1.0,
            epsabs=1e-13, epsrel=1e-13,
        )
        tail = n * (upper ** (1.0 / n) - 1.0)
        corr, _ = quad(
            lambda s: s ** (2.0 * beta - 2.0) * ((1.0 + s * s) ** (-beta) - 1.0),
            1.0 / upper, 1.0,
            epsabs=1e-12, epsrel=1e-12, limit=200,
        )
        val = head + tail + corr
    return math.sqrt(a) / n * val


def radial_arclength(u: float, params: GeometryParams) -> ArcLength:
    """Distance to the zero section by adaptive Gauss-Kronrod quadrature.

    The integrand is smooth; results are cached on ``(u, n, a)`` (pure
    function, safe under concurrent readers).
    """
    u = float(u)
    if u < 0:
        raise DomainError(f"radial_arclength requires u >= 0, got {u!r}")
    d = _sqrt_psi(u, params.n, params.a)
    return ArcLength(psi=d * d, distance=d)


@dataclass(frozen=True)
class CriticalPoint:
    """Interior critical point of ``u(t)`` with the closed-form ``uddot``."""

    t: float
    u: float
    uddot: float


@dataclass
class ClosedGeodesicReport:
    classification: str
    trajectory: Optional[Trajectory]
    critical_points: list


def _uddot_closed_form(z, v, params: GeometryParams) -> float:
    """``uddot`` at a critical point of ``u``, from the flow's closed form."""
    u = np.vdot(z, z).real
    alpha = np.vdot(z, v).imag / u
    phi = radial_profile(float(u), params).phi
    return float(
        2.0 * (params.n - 1) * phi * u * alpha**2 + 2.0 * np.vdot(v, v).real
    )


def classify_closed(
    state: GeodesicState,
    t_max: float,
    params: GeometryParams,
    tol: float = 1e-10,
    return_tol: float = 1e-6,
    u_escape: Optional[float] = None,
) -> ClosedGeodesicReport:
    """Run the flow and classify the trajectory.

    ``returns_to_start`` requires position and velocity to simultaneously
    revisit the initial state within ``return_tol`` (never observed off the
    zero section); critical points of ``u(t)`` are located from the dense
    output and reported with the nonnegative closed-form ``uddot``
    certificate.
    """
    if not np.any(state.v):
        return ClosedGeodesicReport(CONSTANT, None, [])
    traj = integrate(state, t_max, params, tol=tol, u_escape=u_escape)
    n = params.n

    ts = _dense_times(traj)
    zs, vs = _unpack(traj.sol.sol(ts), n)
    zs, vs = zs.T, vs.T

    # interior critical points of u: roots of udot = 2 Re<z, zdot>
    udot = 2.0 * np.einsum("km,km->k", np.conj(zs), vs).real
    crits = []
    sign = np.sign(udot)
    for k in np.nonzero(sign[:-1] * sign[1:] < 0)[0]:
        f = lambda t: 2.0 * float(
            np.vdot(_unpack(traj.sol.sol(t), n)[0],
                    _unpack(traj.sol.sol(t), n)[1]).real
        )
        t_c = brentq(f, ts[k], ts[k + 1], xtol=1e-12)
        z_c, v_c = _unpack(traj.sol.sol(t_c), n)
        crits.append(
            CriticalPoint(
                t=float(t_c),
                u=float(np.vdot(z_c, z_c).real),
                uddot=_uddot_closed_form(z_c, v_c, params),
            )
        )

    # revisit detection: distance in the chart norm to the initial state
    dist = np.linalg.norm(zs - state.z, axis=1) + np.linalg.norm(
        vs - state.v, axis=1
    )
    away = np.nonzero(dist > 10 * return_tol)[0]
    if away.size:
        k0 = away[0]
        near = np.nonzero(dist[k0:] < return_tol)[0]
        if near.size:
            return ClosedGeodesicReport(RETURNS, traj, crits)

    if traj.termination == HIT_CUTOFF:
        return ClosedGeodesicReport(HIT_CUTOFF, traj, crits)
    return ClosedGeodesicReport(ESCAPES, traj, crits)


def _dense_times(traj: Trajectory, per_step: int = 12) -> np.ndarray:
    """Refinement grid between the solver's own steps."""
    pieces = [
        np.linspace(traj.t[k], traj.t[k + 1], per_step, endpoint=False)
        for k in range(len(traj.t) - 1)
    ]
    pieces.append(traj.t[-1:])
    return np.concatenate(pieces)


# ---------------------------------------------------------------------------
# zero-section (Fubini-Study) flow
# ---------------------------------------------------------------------------

@dataclass
class FSTrajectory:
    """Geodesic on the zero section, integrated chartwise.

    ``chart`` holds the 1-based chart index valid at each sample; ``zeta``
    and ``dzeta`` are expressed in that chart.  ``period`` is the detected
    closing time, if any.
    """

    t: np.ndarray
    zeta: np.ndarray
    dzeta: np.ndarray
    chart: np.ndarray
    energy: np.ndarray
    period: Optional[float]


def fs_energy(zeta, dzeta, params: GeometryParams) -> float:
    """Energy in the zero-section metric ``a * g_FS``; chart independent."""
    g = params.a * fubini_study(zeta)
    v = np.atleast_1d(np.asarray(dzeta, dtype=complex))
    return float(np.einsum("m,mn,n->", v, g, np.conj(v)).real)


def _fs_rhs(t, y, m):
    zeta = y[:m] + 1j * y[m : 2 * m]
    v = y[2 * m : 3 * m] + 1j * y[3 * m :]
    ip = np.vdot(zeta, v)
    acc = 2.0 * ip * v / (1.0 + np.vdot(zeta, zeta).real)
    return np.concatenate([v.real, v.imag, acc.real, acc.imag])


def _fs_transition(zeta, v, i, j, slots):
    """Projective chart change on the base with velocity transport.

    ``slots`` are the 1-based slots of ``zeta`` in chart ``i``; returns the
    new ``(zeta', v', slots')`` in chart ``j``.
    """
    pos_j = slots.index(j)
    zj, vj = zeta[pos_j], v[pos_j]
    new_slots = [k for k in slots if k != j]
    new_slots.insert(0, i)
    new_slots.sort()
    nz = np.empty_like(zeta)
    nv = np.empty_like(v)
    for pos, k in enumerate(new_slots):
        if k == i:
            nz[pos] = 1.0 / zj
            nv[pos] = -vj / zj**2
        else:
            p = slots.index(k)
            nz[pos] = zeta[p] / zj
            nv[pos] = v[p] / zj - zeta[p] * vj / zj**2
    return nz, nv, new_slots


def zero_section_geodesic(
    zeta0,
    dzeta0,
    params: GeometryParams,
    t_end: Optional[float] = None,
    tol: float = 1e-12,
    detect_period: bool = True,
) -> FSTrajectory:
    """Integrate the Fubini-Study flow on the zero section, starting in the
    first affine chart, hopping charts when ``|zeta|`` grows large.

    The acceleration is the contraction of the rotationally symmetric
    connection with the round projective profile (the cubic coefficient of
    that profile vanishes identically, leaving ``2 <zeta,v> v/(1+|zeta|^2)``).
    Period detection refines the first simultaneous revisit of the initial
    state in the start chart; at unit speed in ``a * g_FS`` the closing time
    of every geodesic is ``pi sqrt(a)``.
    """
    zeta0 = np.atleast_1d(np.asarray(zeta0, dtype=complex))
    v0 = np.atleast_1d(np.asarray(dzeta0, dtype=complex))
    if not np.any(v0):
        raise DomainError("zero-section geodesic needs a nonzero direction")
    m = zeta0.size
    if m != params.n - 1:
        raise DomainError(
            f"base coordinates have dimension {m}, expected n-1={params.n - 1}"
        )
    e0 = fs_energy(zeta0, v0, params)
    if t_end is None:
        t_end = 4.0 * math.pi * math.sqrt(params.a) / math.sqrt(e0)

    chart = 1
    slots = list(range(2, params.n + 1))
    state = np.concatenate([zeta0.real, zeta0.imag, v0.real, v0.imag])
    t0 = 0.0
    left_start = False
    period = None

    ts_all, zs_all, vs_all, ch_all = [], [], [], []

    def escape(t, y, m):
        zz = y[:m] + 1j * y[m : 2 * m]
        return np.vdot(zz, zz).real - _CHART_ESCAPE_SQ

    escape.terminal = True
    escape.direction = 1

    while t0 < t_end and period is None:
        sol = solve_ivp(
            _fs_rhs,
            (t0, t_end),
            state,
            args=(m,),
            method="DOP853",
            rtol=tol,
            atol=tol * 1e-2,
            dense_output=True,
            events=[escape],
        )
        ts_all.append(sol.t)
        zs_all.append((sol.y[:m] + 1j * sol.y[m : 2 * m]).T)
        vs_all.append((sol.y[2 * m : 3 * m] + 1j * sol.y[3 * m :]).T)
        ch_all.append(np.full(sol.t.size, chart))

        if detect_period and chart == 1:
            hit = _find_return(sol, t0, zeta0, v0, m, left_start)
            if hit is not None:
                t_ret, was_away = hit
                if was_away:
                    period = t_ret
                    break
            left_start = left_start or _went_far(sol, zeta0, m)

        if sol.status == 1:  # chart boundary: hop to the slot of largest |zeta|
            y = sol.y_events[0][0]
            zz = y[:m] + 1j * y[m : 2 * m]
            vv = y[2 * m : 3 * m] + 1j * y[3 * m :]
            j = slots[int(np.argmax(np.abs(zz)))]
            zz, vv, new_slots = _fs_transition(zz, vv, chart, j, slots)
            chart, slots = j, new_slots
            state = np.concatenate([zz.real, zz.imag, vv.real, vv.imag])
            t0 = sol.t_events[0][0]
        else:
            break

    t = np.concatenate(ts_all)
    zeta = np.vstack(zs_all)
    dzeta = np.vstack(vs_all)
    chart_idx = np.concatenate(ch_all)
    es = np.array(
        [fs_energy(zk, vk, params) for zk, vk in zip(zeta, dzeta)]
    )
    return FSTrajectory(
        t=t, zeta=zeta, dzeta=dzeta, chart=chart_idx, energy=es, period=period
    )


def _went_far(sol, zeta0, m, radius: float = 0.3) -> bool:
    zz = (sol.y[:m] + 1j * sol.y[m : 2 * m]).T
    return bool((np.linalg.norm(zz - zeta0, axis=1) > radius).any())


def _find_return(sol, t0, zeta0, v0, m, left_start):
    """First refined local minimum of the distance to the initial state that
    is an actual revisit.  Returns ``(t, had_left_before)`` or None."""
    ts = np.linspace(t0, sol.t[-1], max(64, 24 * sol.t.size))
    ys = sol.sol(ts)
    zz = (ys[:m] + 1j * ys[m : 2 * m]).T
    vv = (ys[2 * m : 3 * m] + 1j * ys[3 * m :]).T
    dist = np.linalg.norm(zz - zeta0, axis=1)
    far = dist > 0.3
    # derivative of |zeta - zeta0|^2 along the flow
    dd = np.einsum("km,km->k", np.conj(zz - zeta0), vv).real
    sign = np.sign(dd)
    for k in np.nonzero((sign[:-1] < 0) & (sign[1:] > 0))[0]:
        was_away = left_start or far[: k + 1].any()
        if not was_away or dist[k] > 1e-2:
            continue
        f = lambda t: float(
            np.einsum(
                "m,m->",
                np.conj(sol.sol(t)[:m] + 1j * sol.sol(t)[m : 2 * m] - zeta0),
                sol.sol(t)[2 * m : 3 * m] + 1j * sol.sol(t)[3 * m :],
            ).real
        )
        t_c = brentq(f, ts[k], ts[k + 1], xtol=1e-14)
        y_c = sol.sol(t_c)
        z_c = y_c[:m] + 1j * y_c[m : 2 * m]
        v_c = y_c[2 * m : 3 * m] + 1j * y_c[3 * m :]
        if (
            np.linalg.norm(z_c - zeta0) < 1e-6
            and np.linalg.norm(v_c - v0) < 1e-6 * max(1.0, np.linalg.norm(v0))
        ):
            return float(t_c), True
    return None
