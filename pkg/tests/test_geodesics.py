import numpy as np
import pytest
from numpy.testing import assert_allclose

from cehgeom import (
    GeometryParams,
    GeodesicState,
    christoffel_ceh,
    classify_closed,
    energy,
    geodesic_rhs,
    integrate,
    metric,
    radial_arclength,
    radius_sq,
    zero_section_geodesic,
)
from cehgeom.geodesics import (
    CONSTANT,
    ESCAPES,
    HIT_CUTOFF,
    RETURNS,
    fs_energy,
)

from conftest import seeded_points


# --- right-hand side ---------------------------------------------------------

def test_rhs_orthogonal_velocity_no_acceleration(params2):
    z = np.array([1.0 + 0j, 0j])
    v = np.array([0j, 1.0 + 0j])  # <z, v> = 0
    assert np.abs(geodesic_rhs(z, v, params2)).max() == 0.0


def test_rhs_hand_example(params2):
    acc = geodesic_rhs(np.array([1.0, 0.0]), np.array([1.0, 0.0]), params2)
    assert_allclose(acc, np.array([-0.5, 0.0]), atol=1e-15)


def test_rhs_flat_at_infinity(params2):
    z = np.array([100.0 + 0j, 0j])  # u = 1e4 a
    v = np.array([1.0 + 0j, 0j])
    assert np.abs(geodesic_rhs(z, v, params2)).max() < 1e-8


def test_rhs_is_christoffel_contraction(params3):
    for z in seeded_points(5, 3, params3.a):
        v = seeded_points(1, 3, params3.a, seed=99)[0]
        gamma = christoffel_ceh(z, params3)
        expected = -np.einsum("lma,m,a->l", gamma, v, v)
        assert_allclose(geodesic_rhs(z, v, params3), expected, rtol=1e-12)


# --- integrate -----------------------------------------------------------------

def test_radial_ray_stays_radial(params2):
    z0 = np.array([0.6 + 0.8j, 0j]) * 1.3
    state = GeodesicState(z0, 0.5 * z0)  # v parallel to z, positive ratio
    traj = integrate(state, 5.0, params2, tol=1e-10)
    assert traj.termination == "completed"
    args = np.angle(traj.z[:, 0])
    assert np.abs(args - args[0]).max() < 1e-9
    assert np.abs(traj.z[:, 1]).max() < 1e-12


def test_energy_drift_random_data(params2):
    rngs = seeded_points(3, 2, 1.0, seed=5)
    vels = seeded_points(3, 2, 1.0, seed=6)
    for z0, v0 in zip(rngs, vels):
        traj = integrate(GeodesicState(z0, v0), 10.0, params2, tol=1e-10)
        assert traj.energy_drift() < 1e-8


def test_straight_line_at_infinity(params2):
    z0 = np.array([100.0 + 0j, 0j])
    v0 = np.array([0.3 + 0.1j, 0.7 - 0.2j])
    traj = integrate(GeodesicState(z0, v0), 1.0, params2, tol=1e-12)
    line = z0[None, :] + traj.t[:, None] * v0[None, :]
    assert np.abs(traj.z - line).max() < 1e-3


def test_inner_cutoff_termination(params2):
    # aim straight at the zero section
    z0 = np.array([1.0 + 0j, 0j])
    state = GeodesicState(z0, -5.0 * z0)
    traj = integrate(state, 10.0, params2, tol=1e-10)
    assert traj.termination == HIT_CUTOFF
    assert traj.u[-1] < 2e-8


def test_mu_n_phase_equivariance(params2):
    z0, v0 = seeded_points(1, 2, 1.0, seed=3)[0], seeded_points(1, 2, 1.0, seed=4)[0]
    t1 = integrate(GeodesicState(z0, v0), 3.0, params2, tol=1e-11)
    t2 = integrate(GeodesicState(-z0, -v0), 3.0, params2, tol=1e-11)  # -1 in mu_2
    # same times are not guaranteed (adaptive); compare at shared dense times
    ts = np.linspace(0.0, 3.0, 50)
    n = params2.n
    y1 = t1.sol.sol(ts)
    y2 = t2.sol.sol(ts)
    z1 = y1[:n] + 1j * y1[n : 2 * n]
    z2 = y2[:n] + 1j * y2[n : 2 * n]
    assert np.abs(z1 + z2).max() < 1e-8


def test_energy_value_definition(params2):
    z = np.array([1.0, 0.0])
    v = np.array([1.0, 2.0])
    g = metric(z, params2)
    expected = (g[0, 0] * 1 + g[1, 1] * 4).real
    assert energy(z, v, params2) == pytest.approx(expected, rel=1e-14)


def test_energy_real_positive_for_nonzero_velocity(params3):
    zs = seeded_points(10, 3, params3.a, seed=41)
    vs = seeded_points(10, 3, params3.a, seed=43)
    for z, v in zip(zs, vs):
        assert energy(z, v, params3) > 0.0


# --- radial arc length -----------------------------------------------------------

def test_arclength_zero(params2):
    arc = radial_arclength(0.0, params2)
    assert arc.psi == 0.0 and arc.distance == 0.0


def test_arclength_simpson_oracle(params2):
    # composite-Simpson refinement of the same integrand, n=2, a=1, u=1
    n = params2.n
    upper = 1.0
    for m in (400, 800):
        taus, h = np.linspace(0.0, upper, 2 * m + 1, retstep=True)
        vals = (taus**2 + 1.0) ** (-(n - 1) / (2.0 * n))
        simpson = h / 3 * (vals[0] + vals[-1] + 4 * vals[1::2].sum()
                           + 2 * vals[2:-1:2].sum())
        ref = simpson / n  # sqrt(a)/n prefactor with a = 1
        assert radial_arclength(1.0, params2).distance == pytest.approx(ref, abs=1e-10)


def test_arclength_euclidean_recovery(params2):
    # the distance to the zero section approaches the Euclidean radius;
    # the ratio converges like 1/sqrt(u), so psi/u itself needs a larger u
    u = 1e4
    assert radial_arclength(u, params2).distance / np.sqrt(u) == pytest.approx(
        1.0, abs=1e-2
    )
    u = 1e6
    assert radial_arclength(u, params2).psi / u == pytest.approx(1.0, abs=1e-2)


def test_arclength_derivative_identity(params3):
    # psi'(u) = (sqrt(psi)/sqrt(u)) (u^n/(a^n+u^n))^((n-1)/(2n))
    n, a = params3.n, params3.a
    for u in (0.5 * a, a, 3 * a):
        h = 1e-6 * u
        fd = (radial_arclength(u + h, params3).psi
              - radial_arclength(u - h, params3).psi) / (2 * h)
        arc = radial_arclength(u, params3)
        closed = arc.distance / np.sqrt(u) * (1 / (1 + (a / u) ** n)) ** (
            (n - 1) / (2 * n)
        )
        assert fd == pytest.approx(closed, rel=1e-8)


def test_radial_distance_grows_linearly(params2):
    # outgoing radial geodesic: sqrt(psi)(u(t)) = sqrt(psi)(u0) + sqrt(E) t
    z0 = np.array([1.2 + 0j, 0j])
    v0 = 0.8 * z0
    state = GeodesicState(z0, v0)
    e = energy(z0, v0, params2)
    traj = integrate(state, 4.0, params2, tol=1e-11)
    d0 = radial_arclength(radius_sq(z0), params2).distance
    for k in range(0, len(traj.t), max(1, len(traj.t) // 10)):
        d = radial_arclength(traj.u[k], params2).distance
        assert d == pytest.approx(d0 + np.sqrt(e) * traj.t[k], abs=1e-6)


# --- closed-geodesic dichotomy ----------------------------------------------------

def test_classify_constant(params2):
    state = GeodesicState(np.array([1.0, 0.0]), np.zeros(2))
    assert classify_closed(state, 10.0, params2).classification == CONSTANT


def test_classify_never_returns(params2):
    zs = seeded_points(20, 2, 1.0, seed=11)
    vs = seeded_points(20, 2, 1.0, seed=12)
    for z0, v0 in zip(zs, vs):
        rep = classify_closed(GeodesicState(z0, v0), 20.0, params2, tol=1e-9)
        assert rep.classification in (ESCAPES, HIT_CUTOFF)
        assert rep.classification != RETURNS


def test_uddot_certificate_at_critical_points(params2):
    # tangential launches turn around: every critical point certificate >= 0
    found = 0
    zs = seeded_points(10, 2, 1.0, seed=21)
    vs = seeded_points(10, 2, 1.0, seed=22)
    for z0, v0 in zip(zs, vs):
        rep = classify_closed(GeodesicState(z0, v0), 20.0, params2, tol=1e-9)
        for cp in rep.critical_points:
            assert cp.uddot >= -1e-9
            found += 1
    assert found > 0  # the sweep must actually exercise the certificate


# --- zero-section flow --------------------------------------------------------------

def test_zero_section_period_unit_scale(params2):
    v0 = np.array([1.0 + 0j])
    v0 = v0 / np.sqrt(fs_energy(np.zeros(1, dtype=complex), v0, params2))
    run = zero_section_geodesic(np.zeros(1, dtype=complex), v0, params2)
    assert run.period is not None
    assert run.period == pytest.approx(np.pi * np.sqrt(params2.a), abs=1e-6)


def test_zero_section_period_scales_with_sqrt_a():
    p = GeometryParams(2, 4.0)
    v0 = np.array([1.0 + 0j])
    v0 = v0 / np.sqrt(fs_energy(np.zeros(1, dtype=complex), v0, p))
    run = zero_section_geodesic(np.zeros(1, dtype=complex), v0, p)
    assert run.period == pytest.approx(2 * np.pi, abs=1e-6)


def test_zero_section_period_isotropic(params2):
    periods = []
    for phase in np.linspace(0.0, 2 * np.pi, 10, endpoint=False):
        v0 = np.array([np.exp(1j * phase)])
        v0 = v0 / np.sqrt(fs_energy(np.zeros(1, dtype=complex), v0, params2))
        run = zero_section_geodesic(np.zeros(1, dtype=complex), v0, params2)
        periods.append(run.period)
    assert np.ptp(periods) < 1e-6


def test_zero_section_energy_conserved_across_charts(params2):
    v0 = np.array([1.0 + 0j])
    run = zero_section_geodesic(np.zeros(1, dtype=complex), v0, params2)
    assert len(np.unique(run.chart)) > 1  # the run really hops charts
    assert np.abs(run.energy - run.energy[0]).max() < 1e-9


def test_zero_section_higher_dimension_period():
    p = GeometryParams(3, 1.0)
    v0 = np.array([0.6 + 0.2j, -0.3 + 0.7j])
    v0 = v0 / np.sqrt(fs_energy(np.zeros(2, dtype=complex), v0, p))
    run = zero_section_geodesic(np.zeros(2, dtype=complex), v0, p)
    assert run.period == pytest.approx(np.pi, abs=1e-6)


def test_zero_section_requires_direction(params2):
    with pytest.raises(Exception):
        zero_section_geodesic(np.zeros(1, dtype=complex), np.zeros(1), params2)
