"""Geodesic solver: vertical laws, the hyperbolic closed-form oracle,
conservation, quadrature agreement, time reversal, escapes."""

import math

import numpy as np
import pytest

from infogeo.geodesics import (
    GeodesicError,
    RadialTable,
    conserved_quantities,
    geodesic_csv,
    isonormal_geodesic_problem,
    solve_geodesic,
    time_of_flight,
)
from infogeo.rgauss import rgauss_geodesic, rgauss_geodesic_problem, tabulated_model
from infogeo.vmf import VmfModel, vmf_fisher_metric, vmf_geodesic, vmf_geodesic_problem
from infogeo.warped import isotropic_normal_profile, vertical_distance

from conftest import random_spd, random_symmetric


@pytest.fixture(scope="module")
def p2_model():
    return tabulated_model(2, samples=40_000, seed=11)


def hyperbolic_oracle(d, x0, sigma0, u_sigma, u, t):
    """Closed-form Poincare half-space geodesic for the isotropic normal
    metric (2d/sigma^2) dsigma^2 + |dx|^2 / sigma^2.

    With y = x / sqrt(2d) along the direction of u, the metric is 2d times
    the hyperbolic metric of the (y, sigma) half plane, whose unit-speed
    geodesics are y = yc + R tanh(s), sigma = R / cosh(s).
    """
    c = math.sqrt(2.0 * d)
    norm_u = float(np.linalg.norm(u))
    if norm_u == 0.0:
        # vertical: r = c log sigma affine in t
        rate = c / sigma0 * u_sigma / c  # dr/dt / c = d(log sigma)/dt
        return x0.copy(), sigma0 * math.exp(rate * t)
    direction = u / norm_u
    energy = (c / sigma0) ** 2 * u_sigma**2 + (norm_u / sigma0) ** 2
    s_rate = math.sqrt(energy) / c  # arclength rate of the unit-speed chart
    tanh_s0 = -u_sigma * c / (sigma0 * c * s_rate)
    s0 = math.atanh(tanh_s0)
    radius = sigma0 * math.cosh(s0)
    yc = -radius * math.tanh(s0)
    s = s0 + s_rate * t
    sigma = radius / math.cosh(s)
    y = yc + radius * math.tanh(s)
    return x0 + y * c * direction, sigma


def test_vertical_geodesic_affine():
    problem = isonormal_geodesic_problem(2, np.zeros(2), 1.0, 0.5, np.zeros(2))
    path = solve_geodesic(problem, 1.0, steps=100)
    # r(t) = t * alpha(sigma0) u_sigma, base point constant
    expected = path.t * (2.0 / 1.0) * 0.5
    assert np.abs(path.r - expected).max() <= 1e-7
    assert all(np.array_equal(p, path.base_points[0]) for p in path.base_points)
    assert path.energy == pytest.approx(1.0)
    assert path.conserved == (0.0,)


def test_vertical_length_equals_vertical_distance():
    profile = isotropic_normal_profile(3)
    problem = isonormal_geodesic_problem(3, np.zeros(3), 1.0, 0.7, np.zeros(3))
    path = solve_geodesic(problem, 1.0, steps=100)
    length = abs(path.r[-1] - path.r[0])
    assert length == pytest.approx(
        vertical_distance(profile, 1.0, float(path.sigma[-1])), rel=1e-9
    )


def test_hyperbolic_oracle(rng):
    # 10 checkpoints against the closed-form half-space geodesic
    d = 2
    x0 = np.array([0.3, -0.2])
    sigma0, u_sigma = 1.2, 0.4
    u = np.array([0.8, 0.1])
    problem = isonormal_geodesic_problem(d, x0, sigma0, u_sigma, u)
    path = solve_geodesic(problem, 1.0, steps=10)
    for i in range(1, 11):
        x_cf, sigma_cf = hyperbolic_oracle(d, x0, sigma0, u_sigma, u, float(path.t[i]))
        assert path.sigma[i] == pytest.approx(sigma_cf, rel=1e-6)
        assert np.abs(path.base_points[i] - x_cf).max() <= 1e-6


def test_hyperbolic_oracle_random(rng):
    d = 3
    for _ in range(5):
        x0 = rng.standard_normal(d)
        sigma0 = float(rng.uniform(0.5, 2.0))
        u_sigma = float(rng.uniform(-0.5, 0.5))
        u = rng.standard_normal(d) * 0.6
        problem = isonormal_geodesic_problem(d, x0, sigma0, u_sigma, u)
        path = solve_geodesic(problem, 1.0, steps=5)
        for i in (2, 5):
            x_cf, sigma_cf = hyperbolic_oracle(d, x0, sigma0, u_sigma, u, float(path.t[i]))
            assert path.sigma[i] == pytest.approx(sigma_cf, rel=1e-6)
            assert np.abs(path.base_points[i] - x_cf).max() <= 1e-6


def test_conservation_vmf(rng):
    model = VmfModel(3)
    for _ in range(5):
        z0 = rng.standard_normal(3)
        z0 *= rng.uniform(0.5, 3.0) / np.linalg.norm(z0)
        u0 = rng.standard_normal(3)
        geo = vmf_geodesic(model, z0, u0, 1.0, steps=200)
        assert geo.path.energy_drift <= 1e-6
        assert all(drift <= 1e-6 for drift in geo.path.conserved_drift)
        # Fisher speed is constant along the geodesic
        speeds = [
            vmf_fisher_metric(model, geo.z[i], geo.z_dot[i]) for i in (0, 50, 100, 200)
        ]
        assert max(speeds) - min(speeds) <= 1e-8 * speeds[0]


def test_conservation_rgauss(p2_model, rng):
    for _ in range(5):
        x = random_spd(rng, 2, eps=0.1)
        u = random_symmetric(rng, 2, scale=0.4)
        geo = rgauss_geodesic(p2_model, x, 1.0, float(rng.uniform(-0.3, 0.3)), u, 1.0)
        assert geo.path.energy_drift <= 1e-6
        assert all(drift <= 1e-6 for drift in geo.path.conserved_drift)


def test_time_reversal_vmf(rng):
    model = VmfModel(3)
    z0 = np.array([1.2, -0.4, 0.7])
    u0 = np.array([0.5, 0.9, -0.2])
    forward = vmf_geodesic(model, z0, u0, 1.0, steps=200)
    backward = vmf_geodesic(model, forward.z[-1], -forward.z_dot[-1], 1.0, steps=200)
    assert np.linalg.norm(backward.z[-1] - z0) <= 1e-7
    assert np.linalg.norm(backward.z_dot[-1] + u0) <= 1e-7


def test_time_reversal_rgauss(p2_model, rng):
    from infogeo.spd import affine_distance

    x = random_spd(rng, 2, eps=0.1)
    u = random_symmetric(rng, 2, scale=0.4)
    forward = rgauss_geodesic(p2_model, x, 1.0, 0.25, u, 1.0)
    backward = rgauss_geodesic(
        p2_model,
        forward.points[-1],
        float(forward.sigma[-1]),
        -float(forward.path.sigma_dot[-1]),
        -forward.velocities[-1],
        1.0,
    )
    assert abs(backward.sigma[-1] - 1.0) <= 1e-7
    assert affine_distance(backward.points[-1], x) <= 1e-7


def test_geodesic_equation_residual(p2_model, rng):
    # finite-difference d^2r/dt^2 matches sum_q beta_q dr beta_q Q(xdot_q, xdot_q)
    x = random_spd(rng, 2, eps=0.1)
    u = random_symmetric(rng, 2, scale=0.4)
    problem = rgauss_geodesic_problem(p2_model, x, 1.0, 0.2, u)
    path = solve_geodesic(problem, 1.0, steps=400)
    profile = problem.profile
    dt = path.t[1] - path.t[0]
    r_ddot = (path.r[2:] - 2.0 * path.r[1:-1] + path.r[:-2]) / dt**2
    expected = []
    for i in range(1, len(path.t) - 1):
        s = float(path.sigma[i])
        alpha = profile.alpha(s)
        total = 0.0
        for k, (beta, q) in enumerate(zip(profile.betas, problem.block_norms_sq)):
            fdot = beta(problem.sigma0) ** 2 / beta(s) ** 2
            dbeta = profile.dbetas[k](s)
            total += beta(s) * (dbeta / alpha) * fdot**2 * q
        expected.append(total)
    expected = np.array(expected)
    scale = np.abs(expected).max()
    # interior only; the five-point r table and FD add their own noise
    mask = slice(20, -20)
    assert np.abs(r_ddot[mask] - expected[mask]).max() <= 1e-4 * scale


def test_tof_matches_ode_arrival(p2_model, rng):
    for _ in range(6):
        x = random_spd(rng, 2, eps=0.1)
        u = random_symmetric(rng, 2, scale=0.3)
        u_sigma = float(rng.uniform(0.15, 0.4))
        problem = rgauss_geodesic_problem(p2_model, x, 1.0, u_sigma, u)
        path = solve_geodesic(problem, 1.0, steps=200)
        # target on the first monotone leg (before any turning point)
        idx = max(1, int(np.argmax(path.sigma) * 0.6)) if np.argmax(path.sigma) < 200 else 120
        result = time_of_flight(problem, float(path.sigma[idx]))
        assert not result.divergent
        assert result.time == pytest.approx(float(path.t[idx]), rel=1e-6)


def test_tof_turning_point(p2_model, rng):
    # upward launch with enough base motion turns around; the quadrature
    # agrees with the ODE both on the rising leg and at the turning scale
    from scipy.interpolate import CubicSpline
    from scipy.optimize import brentq

    x = random_spd(rng, 2, eps=0.1)
    u = random_symmetric(rng, 2, scale=0.5)
    problem = rgauss_geodesic_problem(p2_model, x, 1.0, 0.25, u)
    path = solve_geodesic(problem, 3.0, steps=3000)
    i_top = int(np.argmax(path.sigma))
    assert 0 < i_top < 3000  # the path really turns
    top = float(path.sigma[i_top])
    t_top = float(path.t[i_top])

    # rising-leg agreement at strict tolerance
    target = 1.0 + 0.95 * (top - 1.0)
    spline = CubicSpline(path.t[: i_top + 1], path.sigma[: i_top + 1])
    t_cross = brentq(lambda t: float(spline(t)) - target, 0.0, t_top)
    result = time_of_flight(problem, target)
    assert result.time == pytest.approx(t_cross, rel=1e-6)

    # time to the turning point itself via the square-root substitution
    at_top = time_of_flight(problem, top)
    assert at_top.turning_sigma is not None
    assert at_top.time == pytest.approx(t_top, rel=1e-3)

    with pytest.raises(GeodesicError):
        time_of_flight(problem, top * 1.5)
    with pytest.raises(GeodesicError):
        time_of_flight(problem, 0.5)  # opposite to the initial direction


def test_tof_vertical_isonormal_divergent():
    problem = isonormal_geodesic_problem(2, np.zeros(2), 1.0, 1.0, np.zeros(2))
    up = time_of_flight(problem, math.inf)
    assert up.divergent and up.time == math.inf
    down_problem = isonormal_geodesic_problem(2, np.zeros(2), 1.0, -1.0, np.zeros(2))
    down = time_of_flight(down_problem, 0.0)
    assert down.divergent and down.time == math.inf


def test_tof_vmf_vertical_origin_finite():
    # the 0-end vertical integral converges for the sphere model
    model = VmfModel(3)
    problem = vmf_geodesic_problem(model, np.array([1.0, 0.0, 0.0]), np.array([-1.0, 0.0, 0.0]))
    result = time_of_flight(problem, 0.0)
    assert not result.divergent
    # r(1) - r(0) = int_0^1 sqrt(psi'') and unit initial speed sqrt(E) = alpha(1)
    from infogeo.vmf import vmf_profile, vmf_psi_pp

    profile = vmf_profile(model)
    expected = vertical_distance(profile, 1e-12, 1.0) / (
        math.sqrt(vmf_psi_pp(model, 1.0)) * 1.0
    )
    assert result.time == pytest.approx(expected, rel=1e-6)


def test_vmf_vertical_through_origin():
    model = VmfModel(3)
    geo = vmf_geodesic(model, np.array([0.5, 0.0, 0.0]), np.array([-1.0, 0.0, 0.0]), 2.0, steps=200)
    # passes through the origin and emerges on the opposite ray
    assert geo.eta.min() <= 0.02
    assert geo.z[0][0] > 0.0 and geo.z[-1][0] < 0.0
    assert abs(geo.z[-1][1]) == 0.0 and abs(geo.z[-1][2]) == 0.0
    # radial coordinate is affine in t throughout (vertical law)
    from infogeo.vmf import vmf_profile

    profile = vmf_profile(model)
    rho = np.array(
        [
            math.copysign(vertical_distance(profile, 1e-12, float(e)), z[0])
            for e, z in zip(geo.eta, geo.z)
        ]
    )
    slope = (rho[-1] - rho[0]) / (geo.t[-1] - geo.t[0])
    assert np.abs(rho - (rho[0] + slope * geo.t)).max() <= 1e-6


def test_origin_start_is_straight_line():
    model = VmfModel(4)
    u0 = np.array([0.3, -0.4, 0.0, 0.5])
    geo = vmf_geodesic(model, np.zeros(4), u0, 1.5, steps=60)
    direction = u0 / np.linalg.norm(u0)
    for i in (10, 30, 60):
        z = geo.z[i]
        assert np.linalg.norm(z - (z @ direction) * direction) <= 1e-10
    assert geo.eta[-1] > 0.0


def test_escape_reporting(p2_model, rng):
    # scale leaving the tabulated range terminates with an escape record
    x = np.eye(2)
    problem = rgauss_geodesic_problem(p2_model, x, 4.5, 2.0, np.zeros((2, 2)))
    path = solve_geodesic(problem, 5.0, steps=50)
    assert path.escape is not None
    assert path.escape.time < 5.0
    assert "domain" in path.escape.reason
    assert path.t[-1] == pytest.approx(path.escape.time)


def test_vertical_escape_at_scale_ceiling():
    # the vertical distance grows like log(eta), so an ascending vertical
    # geodesic reaches the 1e8 threshold in moderate time
    model = VmfModel(3)
    geo = vmf_geodesic(model, np.array([1.0, 0.0, 0.0]), np.array([1.0, 0.0, 0.0]), 40.0, steps=50)
    assert geo.escape is not None
    assert geo.eta[-1] == pytest.approx(1e8, rel=1e-6)
    assert geo.t[-1] < 40.0


def test_energy_identity_analytic_profiles(rng):
    # rdot^2 + V = E within 1e-8 along paths of analytically-differentiable
    # profiles (the tabulated SPD model is held to 1e-6 elsewhere)
    problem = isonormal_geodesic_problem(
        3, rng.standard_normal(3), 1.1, 0.3, 0.5 * rng.standard_normal(3)
    )
    assert solve_geodesic(problem, 1.0, steps=100).energy_drift <= 1e-8
    model = VmfModel(3)
    geo = vmf_geodesic(model, np.array([0.8, 0.3, -0.2]), np.array([0.4, -0.7, 0.1]), 1.0)
    assert geo.path.energy_drift <= 1e-8


def test_escape_at_scale_floor():
    # vertical descent on the sphere model reaches the 1e-8 floor in
    # finite time (the 0-end integral converges)
    model = VmfModel(3)
    problem = vmf_geodesic_problem(model, np.array([0.3, 0.0, 0.0]), np.array([-2.0, 0.0, 0.0]))
    path = solve_geodesic(problem, 10.0, steps=40)
    assert path.escape is not None
    assert path.sigma[-1] <= 1.1e-8


def test_conserved_quantities_values():
    problem = isonormal_geodesic_problem(2, np.zeros(2), 2.0, 0.3, np.array([0.6, 0.0]))
    energy, conserved = conserved_quantities(problem)
    # E = (alpha u_sigma)^2 + beta^2 |u|^2, C = beta^4 |u|^2
    assert energy == pytest.approx((1.0 * 0.3) ** 2 + 0.36 / 4.0)
    assert conserved[0] == pytest.approx(0.36 / 16.0)
    # E >= V(sigma0) = C / beta^2(sigma0), equality iff u_sigma = 0
    assert energy >= conserved[0] / 0.25 - 1e-12
    vertical = isonormal_geodesic_problem(2, np.zeros(2), 2.0, 0.3, np.zeros(2))
    e_vert, c_vert = conserved_quantities(vertical)
    assert c_vert == (0.0,)
    assert e_vert == pytest.approx(0.09)


def test_radial_table_inverse():
    profile = isotropic_normal_profile(2)
    table = RadialTable(profile, 0.5, 4.0)
    for sigma in (0.6, 1.0, 2.5, 3.9):
        assert table.inverse(table(sigma)) == pytest.approx(sigma, rel=1e-9)


def test_geodesic_csv_format():
    problem = isonormal_geodesic_problem(2, np.zeros(2), 1.0, 0.2, np.array([0.5, 0.0]))
    path = solve_geodesic(problem, 0.5, steps=4)
    text = geodesic_csv(path, flatten=lambda p: p, labels=["x1", "x2"])
    lines = text.strip().split("\n")
    assert lines[0] == "t,sigma,r,x1,x2"
    assert len(lines) == 6
    assert len(lines[1].split(",")) == 5
