"""Acceptance suite: one test per criterion, each at its stated tolerance,
printing a pass line when it holds."""

import math
import time

import numpy as np
import pytest

from infogeo.cli import EXIT_OK, main as cli_main
from infogeo.geodesics import (
    GeodesicError,
    isonormal_geodesic_problem,
    solve_geodesic,
    time_of_flight,
)
from infogeo.rgauss import (
    generalized_mahalanobis,
    generic_mahalanobis,
    rgauss_geodesic,
    rgauss_geodesic_problem,
    rgauss_log_density,
    tabulate_psi,
    tabulated_model,
)
from infogeo.spd import affine_distance, affine_metric, derham_split
from infogeo.specfun import bessel_i
from infogeo.vmf import (
    VmfModel,
    sample,
    vmf_beta_sq,
    vmf_curvature_profile,
    vmf_fisher_metric,
    vmf_geodesic,
    vmf_log_density,
    vmf_mean_resultant,
    vmf_metric_matrix,
    vmf_psi_pp,
)

from conftest import random_invertible, random_rotation, random_spd, random_symmetric
from test_geodesics import hyperbolic_oracle
from test_specfun import series_oracle

TABLE1 = {2: -0.50, 3: -0.25, 4: -0.16, 5: -0.12, 6: -0.10, 7: -0.08, 8: -0.07}


@pytest.fixture(scope="module")
def p2_model():
    return tabulated_model(2, samples=100_000, seed=0)


def report(criterion, text):
    print(f"ACCEPTANCE {criterion}: PASS - {text}")


def test_criterion_01_table1_reproduction(tmp_path):
    out = tmp_path / "table1.csv"
    start = time.monotonic()
    code = cli_main(["table1", "--out", str(out), "--no-plot"])
    elapsed = time.monotonic() - start
    assert code == EXIT_OK
    rows = [line.split(",") for line in out.read_text().strip().split("\n")[1:]]
    assert len(rows) == 7
    for row in rows:
        n = int(row[0])
        assert float(row[1]) == pytest.approx(TABLE1[n], abs=0.01), f"Ks_inf at n={n}"
        assert float(row[2]) == pytest.approx(TABLE1[n], abs=0.01), f"Kr_inf at n={n}"
        assert float(row[3]) <= 0.01
    assert elapsed <= 60.0
    report(1, f"curvature limits for n=2..8 within 0.01 in {elapsed:.1f}s")


def test_criterion_02_negativity_sweep():
    grid = np.geomspace(0.05, 200.0, 100)
    for n in range(2, 9):
        profile = vmf_curvature_profile(VmfModel(n), grid)
        assert np.all(profile.k_surface <= 0.0), f"surface curvature positive at n={n}"
        assert np.all(profile.k_radial <= 0.0), f"radial curvature positive at n={n}"
    report(2, "K^s, K^r <= 0 on the 100-point grid for n=2..8")


def test_criterion_03_vmf_small_eta_limits():
    for n in range(2, 9):
        model = VmfModel(n)
        assert abs(vmf_psi_pp(model, 1e-4) - 1.0 / n) <= 1e-8
        assert abs(vmf_beta_sq(model, 1e-4) / 1e-8 - 1.0 / n) <= 1e-6
        u = np.linspace(1.0, 2.0, n)
        assert vmf_fisher_metric(model, np.zeros(n), u) == float(np.dot(u, u)) / n
    report(3, "psi'' -> 1/n, beta^2/eta^2 -> 1/n, exact metric at the origin")


def test_criterion_04_vmf_asymptotics():
    for n in range(2, 9):
        model = VmfModel(n)
        for eta in (50.0, 100.0, 200.0):
            scaled = vmf_psi_pp(model, eta) * 2.0 * eta**2 / (n - 1)
            assert 1.0 - 5.0 / eta <= scaled <= 1.0 + 5.0 / eta
    report(4, "psi'' matches (n-1)/(2 eta^2) within the O(1/eta) band")


def test_criterion_05_bessel_kernel():
    for nu in (0.0, 0.5, 1.0, 1.5, 3.0):
        for x in (0.1, 0.7, 1.0, 2.3, 3.6, 5.0):
            assert bessel_i(nu, x) == pytest.approx(series_oracle(nu, x), rel=1e-10)
    for a in (1.0, 1.5, 2.0, 3.0):
        for x in np.geomspace(0.1, 50.0, 30):
            below, mid, above = bessel_i(a - 1, x), bessel_i(a, x), bessel_i(a + 1, x)
            assert abs(below - above - (2.0 * a / x) * mid) <= 1e-10 * below
    for a in (0.5, 1.0, 2.0):
        for x in (0.5, 2.0, 8.0, 30.0):
            h = 1e-5 * max(1.0, x)
            lhs = ((x + h) ** (-a) * bessel_i(a, x + h) - (x - h) ** (-a) * bessel_i(a, x - h)) / (2 * h)
            rhs = x ** (-a) * bessel_i(a + 1, x)
            assert lhs == pytest.approx(rhs, rel=1e-6)
    report(5, "series oracle, recurrence and derivative identities hold")


def test_criterion_06_fisher_sampling_oracle():
    model = VmfModel(3)
    rng = np.random.default_rng(614)
    xbar = np.array([1.0, 0.0, 0.0])
    for eta in (0.5, 2.0, 8.0):
        z = eta * xbar
        xs = sample(model, z, 10**6, rng)
        scores = xs - vmf_mean_resultant(model, eta) * xbar[None, :]
        products = scores[:, :, None] * scores[:, None, :]
        estimate = products.mean(axis=0)
        stderr = products.std(axis=0, ddof=1) / math.sqrt(xs.shape[0])
        reference = vmf_metric_matrix(model, z)
        assert np.all(np.abs(estimate - reference) <= 3.0 * stderr + 1e-12), f"eta={eta}"
    report(6, "1e6-sample score outer product matches the metric blockwise")


def test_criterion_07_geodesic_conservation(p2_model):
    rng = np.random.default_rng(777)
    model = VmfModel(3)
    for _ in range(20):
        z0 = rng.standard_normal(3)
        z0 *= rng.uniform(0.5, 3.0) / np.linalg.norm(z0)
        u0 = rng.standard_normal(3)
        geo = vmf_geodesic(model, z0, u0, 1.0, steps=200)
        assert geo.path.energy_drift <= 1e-6
        assert all(drift <= 1e-6 for drift in geo.path.conserved_drift)
        back = vmf_geodesic(model, geo.z[-1], -geo.z_dot[-1], 1.0, steps=200)
        assert np.linalg.norm(back.z[-1] - z0) <= 1e-7
    for _ in range(20):
        x = random_spd(rng, 2, eps=0.1)
        u = random_symmetric(rng, 2, scale=0.4)
        u_sigma = float(rng.uniform(-0.3, 0.3))
        geo = rgauss_geodesic(p2_model, x, 1.0, u_sigma, u, 1.0, steps=200)
        assert geo.path.energy_drift <= 1e-6
        assert all(drift <= 1e-6 for drift in geo.path.conserved_drift)
        back = rgauss_geodesic(
            p2_model,
            geo.points[-1],
            float(geo.sigma[-1]),
            -float(geo.path.sigma_dot[-1]),
            -geo.velocities[-1],
            1.0,
            steps=200,
        )
        assert abs(back.sigma[-1] - 1.0) <= 1e-7
        assert affine_distance(back.points[-1], x) <= 1e-7
    report(7, "E and C_q drift <= 1e-6, reversal closure <= 1e-7, 20 cases/model")


def test_criterion_08_hyperbolic_geodesic_oracle():
    rng = np.random.default_rng(88)
    d = 2
    for _ in range(3):
        x0 = rng.standard_normal(d)
        sigma0 = float(rng.uniform(0.6, 1.8))
        u_sigma = float(rng.uniform(-0.5, 0.5))
        u = rng.standard_normal(d) * 0.7
        problem = isonormal_geodesic_problem(d, x0, sigma0, u_sigma, u)
        path = solve_geodesic(problem, 1.0, steps=10)
        for i in range(1, 11):
            x_cf, sigma_cf = hyperbolic_oracle(d, x0, sigma0, u_sigma, u, float(path.t[i]))
            assert abs(path.sigma[i] - sigma_cf) <= 1e-6 * sigma_cf
            assert np.abs(path.base_points[i] - x_cf).max() <= 1e-6
    report(8, "half-space closed form matched at 10 checkpoints")


def test_criterion_09_quadrature_ode_agreement(p2_model):
    rng = np.random.default_rng(99)
    saw_turning = False
    for case in range(10):
        x = random_spd(rng, 2, eps=0.1)
        scale = 0.5 if case == 9 else 0.3
        u = random_symmetric(rng, 2, scale=scale)
        u_sigma = float(rng.uniform(0.15, 0.35))
        problem = rgauss_geodesic_problem(p2_model, x, 1.0, u_sigma, u)
        path = solve_geodesic(problem, 2.0, steps=400)
        i_top = int(np.argmax(path.sigma))
        if 0 < i_top < 400:
            saw_turning = True
            with pytest.raises(GeodesicError):
                time_of_flight(problem, float(path.sigma[i_top]) * 1.5)
        idx = max(1, int(i_top * 0.6)) if 0 < i_top < 400 else 200
        target = float(path.sigma[idx])
        result = time_of_flight(problem, target)
        assert not result.divergent
        assert result.time == pytest.approx(float(path.t[idx]), rel=1e-6)
    assert saw_turning, "ensemble should include a turning-point case"
    report(9, "quadrature and ODE arrival times agree to 1e-6 on 10 P_2 cases")


def test_criterion_10_spd_geometry(p2_model):
    rng = np.random.default_rng(1010)
    x, y = random_spd(rng, 2, eps=0.1), random_spd(rng, 2, eps=0.1)
    d_affine = affine_distance(x, y)
    d_maha = generalized_mahalanobis(p2_model, x, y, sigma=0.8)
    for _ in range(100):
        g = random_invertible(rng, 2)
        gx, gy = g @ x @ g.T, g @ y @ g.T
        assert affine_distance(gx, gy) == pytest.approx(d_affine, rel=1e-9)
        assert generalized_mahalanobis(p2_model, gx, gy, sigma=0.8) == pytest.approx(
            d_maha, rel=1e-9
        )
    for n in (2, 3, 5):
        for _ in range(100):
            a, b = random_spd(rng, n), random_spd(rng, n)
            sa = derham_split(a, np.zeros((n, n)))
            sb = derham_split(b, np.zeros((n, n)))
            lhs = affine_distance(a, b) ** 2
            rhs = (sa.tau - sb.tau) ** 2 / n + affine_distance(sa.s, sb.s) ** 2
            assert abs(lhs - rhs) <= 1e-9 * max(1.0, lhs)
    for _ in range(100):
        a = random_spd(rng, 3)
        split = derham_split(a, random_symmetric(rng, 3))
        n1 = affine_metric(a, split.u1, split.u1)
        n2 = affine_metric(a, split.u2, split.u2)
        cross = affine_metric(a, split.u1, split.u2)
        assert abs(cross) <= 1e-10 * max(1.0, math.sqrt(n1 * n2))
    report(10, "invariance 1e-9, distance split 1e-9, orthogonality 1e-10")


def test_criterion_11_psi_tabulation(tmp_path):
    table1 = tabulate_psi(1, samples=100_000, seed=0)
    exact = -1.0 / (2.0 * table1.eta)
    assert np.all(np.abs(table1.psi_p - exact) <= 3.0 * table1.stderr_psi_p)
    assert np.all(table1.psi_pp > 0.0)
    for n in (2, 3):
        a = tabulate_psi(n, samples=100_000, seed=1)
        b = tabulate_psi(n, samples=100_000, seed=2)
        assert np.all(a.psi_pp > 0.0) and np.all(b.psi_pp > 0.0)
        rel = np.abs(a.psi_p - b.psi_p) / np.abs(a.psi_p)
        assert rel.max() <= 0.01, f"seed disagreement {rel.max():.2%} at n={n}"
    again = tabulate_psi(2, samples=100_000, seed=1)
    repeat = tabulate_psi(2, samples=100_000, seed=1)
    pa, pb = tmp_path / "a.csv", tmp_path / "b.csv"
    again.to_csv(pa)
    repeat.to_csv(pb)
    assert pa.read_bytes() == pb.read_bytes()
    report(11, "n=1 closed form in 3 SE, convexity, 1% seed stability, determinism")


def test_criterion_12_classical_mahalanobis():
    x = np.array([0.0, 0.0])
    y = np.array([2.0, 0.0])
    sigma = 2.0
    value = generic_mahalanobis(1.0 / sigma, float(np.linalg.norm(x - y)))
    assert value == (1.0 / sigma) * float(np.linalg.norm(x - y))
    assert value == 1.0
    report(12, "isotropic normal mode returns |x - y| / sigma exactly")


def test_criterion_13_density_invariance(p2_model):
    rng = np.random.default_rng(1313)
    model = VmfModel(4)
    z = rng.standard_normal(4) * 1.5
    x = rng.standard_normal(4)
    x /= np.linalg.norm(x)
    base = vmf_log_density(model, x, z)
    for _ in range(100):
        rot = random_rotation(rng, 4)
        assert abs(vmf_log_density(model, rot @ x, rot @ z) - base) <= 1e-12 * max(
            1.0, abs(base)
        )
    p3_model = tabulated_model(3, samples=20_000, seed=4)
    for model_n, n in ((p2_model, 2), (p3_model, 3)):
        xs, xbar = random_spd(rng, n), random_spd(rng, n)
        ref = rgauss_log_density(model_n, xs, xbar, sigma=0.9)
        for _ in range(100):
            g = random_invertible(rng, n)
            moved = rgauss_log_density(model_n, g @ xs @ g.T, g @ xbar @ g.T, sigma=0.9)
            assert abs(moved - ref) <= 1e-9 * max(1.0, abs(ref))
    report(13, "rotation invariance 1e-12 (sphere), congruence invariance 1e-9 (SPD)")
