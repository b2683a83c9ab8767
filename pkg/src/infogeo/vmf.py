"""Location-scale model on the unit sphere S^{n-1} (von Mises-Fisher).

The density with location xbar and natural parameter eta >= 0 is

    p(x | xbar, eta) = exp(eta <x, xbar> - psi(eta)),
    psi(eta) = (n/2) log(2 pi) + log(eta^{1 - n/2} I_{n/2 - 1}(eta)),

with eta = 0 the uniform distribution. The parameter space is identified
with R^n through z = eta * xbar. The Fisher metric is warped:

    I_z(U, U) = psi''(eta) u_eta^2 + beta^2(eta) |u|^2,

and both coefficients reduce to combinations of Bessel ratios:

    psi''(eta) = 1/n + (n-1)/n * I_{nu+1}/I_{nu-1} - (I_nu / I_{nu-1})^2
    beta^2(eta) = (eta^2 / n) (1 - I_{nu+1}/I_{nu-1}) = eta * I_nu/I_{nu-1}

with nu = n/2. (The equivalence of the two beta^2 forms is the Bessel
recurrence; the product form is the numerically stable one. It also
matches the moment identity beta^2 = eta^2/(n-1) * E(1 - <x,xbar>^2),
which the sampling tests check.)
"""

from __future__ import annotations

import dataclasses
import math
from typing import Optional

import numpy as np

from .specfun import bessel_ratio_pair, log_bessel_i
from .warped import WarpProfile, curvatures

# below this eta the Bessel-ratio formulas are evaluated through their
# power-series developments (the ratio forms are 0/0 at the origin)
_SERIES_ETA = 1e-3

# above this eta (scaled by n) psi'' switches to its asymptotic series:
# the direct three-term combination cancels to O(1/eta^2) and loses all
# precision once 2 eta^2/(n-1) approaches 1/eps
_ASY_ETA = 1e4

# treat |z| below this as the uniform distribution z = 0
_ZERO_ETA = 1e-12

_MAX_N = 64


@dataclasses.dataclass(frozen=True)
class VmfModel:
    """The model on S^{n-1}, n >= 2; nu = n/2."""

    n: int

    def __post_init__(self):
        if not 2 <= self.n <= _MAX_N:
            raise ValueError(f"ambient dimension must be in [2, {_MAX_N}], got {self.n}")

    @property
    def nu(self) -> float:
        return self.n / 2.0

    @property
    def log_uniform_density(self) -> float:
        # -log area(S^{n-1}) = -log(2 pi^{n/2} / Gamma(n/2))
        return -(math.log(2.0) + self.nu * math.log(math.pi) - math.lgamma(self.nu))


def _ratios_series(nu: float, eta: float) -> tuple[float, float]:
    """(I_nu/I_{nu-1}, I_{nu+1}/I_{nu-1}) from three-term power series;
    exact to roundoff for eta < ~0.01."""
    q = (eta / 2.0) ** 2
    low = 1.0 + q / nu + q * q / (2.0 * nu * (nu + 1.0))
    mid = 1.0 + q / (nu + 1.0) + q * q / (2.0 * (nu + 1.0) * (nu + 2.0))
    high = 1.0 + q / (nu + 2.0) + q * q / (2.0 * (nu + 2.0) * (nu + 3.0))
    r1 = (eta / (2.0 * nu)) * mid / low
    r2 = (q / (nu * (nu + 1.0))) * high / low
    return r1, r2


def _ratios(model: VmfModel, eta: float) -> tuple[float, float]:
    if eta < _SERIES_ETA:
        return _ratios_series(model.nu, eta)
    return bessel_ratio_pair(model.nu, eta)


def _psi_pp_asymptotic(nu: float, eta: float) -> float:
    # large-eta expansion of the three-term combination (coefficients are
    # polynomial in nu; every correction vanishes identically at nu = 3/2,
    # matching the closed form 1/eta^2 - csch^2(eta) there)
    c2 = nu - 0.5
    c3 = -(nu**2) + 2.0 * nu - 0.75
    c4 = -1.5 * nu**2 + 3.0 * nu - 1.125
    c5 = 0.5 * nu**4 - 2.0 * nu**3 - 0.25 * nu**2 + 4.5 * nu - 63.0 / 32.0
    return c2 / eta**2 + c3 / eta**3 + c4 / eta**4 + c5 / eta**5


def vmf_psi_pp(model: VmfModel, eta: float) -> float:
    """psi''(eta) = Var(<x, xbar>); extends smoothly to 1/n at eta = 0."""
    if eta < 0.0 or not math.isfinite(eta):
        raise ValueError(f"eta must be finite and >= 0, got {eta}")
    if eta == 0.0:
        return 1.0 / model.n
    n = model.n
    if eta >= _ASY_ETA * max(1.0, n / 8.0):
        return _psi_pp_asymptotic(model.nu, eta)
    r1, r2 = _ratios(model, eta)
    return 1.0 / n + (n - 1.0) / n * r2 - r1 * r1


def vmf_beta_sq(model: VmfModel, eta: float) -> float:
    """beta^2(eta) = eta * I_nu(eta)/I_{nu-1}(eta); 0 at eta = 0."""
    if eta < 0.0 or not math.isfinite(eta):
        raise ValueError(f"eta must be finite and >= 0, got {eta}")
    if eta == 0.0:
        return 0.0
    r1, _ = _ratios(model, eta)
    return eta * r1


def vmf_psi(model: VmfModel, eta: float) -> float:
    """Log normalizer psi(eta); psi(0) = log area(S^{n-1})."""
    if eta < 0.0 or not math.isfinite(eta):
        raise ValueError(f"eta must be finite and >= 0, got {eta}")
    if eta == 0.0:
        return -model.log_uniform_density
    nu = model.nu
    return nu * math.log(2.0 * math.pi) + (1.0 - nu) * math.log(eta) + log_bessel_i(nu - 1.0, eta)


def vmf_mean_resultant(model: VmfModel, eta: float) -> float:
    """psi'(eta) = E<x, xbar> = I_nu(eta)/I_{nu-1}(eta)."""
    if eta == 0.0:
        return 0.0
    r1, _ = _ratios(model, eta)
    return r1


def split_point(z: np.ndarray) -> tuple[float, np.ndarray]:
    """(eta, xbar) from the chart point z = eta * xbar; xbar is arbitrary
    (unit e_1) at the origin."""
    z = np.asarray(z, dtype=float)
    eta = float(np.linalg.norm(z))
    if eta < _ZERO_ETA:
        xbar = np.zeros_like(z)
        xbar[0] = 1.0
        return 0.0, xbar
    return eta, z / eta


def vmf_log_density(model: VmfModel, x: np.ndarray, z: np.ndarray) -> float:
    """log p(x | z) = <x, z> - psi(|z|) for unit x."""
    x = np.asarray(x, dtype=float)
    if x.shape != (model.n,):
        raise ValueError(f"x must be a vector in R^{model.n}")
    if abs(np.linalg.norm(x) - 1.0) > 1e-10:
        raise ValueError("x must be a unit vector")
    eta, _ = split_point(np.asarray(z, dtype=float))
    if eta == 0.0:
        return model.log_uniform_density
    return float(np.dot(x, z)) - vmf_psi(model, eta)


def vmf_fisher_metric(model: VmfModel, z: np.ndarray, u_vec: np.ndarray) -> float:
    """Rao-Fisher squared norm of the chart tangent U at the point z.

    For eta > 0, U decomposes as U = u_eta xbar + eta u with
    u_eta = <U, xbar> and u orthogonal to xbar, giving
    psi''(eta) u_eta^2 + beta^2(eta) |u|^2; at z = 0 the smooth extension
    |U|^2 / n.
    """
    z = np.asarray(z, dtype=float)
    u_vec = np.asarray(u_vec, dtype=float)
    eta, xbar = split_point(z)
    if eta == 0.0:
        return float(np.dot(u_vec, u_vec)) / model.n
    u_eta = float(np.dot(u_vec, xbar))
    tangent = (u_vec - u_eta * xbar) / eta
    return vmf_psi_pp(model, eta) * u_eta**2 + vmf_beta_sq(model, eta) * float(
        np.dot(tangent, tangent)
    )


def vmf_metric_matrix(model: VmfModel, z: np.ndarray) -> np.ndarray:
    """Metric tensor in the R^n chart: psi'' on the radial line, beta^2/eta^2
    on the orthogonal complement."""
    z = np.asarray(z, dtype=float)
    eta, xbar = split_point(z)
    if eta == 0.0:
        return np.eye(model.n) / model.n
    proj = np.outer(xbar, xbar)
    radial = vmf_psi_pp(model, eta)
    tangential = vmf_beta_sq(model, eta) / eta**2
    return radial * proj + tangential * (np.eye(model.n) - proj)


def vmf_psi_ppp(model: VmfModel, eta: float) -> float:
    """Third derivative of the log normalizer.

    psi' = I_nu/I_{nu-1}, so the Bessel derivative relations give
    psi'' = 1 - psi'^2 - (n-1) psi'/eta and differentiating once more
    psi''' = -psi''(2 psi' + (n-1)/eta) + (n-1) psi'/eta^2.
    """
    n, nu = model.n, model.nu
    if eta < _SERIES_ETA:
        return -6.0 * eta / (n**2 * (n + 2.0))
    if eta >= _ASY_ETA * max(1.0, n / 8.0):
        c2 = nu - 0.5
        c3 = -(nu**2) + 2.0 * nu - 0.75
        c4 = -1.5 * nu**2 + 3.0 * nu - 1.125
        c5 = 0.5 * nu**4 - 2.0 * nu**3 - 0.25 * nu**2 + 4.5 * nu - 63.0 / 32.0
        return -2.0 * c2 / eta**3 - 3.0 * c3 / eta**4 - 4.0 * c4 / eta**5 - 5.0 * c5 / eta**6
    r1, _ = _ratios(model, eta)
    pp = vmf_psi_pp(model, eta)
    return -pp * (2.0 * r1 + (n - 1.0) / eta) + (n - 1.0) * r1 / eta**2


def vmf_beta_sq_derivative(model: VmfModel, eta: float) -> float:
    """d/deta of beta^2 = eta psi'(eta): psi' + eta psi''."""
    return vmf_mean_resultant(model, eta) + eta * vmf_psi_pp(model, eta)


def vmf_profile(model: VmfModel) -> WarpProfile:
    """Warp profile (alpha = sqrt(psi''), beta) over the eta coordinate,
    with analytic first derivatives from the Bessel recurrences."""

    def alpha(e: float) -> float:
        return math.sqrt(vmf_psi_pp(model, e))

    def dalpha(e: float) -> float:
        return vmf_psi_ppp(model, e) / (2.0 * alpha(e))

    def beta(e: float) -> float:
        return math.sqrt(vmf_beta_sq(model, e))

    def dbeta(e: float) -> float:
        return vmf_beta_sq_derivative(model, e) / (2.0 * beta(e))

    return WarpProfile(
        alpha=alpha,
        betas=(beta,),
        block_dims=(model.n - 1,),
        base_name=f"sphere({model.n - 1})",
        base_curvature=1.0,
        dalpha=dalpha,
        dbetas=(dbeta,),
    )


@dataclasses.dataclass(frozen=True)
class CurvatureProfile:
    """Surface/radial sectional curvatures over an eta grid, with the
    large-eta plateau estimated as the mean over the top octave of the grid
    (eta >= grid_max / 2) and the spread (max - min) over that window."""

    etas: np.ndarray
    k_surface: np.ndarray
    k_radial: np.ndarray
    plateau_surface: float
    plateau_radial: float
    plateau_spread: float


def vmf_curvature_profile(model: VmfModel, eta_grid) -> CurvatureProfile:
    etas = np.asarray(eta_grid, dtype=float)
    if etas.size == 0 or etas.min() <= 0.0:
        raise ValueError("eta grid must be non-empty with positive values")
    profile = vmf_profile(model)
    pairs = np.array([curvatures(profile, 1.0, float(e)) for e in etas])
    ks, kr = pairs[:, 0], pairs[:, 1]
    window = etas >= etas.max() / 2.0
    spread = max(ks[window].max() - ks[window].min(), kr[window].max() - kr[window].min())
    return CurvatureProfile(
        etas=etas,
        k_surface=ks,
        k_radial=kr,
        plateau_surface=float(ks[window].mean()),
        plateau_radial=float(kr[window].mean()),
        plateau_spread=float(spread),
    )


def sample(model: VmfModel, z: np.ndarray, size: int, rng: np.random.Generator) -> np.ndarray:
    """Draw vMF samples on S^{n-1} (rejection sampler for the <x, xbar>
    marginal plus a uniform tangent direction). Used by the sampling
    oracles in the tests."""
    eta, xbar = split_point(np.asarray(z, dtype=float))
    n = model.n
    if eta == 0.0:
        g = rng.standard_normal((size, n))
        return g / np.linalg.norm(g, axis=1, keepdims=True)

    dim = n - 1  # marginal exponent parameter
    b = dim / (2.0 * eta + math.sqrt(4.0 * eta**2 + dim**2))
    x0 = (1.0 - b) / (1.0 + b)
    c = eta * x0 + dim * math.log1p(-x0**2)

    w = np.empty(size)
    filled = 0
    while filled < size:
        m = max(size - filled, 1024)
        zs = rng.beta(dim / 2.0, dim / 2.0, size=m)
        ws = (1.0 - (1.0 + b) * zs) / (1.0 - (1.0 - b) * zs)
        us = rng.uniform(size=m)
        accept = eta * ws + dim * np.log1p(-x0 * ws) - c >= np.log(us)
        take = min(int(accept.sum()), size - filled)
        w[filled : filled + take] = ws[accept][:take]
        filled += take

    g = rng.standard_normal((size, n))
    g -= np.outer(g @ xbar, xbar)
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return w[:, None] * xbar[None, :] + np.sqrt(1.0 - w**2)[:, None] * g


# -- geodesics ------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class VmfGeodesic:
    """Geodesic sampled in the R^n chart: points z(t) and velocities.

    ``r`` is the vertical distance relative to the start, signed along
    the path (it keeps decreasing through the chart origin on a
    descending vertical geodesic)."""

    t: np.ndarray
    z: np.ndarray
    z_dot: np.ndarray
    eta: np.ndarray
    r: np.ndarray
    escape: Optional["EscapeEvent"]
    path: Optional["GeodesicPath"]


def vmf_geodesic_problem(model: VmfModel, z0: np.ndarray, u0: np.ndarray):
    """Initial data in the chart: z0 with |z0| > 0, chart velocity u0."""
    from .geodesics import GeodesicProblem

    eta0, xbar = split_point(np.asarray(z0, dtype=float))
    if eta0 == 0.0:
        raise ValueError("chart origin: use vmf_geodesic, which handles z0 = 0")
    u0 = np.asarray(u0, dtype=float)
    u_eta = float(np.dot(u0, xbar))
    tangential = (u0 - u_eta * xbar) / eta0
    norm_u = float(np.linalg.norm(tangential))
    direction = tangential / norm_u if norm_u > 0.0 else np.zeros_like(xbar)

    def base_exp(point, factors):
        theta = factors[0] * norm_u
        return math.cos(theta) * xbar + math.sin(theta) * direction

    return GeodesicProblem(
        profile=vmf_profile(model),
        sigma0=eta0,
        u_sigma=u_eta,
        block_norms_sq=(norm_u**2,),
        base_point=xbar,
        base_exponential=base_exp,
    )


def _vertical_geodesic(model: VmfModel, x_hat, eta0, u_eta, t_end, steps):
    """Pure-scale geodesic, continued through the origin as a straight
    chart line. The signed vertical coordinate is affine in t, so the
    signed chart coordinate xi (eta = |xi|) obeys the smooth 1-d law
    d(xi)/dt = rho_dot / alpha(|xi|), integrated directly. Stops with an
    escape event at the scale threshold (the vertical distance grows only
    logarithmically in eta, so eta itself blows up in moderate time)."""
    from scipy.integrate import solve_ivp

    from .geodesics import EscapeEvent

    profile = vmf_profile(model)
    eta_cap = min(profile.domain[1], 1e8)
    rho_dot = profile.alpha(max(eta0, 1e-12)) * u_eta

    def rhs(_t, y):
        return [rho_dot / profile.alpha(min(abs(y[0]), eta_cap))]

    def hit_cap(_t, y):
        return eta_cap - abs(y[0])

    hit_cap.terminal = True
    sol = solve_ivp(
        rhs,
        (0.0, t_end),
        [eta0],
        method="DOP853",
        rtol=1e-12,
        atol=1e-14,
        dense_output=True,
        events=[hit_cap],
    )
    escape = None
    t_reached = t_end
    if sol.status == 1:
        t_reached = float(sol.t_events[0][0])
        escape = EscapeEvent(
            time=t_reached,
            sigma=eta_cap,
            reason="scale reached the upper escape threshold",
        )

    ts = np.linspace(0.0, t_reached, steps + 1)
    xi = sol.sol(ts)[0]
    etas = np.abs(xi)
    signs = np.where(xi >= 0.0, 1.0, -1.0)
    z = (signs * etas)[:, None] * x_hat[None, :]
    z_dot = np.array(
        [rho_dot / profile.alpha(max(e, 1e-12)) * x_hat for e in etas]
    )
    return VmfGeodesic(
        t=ts, z=z, z_dot=z_dot, eta=etas, r=rho_dot * ts, escape=escape, path=None
    )


def vmf_geodesic(
    model: VmfModel, z0: np.ndarray, u0: np.ndarray, t_end: float, steps: int = 200
) -> VmfGeodesic:
    """Geodesic of the Fisher metric from chart point z0 with velocity u0.

    Vertical data (including z0 = 0) follow the analytic radial law and
    pass through the origin; non-vertical data go through the
    conservative ODE reduction and report an escape if the origin is
    approached.
    """
    z0 = np.asarray(z0, dtype=float)
    u0 = np.asarray(u0, dtype=float)
    eta0, xbar = split_point(z0)

    if eta0 == 0.0:
        speed = float(np.linalg.norm(u0))
        if speed == 0.0:
            raise ValueError("zero initial velocity")
        return _vertical_geodesic(model, u0 / speed, 0.0, speed, t_end, steps)

    u_eta = float(np.dot(u0, xbar))
    tangential_norm = float(np.linalg.norm(u0 - u_eta * xbar)) / eta0
    if tangential_norm * eta0 <= 1e-12 * max(1.0, abs(u_eta)):
        return _vertical_geodesic(model, xbar, eta0, u_eta, t_end, steps)

    from .geodesics import solve_geodesic

    problem = vmf_geodesic_problem(model, z0, u0)
    path = solve_geodesic(problem, t_end, steps)

    norm_u = math.sqrt(problem.block_norms_sq[0])
    direction = (u0 - u_eta * xbar) / (eta0 * norm_u)
    beta0_sq = vmf_beta_sq(model, eta0)

    thetas = path.factors[:, 0] * norm_u
    points = np.cos(thetas)[:, None] * xbar[None, :] + np.sin(thetas)[:, None] * direction[None, :]
    z = path.sigma[:, None] * points

    z_dot = np.empty_like(z)
    for i, (eta, eta_dot, theta) in enumerate(zip(path.sigma, path.sigma_dot, thetas)):
        theta_dot = norm_u * beta0_sq / vmf_beta_sq(model, float(eta))
        xbar_dot = theta_dot * (-math.sin(theta) * xbar + math.cos(theta) * direction)
        z_dot[i] = eta_dot * points[i] + eta * xbar_dot

    return VmfGeodesic(
        t=path.t, z=z, z_dot=z_dot, eta=path.sigma, r=path.r, escape=path.escape, path=path
    )
