"""Geodesics of (multiply-)warped metrics by the conservative
one-dimensional reduction.

Along a geodesic, each base block keeps a fixed direction and the scale
coordinate obeys the second-order equation

    d^2 r / dt^2 = -1/2 dV/dr,
    V(r) = sum_q C_q / beta_q^2(r),    C_q = beta_q^4(r(0)) Q(u_q, u_q),

with conserved total energy E = rdot^2 + V = I_z(U, U) and conserved
block quantities C_q. The base point is a reparameterized base geodesic,

    x(t) = exp_x[ sum_q F_q(t) u_q ],
    F_q(t) = int_0^t beta_q^2(r(0)) / beta_q^2(r(s)) ds.

The solver integrates in the sigma coordinate (state sigma, sigma-dot,
F_1..F_r) with an adaptive high-order Runge-Kutta scheme; the vertical
distance r is derived from a quadrature table only for reporting. The
time of flight to a target scale is an independent quadrature of
alpha / sqrt(E - V), with an explicit square-root substitution at a
turning point.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Any, Callable, Optional, Sequence

import numpy as np
from scipy import integrate, optimize
from scipy.interpolate import PchipInterpolator

from .warped import (
    ModelPoint,
    TangentDecomposition,
    WarpProfile,
    isotropic_normal_profile,
    metric_eval,
    vertical_distance,
)

_RTOL = 1e-10
_ATOL = 1e-12
_ESCAPE_LO = 1e-8
_ESCAPE_HI = 1e8


class GeodesicError(RuntimeError):
    pass


@dataclasses.dataclass(frozen=True)
class GeodesicProblem:
    """Initial data for a geodesic of a (multiply-)warped metric.

    ``base_exponential(point, factors)`` maps the initial base point and
    the accumulated per-block time integrals F_q to the base point at
    time t; the owning model closes over its block tangents u_q.
    """

    profile: WarpProfile
    sigma0: float
    u_sigma: float
    block_norms_sq: tuple[float, ...]
    base_point: Any = None
    base_exponential: Optional[Callable[[Any, Sequence[float]], Any]] = None

    def __post_init__(self):
        object.__setattr__(self, "block_norms_sq", tuple(self.block_norms_sq))
        if len(self.block_norms_sq) != self.profile.block_count:
            raise ValueError("block norms do not match the profile")
        self.profile.check_sigma(self.sigma0)

    @property
    def start(self) -> ModelPoint:
        return ModelPoint(base=self.base_point, sigma=self.sigma0)

    @property
    def tangent(self) -> TangentDecomposition:
        return TangentDecomposition(self.u_sigma, self.block_norms_sq)


@dataclasses.dataclass(frozen=True)
class EscapeEvent:
    time: float
    sigma: float
    reason: str


@dataclasses.dataclass(frozen=True)
class GeodesicPath:
    """Sampled trajectory with conserved-quantity diagnostics.

    ``r`` is the vertical distance relative to the starting scale.
    ``factors`` holds the per-block reparameterization integrals F_q.
    Drift fields are maxima of relative deviation along the path.
    """

    t: np.ndarray
    sigma: np.ndarray
    sigma_dot: np.ndarray
    r: np.ndarray
    factors: np.ndarray
    base_points: list
    energy: float
    conserved: tuple[float, ...]
    energy_drift: float
    conserved_drift: tuple[float, ...]
    escape: Optional[EscapeEvent] = None


class RadialTable:
    """Monotone table of the vertical distance r(sigma), with inverse by
    bisection on the interpolant."""

    def __init__(
        self,
        profile: WarpProfile,
        sigma_lo: float,
        sigma_hi: float,
        points: int = 257,
        grid: Optional[np.ndarray] = None,
    ):
        if not 0.0 < sigma_lo <= sigma_hi:
            raise ValueError("need 0 < sigma_lo <= sigma_hi")
        if sigma_lo == sigma_hi:
            sigma_hi = sigma_lo * (1.0 + 1e-9) + 1e-300
        if grid is None:
            grid = np.geomspace(sigma_lo, sigma_hi, points)
        increments = [
            vertical_distance(profile, float(a), float(b))
            for a, b in zip(grid[:-1], grid[1:])
        ]
        values = np.concatenate([[0.0], np.cumsum(increments)])
        self.grid = grid
        self.values = values
        self._interp = PchipInterpolator(grid, values)

    def __call__(self, sigma: float) -> float:
        return float(self._interp(np.clip(sigma, self.grid[0], self.grid[-1])))

    def inverse(self, r: float) -> float:
        if not self.values[0] <= r <= self.values[-1]:
            raise ValueError(f"r={r:g} outside table range")
        return float(
            optimize.brentq(
                lambda s: self._interp(s) - r, self.grid[0], self.grid[-1], xtol=1e-14
            )
        )


def _derivative(fn, dfn, sigma: float) -> float:
    if dfn is not None:
        return dfn(sigma)
    h = 1e-5 * max(1.0, sigma)

    def central(step):
        return (fn(sigma + step) - fn(sigma - step)) / (2.0 * step)

    return (4.0 * central(h / 2.0) - central(h)) / 3.0


def conserved_quantities(problem: GeodesicProblem) -> tuple[float, tuple[float, ...]]:
    """Total energy E = I_z(U, U) and the block constants
    C_q = beta_q^4(sigma0) Q(u_q, u_q)."""
    energy = metric_eval(problem.profile, problem.start, problem.tangent)
    c = tuple(
        beta(problem.sigma0) ** 4 * q
        for beta, q in zip(problem.profile.betas, problem.block_norms_sq)
    )
    return energy, c


def _potential(problem: GeodesicProblem, conserved: Sequence[float]):
    profile = problem.profile
    lo, hi = profile.domain

    def clamp(s: float) -> float:
        return min(max(s, lo), hi)

    def v(s: float) -> float:
        s = clamp(s)
        return sum(c / beta(s) ** 2 for c, beta in zip(conserved, profile.betas))

    def dv(s: float) -> float:
        s = clamp(s)
        total = 0.0
        for c, beta, k in zip(conserved, profile.betas, range(profile.block_count)):
            if c == 0.0:
                continue
            dbeta = profile.dbetas[k] if profile.dbetas else None
            total += -2.0 * c * _derivative(beta, dbeta, s) / beta(s) ** 3
        return total

    return v, dv, clamp


def solve_geodesic(problem: GeodesicProblem, t_end: float, steps: int = 200) -> GeodesicPath:
    """Integrate the geodesic over [0, t_end] and sample it at steps+1
    uniform times (fewer if the scale escapes the domain first)."""
    if t_end <= 0.0 or steps < 1:
        raise ValueError("need t_end > 0 and steps >= 1")
    profile = problem.profile
    energy, conserved = conserved_quantities(problem)
    v, dv, clamp = _potential(problem, conserved)
    beta0_sq = [beta(problem.sigma0) ** 2 for beta in profile.betas]

    def rhs(_t, y):
        # trial steps may poke beyond the domain; evaluate clamped
        s = clamp(y[0])
        a = profile.alpha(s)
        da = _derivative(profile.alpha, profile.dalpha, s)
        sigma_ddot = -(da * y[1] ** 2 + dv(s) / (2.0 * a)) / a
        ratios = [b0 / beta(s) ** 2 for b0, beta in zip(beta0_sq, profile.betas)]
        return [y[1], sigma_ddot, *ratios]

    lo_stop = max(_ESCAPE_LO, profile.domain[0])
    hi_stop = min(_ESCAPE_HI, profile.domain[1])

    def hit_low(_t, y):
        return y[0] - lo_stop

    def hit_high(_t, y):
        return hi_stop - y[0]

    hit_low.terminal = True
    hit_high.terminal = True

    y0 = [problem.sigma0, problem.u_sigma] + [0.0] * profile.block_count
    sol = integrate.solve_ivp(
        rhs,
        (0.0, t_end),
        y0,
        method="DOP853",
        rtol=_RTOL,
        atol=_ATOL,
        dense_output=True,
        events=[hit_low, hit_high],
    )
    if sol.status == -1:
        raise GeodesicError(f"integration failed: {sol.message}")

    escape = None
    t_reached = t_end
    if sol.status == 1:
        times = [events[0] for events in sol.t_events if events.size]
        t_reached = float(min(times))
        sigma_at = float(sol.sol(t_reached)[0])
        side = "lower" if abs(sigma_at - lo_stop) < abs(sigma_at - hi_stop) else "upper"
        reason = (
            f"scale reached the {side} escape threshold"
            if (lo_stop, hi_stop) == (_ESCAPE_LO, _ESCAPE_HI)
            else f"scale left the profile domain at the {side} end"
        )
        escape = EscapeEvent(time=t_reached, sigma=sigma_at, reason=reason)

    ts = np.linspace(0.0, t_reached, steps + 1)
    states = sol.sol(ts)
    sigma = states[0]
    sigma_dot = states[1]
    factors = states[2:].T

    table = RadialTable(profile, float(sigma.min()), float(sigma.max()))
    r0 = table(problem.sigma0)
    r = np.array([table(s) for s in sigma]) - r0

    base_points = []
    if problem.base_exponential is not None:
        base_points = [
            problem.base_exponential(problem.base_point, factors[i])
            for i in range(len(ts))
        ]

    energies = np.array(
        [(profile.alpha(clamp(s)) * sd) ** 2 + v(s) for s, sd in zip(sigma, sigma_dot)]
    )
    scale = max(abs(energy), 1e-300)
    energy_drift = float(np.abs(energies - energy).max() / scale)

    conserved_drift = _conserved_drift(
        profile, sol.sol, ts, t_reached, conserved, problem
    )

    return GeodesicPath(
        t=ts,
        sigma=sigma,
        sigma_dot=sigma_dot,
        r=r,
        factors=factors,
        base_points=base_points,
        energy=energy,
        conserved=conserved,
        energy_drift=energy_drift,
        conserved_drift=conserved_drift,
        escape=escape,
    )


def _conserved_drift(profile, dense, ts, t_reached, conserved, problem):
    """C_q(t) = beta_q^4(sigma(t)) Fdot_q(t)^2 Q(u_q, u_q), with Fdot
    reconstructed by differencing the integrator's dense output: a
    consistency check of the integrated factors against the scale path."""
    drifts = [0.0] * profile.block_count
    if t_reached <= 0.0:
        return tuple(drifts)
    h = 1e-6 * t_reached
    probe = ts[(ts >= h) & (ts <= t_reached - h)]
    if probe.size == 0:
        return tuple(drifts)
    upper = dense(probe + h)
    lower = dense(probe - h)
    fdot = (upper[2:] - lower[2:]) / (2.0 * h)
    sigma_mid = dense(probe)[0]
    for k, (c0, q) in enumerate(zip(conserved, problem.block_norms_sq)):
        if c0 == 0.0:
            continue
        beta4 = np.array([profile.betas[k](float(s)) ** 4 for s in sigma_mid])
        c_t = beta4 * fdot[k] ** 2 * q
        drifts[k] = float(np.abs(c_t - c0).max() / abs(c0))
    return tuple(drifts)


@dataclasses.dataclass(frozen=True)
class TimeOfFlight:
    time: float
    divergent: bool
    turning_sigma: Optional[float] = None


def _tail_exponent(fn, lo: float, hi: float) -> float:
    grid = np.geomspace(lo, hi, 12)
    vals = np.array([fn(float(s)) for s in grid])
    slope, _ = np.polyfit(np.log(grid), np.log(vals), 1)
    return float(slope)


def time_of_flight(problem: GeodesicProblem, sigma_target: float) -> TimeOfFlight:
    """Time for the scale coordinate to travel from sigma(0) to the
    target, by the quadrature t = int alpha / sqrt(E - V) dsigma.

    An improper target (0 or inf) is first screened by a log-log tail
    fit of the integrand; a non-integrable tail returns a divergent
    flag. A turning point (E = V) strictly between start and target is
    an error; a target exactly at the turning point is integrated with
    a square-root substitution.
    """
    profile = problem.profile
    energy, conserved = conserved_quantities(problem)
    v, dv, clamp = _potential(problem, conserved)
    sigma0 = problem.sigma0

    if problem.u_sigma != 0.0:
        direction = 1.0 if problem.u_sigma > 0 else -1.0
    else:
        slope = dv(sigma0)
        if slope == 0.0:
            raise GeodesicError("stationary initial data: no scale motion")
        direction = 1.0 if slope < 0.0 else -1.0

    if sigma_target == sigma0:
        return TimeOfFlight(0.0, False)
    if (sigma_target - sigma0) * direction < 0.0:
        raise GeodesicError("target lies opposite to the initial scale direction")

    def integrand(s: float) -> float:
        gap = energy - v(s)
        return profile.alpha(clamp(s)) / math.sqrt(gap)

    # turning point scan between start and target (with a small margin past
    # the target so a turning point sitting at the target is still found)
    if direction > 0:
        span_lo = sigma0
        span_hi = min(sigma_target * 1.05, profile.domain[1])
    else:
        span_lo = max(sigma_target * 0.95, profile.domain[0])
        span_hi = sigma0
    probe = np.geomspace(max(span_lo, 1e-300), span_hi, 513) if span_lo > 0 else \
        np.linspace(span_lo, span_hi, 513)
    gaps = np.array([energy - v(float(s)) for s in probe])
    turning = None
    crossings = np.nonzero(gaps[:-1] * gaps[1:] < 0.0)[0]
    if crossings.size:
        idx = crossings[0] if direction > 0 else crossings[-1]
        turning = float(
            optimize.brentq(
                lambda s: energy - v(s), float(probe[idx]), float(probe[idx + 1]), xtol=1e-13
            )
        )

    if turning is not None:
        at_turning = math.isclose(turning, sigma_target, rel_tol=1e-6, abs_tol=1e-12)
        inside = (
            (sigma0 < turning < sigma_target)
            if direction > 0
            else (sigma_target < turning < sigma0)
        )
        if inside and not at_turning:
            raise GeodesicError(
                f"target {sigma_target:g} lies beyond the turning point {turning:g}"
            )
        if at_turning:
            # square-root substitution sigma = sigma* - dir u^2
            width = math.sqrt(abs(turning - sigma0))

            def sub_integrand(u: float) -> float:
                s = turning - direction * u * u
                gap = energy - v(s)
                if gap <= 0.0:
                    return 0.0
                return 2.0 * u * profile.alpha(clamp(s)) / math.sqrt(gap)

            value, _ = integrate.quad(sub_integrand, 0.0, width, limit=200)
            return TimeOfFlight(float(value), False, turning_sigma=turning)

    if sigma_target in (0.0, math.inf):
        if sigma_target == math.inf:
            lo = max(10.0 * sigma0, 1e2)
            slope = _tail_exponent(integrand, lo, lo * 1e4)
            if slope >= -1.0 - 0.1:
                return TimeOfFlight(math.inf, True)
        else:
            hi = min(sigma0 / 10.0, 1e-2)
            slope = _tail_exponent(integrand, hi / 1e4, hi)
            if slope <= -1.0 + 0.1:
                return TimeOfFlight(math.inf, True)
        value, _ = integrate.quad(integrand, sigma0, sigma_target, limit=400)
        return TimeOfFlight(abs(float(value)), False)

    value, _ = integrate.quad(integrand, sigma0, sigma_target, limit=400)
    return TimeOfFlight(abs(float(value)), False, turning_sigma=turning)


# -- reference model glue: isotropic normal on R^d ----------------------------

def isonormal_geodesic_problem(
    d: int, x0: np.ndarray, sigma0: float, u_sigma: float, u: np.ndarray
) -> GeodesicProblem:
    """Geodesic initial data for the isotropic normal model; the base is
    flat R^d with exp_x(v) = x + v."""
    x0 = np.asarray(x0, dtype=float)
    u = np.asarray(u, dtype=float)
    if x0.shape != (d,) or u.shape != (d,):
        raise ValueError("x0 and u must be vectors in R^d")

    def base_exp(point, factors):
        return point + factors[0] * u

    return GeodesicProblem(
        profile=isotropic_normal_profile(d),
        sigma0=sigma0,
        u_sigma=u_sigma,
        block_norms_sq=(float(np.dot(u, u)),),
        base_point=x0,
        base_exponential=base_exp,
    )


# -- CSV serialization ---------------------------------------------------------

def geodesic_csv(
    path: GeodesicPath,
    flatten: Optional[Callable[[Any], Sequence[float]]] = None,
    labels: Sequence[str] = (),
) -> str:
    """CSV text: t, sigma, r, then a model-defined flattening of the base
    point (header declares the flattening labels)."""
    header = ["t", "sigma", "r", *labels]
    lines = [",".join(header)]
    for i in range(len(path.t)):
        row = [f"{path.t[i]:.12g}", f"{path.sigma[i]:.12g}", f"{path.r[i]:.12g}"]
        if flatten is not None and path.base_points:
            row.extend(f"{value:.12g}" for value in flatten(path.base_points[i]))
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"
