"""Abstract (multiply-)warped metric layer.

A warped metric on M x (0, inf) is determined by a scale coefficient
``alpha`` and one warping function ``beta_q`` per irreducible factor of
the base:

    I_z(U, U) = (alpha(sigma) u_sigma)^2 + sum_q beta_q(sigma)^2 Q(u_q, u_q)

This module evaluates the metric, the vertical distance
r(sigma1) - r(sigma0) = integral of alpha, completeness diagnostics, the
extrinsic metric on a fixed-sigma slice, and the sectional curvatures of
a single-warped metric through the Gauss and radial curvature equations.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Any, Callable, Optional, Sequence

import numpy as np
from scipy import integrate

ScalarFn = Callable[[float], float]


@dataclasses.dataclass(frozen=True)
class WarpProfile:
    """The pair (alpha, {beta_q}) of positive scalar functions of sigma.

    ``block_dims`` lists the dimensions of the base factors. Analytic
    first/second derivatives of the betas (and first derivative of alpha)
    are optional; when absent, Richardson-extrapolated central differences
    are used wherever derivatives are needed.

    Profiles are immutable; all evaluation is reentrant.
    """

    alpha: ScalarFn
    betas: tuple[ScalarFn, ...]
    block_dims: tuple[int, ...]
    base_name: str = ""
    base_curvature: Optional[float] = None
    dalpha: Optional[ScalarFn] = None
    dbetas: Optional[tuple[ScalarFn, ...]] = None
    d2betas: Optional[tuple[ScalarFn, ...]] = None
    domain: tuple[float, float] = (1e-8, 1e8)

    def __post_init__(self):
        object.__setattr__(self, "betas", tuple(self.betas))
        object.__setattr__(self, "block_dims", tuple(self.block_dims))
        if len(self.betas) != len(self.block_dims) or not self.betas:
            raise ValueError("betas and block_dims must have equal length >= 1")

    @property
    def block_count(self) -> int:
        return len(self.betas)

    def check_sigma(self, sigma: float) -> float:
        lo, hi = self.domain
        if not (lo <= sigma <= hi):
            raise ValueError(f"sigma={sigma:g} outside profile domain [{lo:g}, {hi:g}]")
        return float(sigma)


@dataclasses.dataclass(frozen=True)
class ModelPoint:
    """A parameter-space point (base point, sigma); the base point is an
    opaque handle owned by the model module."""

    base: Any
    sigma: float


@dataclasses.dataclass(frozen=True)
class TangentDecomposition:
    """Tangent U = u_sigma d/dsigma + u_1 + ... + u_r, carried as the
    scale component and the base-metric squared norms Q(u_q, u_q)."""

    u_sigma: float
    block_norms_sq: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "block_norms_sq", tuple(self.block_norms_sq))
        if any(q < 0 for q in self.block_norms_sq):
            raise ValueError("block norms squared must be >= 0")


def metric_eval(profile: WarpProfile, z: ModelPoint, u: TangentDecomposition) -> float:
    """(alpha(sigma) u_sigma)^2 + sum_q beta_q(sigma)^2 Q(u_q, u_q)."""
    if len(u.block_norms_sq) != profile.block_count:
        raise ValueError("tangent block count does not match profile")
    sigma = profile.check_sigma(z.sigma)
    total = (profile.alpha(sigma) * u.u_sigma) ** 2
    for beta, norm_sq in zip(profile.betas, u.block_norms_sq):
        total += beta(sigma) ** 2 * norm_sq
    return total


def extrinsic_metric(
    profile: WarpProfile, sigma: float, block_norms_sq: Sequence[float]
) -> float:
    """Restriction of the warped metric to the slice M x {sigma}:
    sum_q beta_q(sigma)^2 Q(u_q, u_q)."""
    if len(block_norms_sq) != profile.block_count:
        raise ValueError("block count mismatch")
    sigma = profile.check_sigma(sigma)
    return sum(
        beta(sigma) ** 2 * q for beta, q in zip(profile.betas, block_norms_sq)
    )


def vertical_distance(profile: WarpProfile, sigma0: float, sigma1: float) -> float:
    """r(sigma1) - r(sigma0) = integral of alpha over [sigma0, sigma1]."""
    if not (0.0 < sigma0 <= sigma1):
        raise ValueError("need 0 < sigma0 <= sigma1")
    if sigma0 == sigma1:
        return 0.0
    value, _ = integrate.quad(profile.alpha, sigma0, sigma1, epsrel=1e-12, limit=200)
    return float(value)


# -- completeness diagnostics -------------------------------------------------

@dataclasses.dataclass(frozen=True)
class CompletenessProbe:
    """Numerical completeness diagnostic; not a proof.

    ``r_to_horizon`` and ``r_from_inv_horizon`` are the partial vertical
    distances to the probe horizon on each side of sigma_ref.
    ``exponent_at_inf``/``exponent_at_zero`` are fitted log-log slopes of
    alpha near each end; the scale axis fails to close at infinity when
    alpha decays no faster than 1/sigma there (slope >= -1), and at zero
    when alpha blows up at least as fast as 1/sigma (slope <= -1).
    """

    r_to_horizon: float
    r_from_inv_horizon: float
    exponent_at_inf: float
    exponent_at_zero: float
    diverging_at_inf: bool
    diverging_at_zero: bool


_EXPONENT_MARGIN = 0.1


def _fitted_exponent(alpha: ScalarFn, lo: float, hi: float) -> float:
    grid = np.geomspace(lo, hi, 16)
    values = np.array([alpha(s) for s in grid])
    slope, _ = np.polyfit(np.log(grid), np.log(values), 1)
    return float(slope)


def completeness_probe(
    profile: WarpProfile, sigma_ref: float, horizon: float
) -> CompletenessProbe:
    if not horizon > sigma_ref > 0.0:
        raise ValueError("need horizon > sigma_ref > 0")
    r_up = vertical_distance(profile, sigma_ref, horizon)
    r_down = vertical_distance(profile, 1.0 / horizon, sigma_ref)
    p_inf = _fitted_exponent(profile.alpha, horizon / 10.0, horizon)
    p_zero = _fitted_exponent(profile.alpha, 1.0 / horizon, 10.0 / horizon)
    return CompletenessProbe(
        r_to_horizon=r_up,
        r_from_inv_horizon=r_down,
        exponent_at_inf=p_inf,
        exponent_at_zero=p_zero,
        diverging_at_inf=p_inf >= -1.0 - _EXPONENT_MARGIN,
        diverging_at_zero=p_zero <= -1.0 + _EXPONENT_MARGIN,
    )


# -- sectional curvature ------------------------------------------------------

def _richardson_d1(f: ScalarFn, x: float, h: float) -> float:
    def central(step):
        return (f(x + step) - f(x - step)) / (2.0 * step)

    return (4.0 * central(h / 2.0) - central(h)) / 3.0


def _richardson_d2(f: ScalarFn, x: float, h: float) -> float:
    def central(step):
        return (f(x + step) - 2.0 * f(x) + f(x - step)) / step**2

    return (4.0 * central(h / 2.0) - central(h)) / 3.0


def curvatures(
    profile: WarpProfile, base_curvature: float, sigma: float
) -> tuple[float, float]:
    """Sectional curvatures (K^s, K^r) of a single-warped metric.

    Gauss equation for sections tangent to the base slice and the radial
    curvature equation for sections containing the scale direction:

        K^s = K^M / beta^2 - (d_r beta / beta)^2
        K^r = -(d^2_r beta) / beta

    with d_r = (1/alpha) d_sigma applied through the chain rule,

        d_r beta   = beta' / alpha
        d^2_r beta = beta'' / alpha^2 - beta' alpha' / alpha^3.

    Derivatives use the profile's analytic callables when present, else
    central differences with one Richardson extrapolation and step
    h = 1e-4 * max(1, sigma).
    """
    if profile.block_count != 1:
        raise ValueError("curvature formulas apply to single-warped profiles only")
    sigma = profile.check_sigma(sigma)
    beta = profile.betas[0]
    h = 1e-4 * max(1.0, sigma)

    a = profile.alpha(sigma)
    b = beta(sigma)
    da = profile.dalpha(sigma) if profile.dalpha else _richardson_d1(profile.alpha, sigma, h)
    db = profile.dbetas[0](sigma) if profile.dbetas else _richardson_d1(beta, sigma, h)
    d2b = profile.d2betas[0](sigma) if profile.d2betas else _richardson_d2(beta, sigma, h)

    dr_beta = db / a
    d2r_beta = d2b / a**2 - db * da / a**3
    k_surface = base_curvature / b**2 - (dr_beta / b) ** 2
    k_radial = -d2r_beta / b
    return k_surface, k_radial


# -- reference profile: isotropic normal model --------------------------------

def isotropic_normal_profile(d: int) -> WarpProfile:
    """Warp profile of the isotropic normal model on R^d:

        alpha(sigma) = sqrt(2 d) / sigma,   beta(sigma) = 1 / sigma.

    Constant negative curvature -1/(2d); the reference hyperbolic case.
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    root = math.sqrt(2.0 * d)
    return WarpProfile(
        alpha=lambda s: root / s,
        betas=(lambda s: 1.0 / s,),
        block_dims=(d,),
        base_name=f"euclidean({d})",
        base_curvature=0.0,
        dalpha=lambda s: -root / s**2,
        dbetas=(lambda s: -1.0 / s**2,),
        d2betas=(lambda s: 2.0 / s**3,),
    )
