"""The cone of symmetric positive-definite matrices with its
affine-invariant geometry.

Metric, distance, exponential/logarithm maps, and the product split
P_n = R x SP_n into the log-determinant line and the unit-determinant
part. All matrix functions go through symmetric eigendecomposition;
eigenvalues below ``1e-13 * trace`` raise :class:`NotSpdError` instead of
being clamped, since silent clamping would corrupt the distance tests.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np
import scipy.linalg

_SYM_RTOL = 1e-12
_EIG_FLOOR = 1e-13


class NotSpdError(ValueError):
    """Input matrix is not symmetric positive-definite."""


def _as_square(a: np.ndarray, name: str = "matrix") -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    return a

def _check_symmetric(a: np.ndarray, name: str = "matrix") -> np.ndarray:
    a = _as_square(a, name)
    scale = np.abs(a).max() or 1.0
    if np.abs(a - a.T).max() > _SYM_RTOL * scale:
        raise NotSpdError(f"{name} is not symmetric")
    return a


def spd_eigh(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of an SPD matrix, validating positivity."""
    x = _check_symmetric(x)
    w, v = np.linalg.eigh(x)
    if w.min() <= _EIG_FLOOR * np.trace(x):
        raise NotSpdError(f"matrix is not positive definite (min eigenvalue {w.min():g})")
    return w, v


def _apply_spectral(x: np.ndarray, fn) -> np.ndarray:
    w, v = spd_eigh(x)
    return (v * fn(w)) @ v.T


def affine_metric(x: np.ndarray, u: np.ndarray, v: np.ndarray) -> float:
    """Affine-invariant inner product tr[(x^-1 u)(x^-1 v)] at base point x."""
    x = _as_square(x, "base point")
    u = _check_symmetric(u, "tangent u")
    v = _check_symmetric(v, "tangent v")
    if u.shape != x.shape or v.shape != x.shape:
        raise ValueError("dimension mismatch between base point and tangents")
    xu = np.linalg.solve(x, u)
    xv = np.linalg.solve(x, v)
    return float(np.trace(xu @ xv))


def affine_distance(x: np.ndarray, y: np.ndarray) -> float:
    """Geodesic distance sqrt(sum log^2 lambda_i), lambda_i the eigenvalues
    of x^{-1/2} y x^{-1/2} (equivalently of the pencil (y, x))."""
    x = _check_symmetric(x, "x")
    y = _check_symmetric(y, "y")
    if x.shape != y.shape:
        raise ValueError("dimension mismatch")
    spd_eigh(x), spd_eigh(y)  # positivity validation
    lam = scipy.linalg.eigh(y, x, eigvals_only=True)
    return float(np.sqrt(np.sum(np.log(lam) ** 2)))


def spd_exp(x: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Riemannian exponential exp_x(u) = x^1/2 expm(x^-1/2 u x^-1/2) x^1/2."""
    u = _check_symmetric(u, "tangent")
    half = _apply_spectral(x, np.sqrt)
    inv_half = np.linalg.inv(half)
    inner = inv_half @ u @ inv_half
    inner = 0.5 * (inner + inner.T)
    w, v = np.linalg.eigh(inner)
    return half @ ((v * np.exp(w)) @ v.T) @ half


def spd_log(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Riemannian logarithm, inverse of :func:`spd_exp`."""
    half = _apply_spectral(x, np.sqrt)
    inv_half = np.linalg.inv(half)
    inner = inv_half @ y @ inv_half
    inner = 0.5 * (inner + inner.T)
    w, v = spd_eigh(inner)
    return half @ ((v * np.log(w)) @ v.T) @ half


@dataclasses.dataclass(frozen=True)
class DeRhamSplit:
    """Product decomposition of a point/tangent pair on the SPD cone.

    ``tau`` is log det x, ``s`` the unit-determinant part of x, ``u1`` the
    trace (pure-scale) component of the tangent and ``u2`` its trace-free
    complement; u1 + u2 reconstructs u and the two are Q-orthogonal.
    """

    tau: float
    s: np.ndarray
    u1: np.ndarray
    u2: np.ndarray


def derham_split(x: np.ndarray, u: np.ndarray) -> DeRhamSplit:
    w, _ = spd_eigh(x)
    u = _check_symmetric(u, "tangent")
    n = x.shape[0]
    tau = float(np.sum(np.log(w)))
    s = math.exp(-tau / n) * x
    trace_part = float(np.trace(np.linalg.solve(x, u))) / n
    u1 = trace_part * x
    return DeRhamSplit(tau=tau, s=s, u1=u1, u2=u - u1)
