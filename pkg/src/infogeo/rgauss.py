"""Riemannian Gaussian model on the SPD cone P_n.

Density with respect to the invariant volume element:

    p(x | xbar, sigma) = Z(sigma)^-1 exp(-d^2(x, xbar) / (2 sigma^2)),

d the affine-invariant distance. With eta = -1/(2 sigma^2) this is an
exponential family whose log normalizer psi(eta) is the cumulant
generating function of d^2(x, xbar): psi'(eta) = E d^2 and
psi''(eta) = Var d^2. Both are estimated by importance sampling of the
eigenvalue integral

    Z(sigma) ~ C_n int exp(eta |r|^2) prod_{i<j} sinh(|r_i - r_j|/2) dr

and tabulated over an eta grid; psi itself is integrated from psi' along
the grid (the constant C_n cancels from every quantity used downstream,
so psi is stored up to one shared additive constant fixed at the first
grid point).

The Fisher metric is multiply-warped over the split P_n = R x SP_n:

    I_z(U,U) = psi''(eta) u_eta^2 - 2 eta Q(u1,u1)
               + (8 eta^2 psi_2'(eta) / (n^2+n-2)) Q(u2,u2)

with psi_2' = psi' + 1/(2 eta) the unit-determinant part of the mean
squared distance. The generalized Mahalanobis distance is the distance
induced by the fixed-sigma restriction of this metric.
"""

from __future__ import annotations

import dataclasses
import io
import itertools
import math
import os
import threading
import warnings
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.special import logsumexp, ndtri
from scipy.stats import qmc

from .spd import affine_distance, affine_metric, derham_split
from .warped import WarpProfile

_BATCHES = 20
_MIN_SAMPLES = 10_000

# the symmetrized proposal density sums over n! shift assignments
_MAX_TABULATION_N = 6

_CSV_COLUMNS = (
    "eta",
    "sigma",
    "psi",
    "psi_p",
    "psi_pp",
    "stderr_psi_p",
    "stderr_psi_pp",
    "samples",
    "seed",
)


def resolve_threads(threads: Optional[int] = None) -> int:
    """Tabulation parallelism; INFOGEO_THREADS caps the default."""
    if threads is not None:
        return max(1, int(threads))
    return max(1, int(os.environ.get("INFOGEO_THREADS", "1")))


def default_eta_grid(
    count: int = 40, sigma_min: float = 0.05, sigma_max: float = 5.0
) -> np.ndarray:
    """40 log-spaced sigma values mapped to eta = -1/(2 sigma^2), ascending."""
    sigmas = np.geomspace(sigma_min, sigma_max, count)
    return -1.0 / (2.0 * sigmas**2)


def _log_sinh(t: np.ndarray) -> np.ndarray:
    # log sinh(t) = t + log(1 - e^{-2t}) - log 2, stable for large t
    with np.errstate(divide="ignore"):
        return t + np.log1p(-np.exp(-2.0 * t)) - math.log(2.0)


def _log_sinhc(t: np.ndarray) -> np.ndarray:
    # log(sinh(t)/t), smooth through t = 0
    small = t < 1e-4
    safe = np.where(small, 1.0, t)
    series = np.log1p(t * t / 6.0 * (1.0 + t * t / 20.0))
    return np.where(small, series, _log_sinh(safe) - np.log(safe))


def _log_proposal_sym(r: np.ndarray, shifts: np.ndarray, sigma2: float) -> np.ndarray:
    """log of the permutation-symmetrized shifted-normal density
    (1/n!) sum_pi prod_i N(r_{pi(i)}; m_i, sigma^2)."""
    count, n = r.shape
    perms = list(itertools.permutations(range(n)))
    terms = np.empty((count, len(perms)))
    for k, perm in enumerate(perms):
        diff = r[:, perm] - shifts[None, :]
        terms[:, k] = -np.einsum("ij,ij->i", diff, diff) / (2.0 * sigma2)
    const = -0.5 * n * math.log(2.0 * math.pi * sigma2) - math.log(len(perms))
    return const + logsumexp(terms, axis=1)


# above this sigma the shifted-Gaussian proposal takes over from the
# GOE eigenvalue proposal (measured stderr crossover)
_PROPOSAL_SWITCH_SIGMA = 0.8


_sobol_lock = threading.Lock()


def _sobol_normals(dim: int, count: int, seed_seq: np.random.SeedSequence) -> np.ndarray:
    """Scrambled-Sobol standard normals: unbiased, deterministic given the
    seed, and far lower variance than iid draws in these low dimensions.
    Batches use independent scramblings, so batch means remain a valid
    standard-error estimate."""
    # catch_warnings is not thread-safe; serialize the (cheap) draw
    with _sobol_lock, warnings.catch_warnings():
        # a non power-of-two count only costs a little balance
        warnings.simplefilter("ignore", UserWarning)
        engine = qmc.Sobol(d=dim, scramble=True, seed=np.random.default_rng(seed_seq))
        uniforms = engine.random(count)
    return ndtri(np.clip(uniforms, 1e-15, 1.0 - 1e-15))


def _batch_moments(
    n: int, eta: float, count: int, seed_seq: np.random.SeedSequence
) -> tuple[float, float, float]:
    """One importance-sampling batch at a single eta.

    Two complementary proposals, both targeting the eta-tilted eigenvalue
    density exp(eta |r|^2) prod sinh(|r_i - r_j|/2):

    * small sigma: eigenvalues of a GOE matrix with scale sigma, whose
      density carries the prod |r_i - r_j| repulsion exactly; the weight
      prod sinh(t)/(2t) tends to 1 as sigma -> 0.
    * large sigma: independent normals r_i ~ N(m_i, sigma^2) with mean
      shifts m_i = sigma^2 (n + 1 - 2i)/2 that absorb the leading
      exp(sum |r_i - r_j|/2) growth of the sinh product (an unshifted
      proposal's effective sample size collapses for sigma >~ 3). The
      weight divides by the permutation-symmetrized proposal density so
      draws landing mis-ordered relative to the shifts are not
      exponentially up-weighted.

    Returns (log of the batch weight mass, E_w[|r|^2], E_w[|r|^4]).
    """
    sigma2 = -1.0 / (2.0 * eta)
    sigma = math.sqrt(sigma2)
    iu, ju = np.triu_indices(n, k=1)

    if sigma <= _PROPOSAL_SWITCH_SIGMA:
        z = _sobol_normals(n * (n + 1) // 2, count, seed_seq)
        h = np.zeros((count, n, n))
        diag = np.arange(n)
        h[:, diag, diag] = sigma * z[:, :n]
        if n > 1:
            h[:, iu, ju] = sigma / math.sqrt(2.0) * z[:, n:]
            h[:, ju, iu] = h[:, iu, ju]
        r = np.linalg.eigvalsh(h)
        d2 = np.einsum("ij,ij->i", r, r)
        log_w = np.zeros(count)
        if n > 1:
            t = np.abs(r[:, iu] - r[:, ju]) / 2.0
            log_w = _log_sinhc(t).sum(axis=1)  # sinh(t)/(2t) up to constants
    else:
        z = _sobol_normals(n, count, seed_seq)
        shifts = sigma2 * (n + 1.0 - 2.0 * np.arange(1, n + 1)) / 2.0
        r = shifts[None, :] + sigma * z
        d2 = np.einsum("ij,ij->i", r, r)
        log_w = eta * d2 - _log_proposal_sym(r, shifts, sigma2)
        if n > 1:
            t = np.abs(r[:, iu] - r[:, ju]) / 2.0
            log_w += _log_sinh(t).sum(axis=1)

    shift = log_w.max()
    w = np.exp(log_w - shift)
    mass = w.sum()
    first = float((w * d2).sum() / mass)
    second = float((w * d2 * d2).sum() / mass)
    return shift + math.log(mass), first, second


@dataclasses.dataclass(frozen=True)
class PsiTable:
    """Tabulated psi(eta), psi'(eta), psi''(eta) with MC standard errors.

    psi carries one shared additive constant (zero at the first grid
    point). Interpolation is monotone cubic; extrapolation is a hard
    error.
    """

    n: int
    eta: np.ndarray
    psi: np.ndarray
    psi_p: np.ndarray
    psi_pp: np.ndarray
    stderr_psi_p: np.ndarray
    stderr_psi_pp: np.ndarray
    samples: int
    seed: int

    def __post_init__(self):
        eta = np.asarray(self.eta, dtype=float)
        if eta.size < 2 or np.any(np.diff(eta) <= 0.0):
            raise ValueError("eta grid must be strictly increasing with >= 2 points")
        if np.any(eta >= 0.0):
            raise ValueError("all eta must be negative")
        if np.any(np.asarray(self.psi_pp) <= 0.0):
            raise ValueError("psi'' must be positive at every grid point (convexity)")
        object.__setattr__(self, "_interp_p", PchipInterpolator(eta, self.psi_p))
        object.__setattr__(self, "_interp_pp", PchipInterpolator(eta, self.psi_pp))
        object.__setattr__(self, "_interp_psi", PchipInterpolator(eta, self.psi))

    @property
    def sigma(self) -> np.ndarray:
        return np.sqrt(-1.0 / (2.0 * self.eta))

    def _check_range(self, eta: float) -> float:
        if not self.eta[0] <= eta <= self.eta[-1]:
            raise ValueError(
                f"eta={eta:g} outside tabulated range [{self.eta[0]:g}, {self.eta[-1]:g}]"
            )
        return float(eta)

    def psi_at(self, eta: float) -> float:
        return float(self._interp_psi(self._check_range(eta)))

    def psi_p_at(self, eta: float) -> float:
        return float(self._interp_p(self._check_range(eta)))

    def psi_pp_at(self, eta: float) -> float:
        return float(self._interp_pp(self._check_range(eta)))

    def psi_p_derivative_at(self, eta: float) -> float:
        return float(self._interp_p.derivative()(self._check_range(eta)))

    def psi_pp_derivative_at(self, eta: float) -> float:
        return float(self._interp_pp.derivative()(self._check_range(eta)))

    # -- persistence ---------------------------------------------------------

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(self.to_csv_text())

    def to_csv_text(self) -> str:
        out = io.StringIO()
        out.write(",".join(_CSV_COLUMNS) + "\n")
        sigma = self.sigma
        for i in range(self.eta.size):
            row = (
                f"{self.eta[i]:.12g}",
                f"{sigma[i]:.12g}",
                f"{self.psi[i]:.12g}",
                f"{self.psi_p[i]:.12g}",
                f"{self.psi_pp[i]:.12g}",
                f"{self.stderr_psi_p[i]:.12g}",
                f"{self.stderr_psi_pp[i]:.12g}",
                str(self.samples),
                str(self.seed),
            )
            out.write(",".join(row) + "\n")
        return out.getvalue()

    @classmethod
    def from_csv(cls, path, n: int) -> "PsiTable":
        data = np.genfromtxt(path, delimiter=",", names=True)
        if data.dtype.names is None or set(_CSV_COLUMNS) - set(data.dtype.names):
            raise ValueError(f"psi table must have columns {_CSV_COLUMNS}")
        data = np.atleast_1d(data)
        return cls(
            n=n,
            eta=data["eta"],
            psi=data["psi"],
            psi_p=data["psi_p"],
            psi_pp=data["psi_pp"],
            stderr_psi_p=data["stderr_psi_p"],
            stderr_psi_pp=data["stderr_psi_pp"],
            samples=int(data["samples"][0]),
            seed=int(data["seed"][0]),
        )


def tabulate_psi(
    n: int,
    eta_grid: Optional[Sequence[float]] = None,
    samples: int = 100_000,
    seed: int = 0,
    threads: Optional[int] = None,
) -> PsiTable:
    """Monte Carlo tabulation of psi', psi'' (and integrated psi) on a grid.

    Deterministic given (seed, grid, samples): every (grid point, batch)
    pair draws from its own seeded stream, so the thread count does not
    change the result.
    """
    if not 1 <= n <= _MAX_TABULATION_N:
        raise ValueError(f"tabulation supports 1 <= n <= {_MAX_TABULATION_N}")
    if samples < _MIN_SAMPLES:
        raise ValueError(f"samples must be >= {_MIN_SAMPLES}")
    eta = np.sort(np.asarray(default_eta_grid() if eta_grid is None else eta_grid, float))
    if np.any(eta >= 0.0):
        raise ValueError("all eta must be negative")

    counts = np.full(_BATCHES, samples // _BATCHES)
    counts[: samples % _BATCHES] += 1
    tasks = [
        (ip, b, int(counts[b]), np.random.SeedSequence((seed, ip, b)))
        for ip in range(eta.size)
        for b in range(_BATCHES)
    ]

    def run(task):
        ip, b, count, seq = task
        return ip, b, _batch_moments(n, float(eta[ip]), count, seq)

    workers = resolve_threads(threads)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, tasks))
    else:
        results = [run(task) for task in tasks]

    log_mass = np.empty((eta.size, _BATCHES))
    first = np.empty((eta.size, _BATCHES))
    second = np.empty((eta.size, _BATCHES))
    for ip, b, (mass, m1, m2) in results:
        log_mass[ip, b], first[ip, b], second[ip, b] = mass, m1, m2

    weights = np.exp(log_mass - log_mass.max(axis=1, keepdims=True))
    weights /= weights.sum(axis=1, keepdims=True)
    psi_p = (weights * first).sum(axis=1)
    psi_pp = (weights * second).sum(axis=1) - psi_p**2
    batch_var = second - first**2
    stderr_p = first.std(axis=1, ddof=1) / math.sqrt(_BATCHES)
    stderr_pp = batch_var.std(axis=1, ddof=1) / math.sqrt(_BATCHES)

    psi = np.concatenate([[0.0], np.cumsum(np.diff(eta) * (psi_p[1:] + psi_p[:-1]) / 2.0)])
    return PsiTable(
        n=n,
        eta=eta,
        psi=psi,
        psi_p=psi_p,
        psi_pp=psi_pp,
        stderr_psi_p=stderr_p,
        stderr_psi_pp=stderr_pp,
        samples=samples,
        seed=seed,
    )


# -- the model -----------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class RGaussModel:
    n: int
    psi_table: PsiTable

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.psi_table.n != self.n:
            raise ValueError("psi table was tabulated for a different n")

    @property
    def sp_dim(self) -> int:
        return self.n * (self.n + 1) // 2 - 1

    def eta_of_sigma(self, sigma: float) -> float:
        if sigma <= 0.0:
            raise ValueError("sigma must be > 0")
        return -1.0 / (2.0 * sigma**2)

    def psi2_p_at(self, eta: float) -> float:
        """psi_2'(eta) = psi'(eta) - psi_1'(eta), psi_1' = -1/(2 eta)."""
        return self.psi_table.psi_p_at(eta) + 1.0 / (2.0 * eta)


def tabulated_model(
    n: int,
    eta_grid: Optional[Sequence[float]] = None,
    samples: int = 100_000,
    seed: int = 0,
    threads: Optional[int] = None,
) -> RGaussModel:
    return RGaussModel(n, tabulate_psi(n, eta_grid, samples, seed, threads))


@dataclasses.dataclass(frozen=True)
class MahalanobisCoeffs:
    """Squared warping coefficients of the fixed-sigma extrinsic metric."""

    beta1_sq: float
    _beta2: Optional[float]

    @property
    def beta2_sq(self) -> float:
        if self._beta2 is None:
            raise ValueError("n = 1: the unit-determinant factor is a point")
        return self._beta2


def mahalanobis_coeffs(model: RGaussModel, sigma: float) -> MahalanobisCoeffs:
    eta = model.eta_of_sigma(sigma)
    model.psi_table._check_range(eta)
    beta1_sq = -2.0 * eta
    if model.n == 1:
        return MahalanobisCoeffs(beta1_sq, None)
    beta2_sq = 8.0 * eta**2 * model.psi2_p_at(eta) / (model.n**2 + model.n - 2)
    return MahalanobisCoeffs(beta1_sq, beta2_sq)


def rgauss_fisher_metric(
    model: RGaussModel,
    xbar: np.ndarray,
    eta: float,
    u_eta: float,
    u: np.ndarray,
) -> float:
    """Squared Fisher norm of U = u_eta d/deta + u at z = (xbar, eta)."""
    table = model.psi_table
    table._check_range(eta)
    total = table.psi_pp_at(eta) * u_eta**2
    split = derham_split(xbar, np.asarray(u, dtype=float))
    total += -2.0 * eta * affine_metric(xbar, split.u1, split.u1)
    q2 = affine_metric(xbar, split.u2, split.u2)
    if model.n == 1:
        return total
    total += (8.0 * eta**2 * model.psi2_p_at(eta) / (model.n**2 + model.n - 2)) * q2
    return total


def generic_mahalanobis(beta_sigma: float, base_distance: float) -> float:
    """Irreducible-base form: beta(sigma) times the base distance. With
    beta = 1/sigma and a Euclidean base this is the classical Mahalanobis
    distance."""
    if beta_sigma < 0.0 or base_distance < 0.0:
        raise ValueError("inputs must be nonnegative")
    return beta_sigma * base_distance


def generalized_mahalanobis(
    model: RGaussModel, xbar: np.ndarray, ybar: np.ndarray, sigma: float
) -> float:
    """Distance induced on P_n by the fixed-sigma restriction of the
    Fisher metric:

        d^2(x, y | sigma) = |tau_x - tau_y|^2 / (n sigma^2)
                            + beta_2^2(sigma) d^2(s_x, s_y)
    """
    coeffs = mahalanobis_coeffs(model, sigma)
    n = model.n
    zero = np.zeros((n, n))
    sx = derham_split(np.asarray(xbar, dtype=float), zero)
    sy = derham_split(np.asarray(ybar, dtype=float), zero)
    total = (sx.tau - sy.tau) ** 2 / (n * sigma**2)
    if n > 1:
        total += coeffs.beta2_sq * affine_distance(sx.s, sy.s) ** 2
    return math.sqrt(total)


def rgauss_log_density(
    model: RGaussModel, x: np.ndarray, xbar: np.ndarray, sigma: float
) -> float:
    """log p(x | xbar, sigma) up to the tabulated additive constant."""
    eta = model.eta_of_sigma(sigma)
    d2 = affine_distance(x, xbar) ** 2
    return eta * d2 - model.psi_table.psi_at(eta)


def rgauss_profile(model: RGaussModel) -> WarpProfile:
    """Multiply-warped profile over the sigma coordinate.

    alpha(sigma) = sqrt(psi''(eta)) / sigma^3 (chain rule through
    eta = -1/(2 sigma^2)); beta_1 = 1/sigma on the log-determinant line
    and beta_2 on SP_n for n >= 2. Derivatives go through the monotone
    cubic interpolants, so the profile is differentiable on the
    tabulated range.
    """
    table = model.psi_table
    n = model.n

    def eta_of(s: float) -> float:
        return -1.0 / (2.0 * s * s)

    def alpha(s: float) -> float:
        return math.sqrt(table.psi_pp_at(eta_of(s))) / s**3

    def dalpha(s: float) -> float:
        eta = eta_of(s)
        pp = table.psi_pp_at(eta)
        dpp = table.psi_pp_derivative_at(eta)
        # d/ds [pp(eta(s))^{1/2} s^-3], deta/ds = 1/s^3
        return dpp / (2.0 * math.sqrt(pp) * s**6) - 3.0 * math.sqrt(pp) / s**4

    def beta1(s: float) -> float:
        return 1.0 / s

    def dbeta1(s: float) -> float:
        return -1.0 / s**2

    sigma_lo, sigma_hi = float(table.sigma[0]), float(table.sigma[-1])
    if n == 1:
        return WarpProfile(
            alpha=alpha,
            betas=(beta1,),
            block_dims=(1,),
            base_name="spd(1)",
            dalpha=dalpha,
            dbetas=(dbeta1,),
            domain=(sigma_lo, sigma_hi),
        )

    denom = n**2 + n - 2

    def beta2(s: float) -> float:
        eta = eta_of(s)
        return math.sqrt(8.0 * eta**2 * model.psi2_p_at(eta) / denom)

    def dbeta2(s: float) -> float:
        eta = eta_of(s)
        p2 = model.psi2_p_at(eta)
        dp2 = table.psi_p_derivative_at(eta) - 1.0 / (2.0 * eta**2)
        b2_sq = 8.0 * eta**2 * p2 / denom
        # d(b2^2)/ds = 8/denom * (2 eta p2 + eta^2 dp2) * deta/ds
        db2_sq = 8.0 / denom * (2.0 * eta * p2 + eta**2 * dp2) / s**3
        return db2_sq / (2.0 * math.sqrt(b2_sq))

    return WarpProfile(
        alpha=alpha,
        betas=(beta1, beta2),
        block_dims=(1, model.sp_dim),
        base_name=f"spd({n})",
        dalpha=dalpha,
        dbetas=(dbeta1, dbeta2),
        domain=(sigma_lo, sigma_hi),
    )


# -- geodesics ------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class RGaussGeodesic:
    """Geodesic on P_n x (0, inf): SPD points and tangent velocities."""

    t: np.ndarray
    sigma: np.ndarray
    points: list
    velocities: list
    escape: Optional["EscapeEvent"]
    path: "GeodesicPath"


def rgauss_geodesic_problem(
    model: RGaussModel, xbar: np.ndarray, sigma0: float, u_sigma: float, u: np.ndarray
):
    """Initial data (xbar, sigma0) with scale velocity u_sigma and base
    tangent u (symmetric matrix), split into trace and trace-free blocks."""
    from .geodesics import GeodesicProblem
    from .spd import spd_exp

    xbar = np.asarray(xbar, dtype=float)
    split = derham_split(xbar, np.asarray(u, dtype=float))
    q1 = affine_metric(xbar, split.u1, split.u1)
    q2 = affine_metric(xbar, split.u2, split.u2)

    if model.n == 1:
        blocks = (q1,)

        def base_exp(point, factors):
            return spd_exp(xbar, factors[0] * split.u1)

    else:
        blocks = (q1, q2)

        def base_exp(point, factors):
            return spd_exp(xbar, factors[0] * split.u1 + factors[1] * split.u2)

    return GeodesicProblem(
        profile=rgauss_profile(model),
        sigma0=sigma0,
        u_sigma=u_sigma,
        block_norms_sq=blocks,
        base_point=xbar,
        base_exponential=base_exp,
    )


def rgauss_geodesic(
    model: RGaussModel,
    xbar: np.ndarray,
    sigma0: float,
    u_sigma: float,
    u: np.ndarray,
    t_end: float,
    steps: int = 200,
) -> RGaussGeodesic:
    """Solve the geodesic and reconstruct SPD points and velocities.

    x(t) = P exp(W(t)) P with P = xbar^{1/2} and
    W(t) = P^-1 (sum_q F_q(t) u_q) P^-1; the velocity uses the Frechet
    derivative of the matrix exponential.
    """
    import scipy.linalg

    from .geodesics import solve_geodesic
    from .spd import spd_eigh

    xbar = np.asarray(xbar, dtype=float)
    problem = rgauss_geodesic_problem(model, xbar, sigma0, u_sigma, u)
    path = solve_geodesic(problem, t_end, steps)

    w, vecs = spd_eigh(xbar)
    half = (vecs * np.sqrt(w)) @ vecs.T
    inv_half = (vecs / np.sqrt(w)) @ vecs.T
    split = derham_split(xbar, np.asarray(u, dtype=float))
    blocks = [split.u1] if model.n == 1 else [split.u1, split.u2]
    profile = problem.profile
    beta0_sq = [beta(sigma0) ** 2 for beta in profile.betas]

    points, velocities = [], []
    for i, s in enumerate(path.sigma):
        scaled = sum(path.factors[i, k] * blocks[k] for k in range(len(blocks)))
        w_mat = inv_half @ scaled @ inv_half
        w_mat = 0.5 * (w_mat + w_mat.T)
        rates = [b0 / profile.betas[k](float(s)) ** 2 for k, b0 in enumerate(beta0_sq)]
        w_dot = inv_half @ sum(rates[k] * blocks[k] for k in range(len(blocks))) @ inv_half
        w_dot = 0.5 * (w_dot + w_dot.T)
        exp_w, frechet = scipy.linalg.expm_frechet(w_mat, w_dot)
        points.append(half @ exp_w @ half)
        velocities.append(half @ frechet @ half)

    return RGaussGeodesic(
        t=path.t,
        sigma=path.sigma,
        points=points,
        velocities=velocities,
        escape=path.escape,
        path=path,
    )
