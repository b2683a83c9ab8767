"""Batch command-line front end.

Subcommands reproduce the curvature table and curves, tabulate the SPD
normalizer, and compute distances and geodesics. Outputs are delimited
text (csv or dat) with a mandatory header and 12-significant-digit
floats; identical configurations (including seeds) produce byte-identical
files. Report commands also render a PNG figure next to the delimited
output unless --no-plot is given.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 escape event (partial output is still written).

An optional config file (simple key=value lines, # comments) supplies
defaults; command-line flags override it.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from .geodesics import GeodesicError, solve_geodesic
from .rgauss import (
    PsiTable,
    RGaussModel,
    generalized_mahalanobis,
    generic_mahalanobis,
    tabulate_psi,
)
from .spd import NotSpdError, affine_distance
from .vmf import VmfModel, vmf_curvature_profile
from .warped import curvatures, isotropic_normal_profile

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_ESCAPE = 4


class ConfigError(Exception):
    pass


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.12g}"


def write_rows(header, rows, out, fmt) -> None:
    """Delimited output: csv (comma) or dat (whitespace, '#' header)."""
    if fmt == "csv":
        lines = [",".join(header)]
        lines += [",".join(_fmt(v) for v in row) for row in rows]
    else:
        lines = ["# " + " ".join(header)]
        lines += [" ".join(_fmt(v) for v in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _figure_path(out) -> Path:
    return Path(out).with_suffix(".png")


def load_config(path) -> dict:
    values = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        values[key.strip().lower().replace("-", "_")] = value.strip()
    return values


def _coerce(key, text, kind):
    try:
        if kind is bool:
            lowered = text.lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        return kind(text)
    except ValueError as exc:
        raise ConfigError(f"config key {key}: cannot parse {text!r}") from exc


_OPTION_TYPES = {
    "model": str,
    "n": int,
    "n_min": int,
    "n_max": int,
    "grid_min": float,
    "grid_max": float,
    "grid_count": int,
    "grid_log": bool,
    "samples": int,
    "seed": int,
    "sigma": float,
    "out": str,
    "format": str,
    "plot": bool,
    "psi_table": str,
    "u_sigma": float,
    "u_base": str,
    "t_end": float,
    "steps": int,
}


def resolve(args, config, key, default):
    value = getattr(args, key, None)
    if value is None and key in config:
        value = _coerce(key, config[key], _OPTION_TYPES.get(key, str))
    return default if value is None else value


def build_grid(lo, hi, count, log) -> np.ndarray:
    if count < 2:
        raise ConfigError("grid count must be >= 2")
    if not 0 < lo < hi:
        raise ConfigError("need 0 < grid-min < grid-max")
    return np.geomspace(lo, hi, count) if log else np.linspace(lo, hi, count)


def read_matrix_file(path) -> np.ndarray:
    """Whitespace-separated floats; square matrices are reshaped n x n,
    anything else is kept as a flat vector."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read matrix file {path}: {exc}") from exc
    try:
        values = np.array([float(tok) for tok in text.split()])
    except ValueError as exc:
        raise ConfigError(f"malformed matrix file {path}: {exc}") from exc
    if values.size == 0:
        raise ConfigError(f"matrix file {path} is empty")
    side = int(round(math.isqrt(values.size)))
    if side * side == values.size and side > 1:
        return values.reshape(side, side)
    return values


def _load_psi_model(args, config, n) -> RGaussModel:
    table_path = resolve(args, config, "psi_table", None)
    if table_path is not None:
        return RGaussModel(n, PsiTable.from_csv(table_path, n=n))
    samples = resolve(args, config, "samples", 100_000)
    seed = resolve(args, config, "seed", 0)
    return RGaussModel(n, tabulate_psi(n, samples=samples, seed=seed))


# -- subcommands -----------------------------------------------------------------

def cmd_table1(args, config) -> int:
    n_min = resolve(args, config, "n_min", 2)
    n_max = resolve(args, config, "n_max", 8)
    if not 2 <= n_min <= n_max:
        raise ConfigError("need 2 <= n-min <= n-max")
    grid = build_grid(
        resolve(args, config, "grid_min", 0.05),
        resolve(args, config, "grid_max", 200.0),
        resolve(args, config, "grid_count", 120),
        resolve(args, config, "grid_log", True),
    )
    rows = []
    for n in range(n_min, n_max + 1):
        profile = vmf_curvature_profile(VmfModel(n), grid)
        rows.append(
            (n, profile.plateau_surface, profile.plateau_radial, profile.plateau_spread)
        )
    out = resolve(args, config, "out", None)
    write_rows(
        ("n", "Ks_inf", "Kr_inf", "plateau_spread"),
        rows,
        out,
        resolve(args, config, "format", "csv"),
    )
    if out is not None and resolve(args, config, "plot", True):
        from .plotting import save_table_figure

        ns = [row[0] for row in rows]
        save_table_figure(ns, [r[1] for r in rows], [r[2] for r in rows], _figure_path(out))
    return EXIT_OK if all(row[3] <= 0.01 for row in rows) else EXIT_NUMERICAL


def cmd_curvature(args, config) -> int:
    model_name = resolve(args, config, "model", "vmf")
    n = resolve(args, config, "n", 3)
    if model_name == "vmf":
        grid = build_grid(
            resolve(args, config, "grid_min", 0.05),
            resolve(args, config, "grid_max", 200.0),
            resolve(args, config, "grid_count", 100),
            resolve(args, config, "grid_log", True),
        )
        profile = vmf_curvature_profile(VmfModel(n), grid)
        rows = list(zip(grid, profile.k_surface, profile.k_radial))
        label = "eta"
    elif model_name == "isonormal":
        grid = build_grid(
            resolve(args, config, "grid_min", 0.1),
            resolve(args, config, "grid_max", 10.0),
            resolve(args, config, "grid_count", 50),
            resolve(args, config, "grid_log", True),
        )
        profile = isotropic_normal_profile(n)
        pairs = [curvatures(profile, 0.0, float(s)) for s in grid]
        rows = [(s, ks, kr) for s, (ks, kr) in zip(grid, pairs)]
        label = "sigma"
    else:
        raise ConfigError(f"curvature supports models vmf | isonormal, got {model_name!r}")
    out = resolve(args, config, "out", None)
    write_rows((label, "Ks", "Kr"), rows, out, resolve(args, config, "format", "csv"))
    if out is not None and resolve(args, config, "plot", True):
        from .plotting import save_curvature_figure

        save_curvature_figure(
            grid, [r[1] for r in rows], [r[2] for r in rows], _figure_path(out), label
        )
    return EXIT_OK


def cmd_psi_table(args, config) -> int:
    n = resolve(args, config, "n", 2)
    sigmas = build_grid(
        resolve(args, config, "grid_min", 0.05),
        resolve(args, config, "grid_max", 5.0),
        resolve(args, config, "grid_count", 40),
        resolve(args, config, "grid_log", True),
    )
    table = tabulate_psi(
        n,
        eta_grid=-1.0 / (2.0 * sigmas**2),
        samples=resolve(args, config, "samples", 100_000),
        seed=resolve(args, config, "seed", 0),
    )
    out = resolve(args, config, "out", None)
    if out is None:
        sys.stdout.write(table.to_csv_text())
    else:
        table.to_csv(out)
        if resolve(args, config, "plot", True):
            from .plotting import save_psi_figure

            save_psi_figure(table.sigma, table.psi_p, table.psi_pp, _figure_path(out))
    return EXIT_OK


def cmd_distance(args, config) -> int:
    model_name = resolve(args, config, "model", "rgauss")
    sigma = resolve(args, config, "sigma", 1.0)
    if sigma <= 0:
        raise ConfigError("sigma must be > 0")
    x = read_matrix_file(args.file_x)
    y = read_matrix_file(args.file_y)
    if x.shape != y.shape:
        raise ConfigError(f"shape mismatch: {x.shape} vs {y.shape}")

    if model_name == "isonormal":
        x, y = x.ravel(), y.ravel()
        base = float(np.linalg.norm(x - y))
        maha = generic_mahalanobis(1.0 / sigma, base)
        rows = [("euclidean", base), ("mahalanobis", maha)]
    elif model_name == "rgauss":
        if x.ndim != 2:
            raise ConfigError("rgauss distance needs square matrix files")
        model = _load_psi_model(args, config, x.shape[0])
        base = affine_distance(x, y)
        maha = generalized_mahalanobis(model, x, y, sigma)
        rows = [("affine", base), ("mahalanobis", maha)]
    else:
        raise ConfigError(f"distance supports models rgauss | isonormal, got {model_name!r}")

    for name, value in rows:
        sys.stdout.write(f"{name} {_fmt(value)}\n")
    out = resolve(args, config, "out", None)
    if out is not None:
        write_rows(("metric", "value"), rows, out, resolve(args, config, "format", "csv"))
    return EXIT_OK


def _geodesic_outputs(args, config):
    """Dispatch to the owning model; returns (path-like record, flatten,
    labels, escape)."""
    model_name = resolve(args, config, "model", "vmf")
    n = resolve(args, config, "n", 3)
    sigma0 = resolve(args, config, "sigma", 1.0)
    u_sigma = resolve(args, config, "u_sigma", 0.0)
    base_raw = resolve(args, config, "u_base", "0")
    try:
        u_base = [float(tok) for tok in str(base_raw).split(",")]
    except ValueError as exc:
        raise ConfigError(f"cannot parse --u-base {base_raw!r}") from exc
    t_end = resolve(args, config, "t_end", 1.0)
    steps = resolve(args, config, "steps", 200)

    if model_name == "vmf":
        from .vmf import vmf_geodesic

        model = VmfModel(n)
        z0 = np.zeros(n)
        z0[0] = sigma0
        u0 = np.zeros(n)
        u0[0] = u_sigma
        if u_base[0] != 0.0:
            u0[1] = sigma0 * u_base[0]  # chart velocity of a unit base tangent
        geo = vmf_geodesic(model, z0, u0, t_end, steps)
        labels = [f"z{i+1}" for i in range(n)]
        record = _SampledPath(geo.t, geo.eta, geo.r, list(geo.z))
        return record, list, labels, geo.escape

    if model_name == "isonormal":
        from .geodesics import isonormal_geodesic_problem

        u = np.zeros(n)
        u[0] = u_base[0]
        problem = isonormal_geodesic_problem(n, np.zeros(n), sigma0, u_sigma, u)
        path = solve_geodesic(problem, t_end, steps)
        labels = [f"x{i+1}" for i in range(n)]
        record = _SampledPath(path.t, path.sigma, path.r, path.base_points)
        return record, list, labels, path.escape

    if model_name == "rgauss":
        from .rgauss import rgauss_geodesic

        model = _load_psi_model(args, config, n)
        xbar = np.eye(n)
        u1 = np.eye(n) / math.sqrt(n)  # unit-norm trace direction
        u2 = np.zeros((n, n))
        if n > 1:
            u2[0, 0], u2[1, 1] = 1.0, -1.0
            u2 /= math.sqrt(2.0)  # unit-norm trace-free direction
        u = u_base[0] * u1 + (u_base[1] * u2 if len(u_base) > 1 else 0.0)
        geo = rgauss_geodesic(model, xbar, sigma0, u_sigma, u, t_end, steps)
        iu, ju = np.triu_indices(n)
        labels = [f"p{i+1}{j+1}" for i, j in zip(iu, ju)]

        def flatten(point):
            return list(np.asarray(point)[iu, ju])

        record = _SampledPath(geo.t, geo.sigma, geo.path.r, geo.points)
        return record, flatten, labels, geo.escape

    raise ConfigError(f"geodesic supports models vmf | rgauss | isonormal, got {model_name!r}")


class _SampledPath:
    def __init__(self, t, sigma, r, base_points):
        self.t = t
        self.sigma = sigma
        self.r = r
        self.base_points = base_points


def cmd_geodesic(args, config) -> int:
    record, flatten, labels, escape = _geodesic_outputs(args, config)
    fmt = resolve(args, config, "format", "csv")
    header = ["t", "sigma", "r", *labels]
    rows = []
    for i in range(len(record.t)):
        row = [record.t[i], record.sigma[i], record.r[i]]
        row.extend(flatten(record.base_points[i]))
        rows.append(row)
    out = resolve(args, config, "out", None)
    write_rows(header, rows, out, fmt)
    if out is not None and resolve(args, config, "plot", True):
        from .plotting import save_geodesic_figure

        save_geodesic_figure(record.t, record.sigma, record.r, _figure_path(out))
    if escape is not None:
        sys.stderr.write(f"escape: {escape.reason} at t={escape.time:.6g}\n")
        return EXIT_ESCAPE
    return EXIT_OK


# -- argument parsing --------------------------------------------------------------

def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key=value config file (flags override it)")
    parser.add_argument("--model", choices=["vmf", "rgauss", "isonormal"])
    parser.add_argument("--n", type=int, help="ambient/matrix dimension")
    parser.add_argument("--grid-min", type=float)
    parser.add_argument("--grid-max", type=float)
    parser.add_argument("--grid-count", type=int)
    parser.add_argument(
        "--grid-log",
        action=argparse.BooleanOptionalAction,
        help="geometric grid spacing (default)",
    )
    parser.add_argument("--samples", type=int, help="Monte Carlo sample budget (>= 1e4)")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--sigma", type=float)
    parser.add_argument("--out", help="output file (stdout when omitted)")
    parser.add_argument("--format", choices=["csv", "dat"])
    parser.add_argument(
        "--plot",
        action=argparse.BooleanOptionalAction,
        help="render a PNG next to --out (default on)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="infogeo",
        description="Warped Fisher metrics: curvature tables and curves, SPD "
        "normalizer tabulation, generalized Mahalanobis distances, geodesics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "table1",
        help="large-scale curvature limits of the sphere model for a range of n "
        "(columns: n, Ks_inf, Kr_inf, plateau_spread)",
    )
    _add_common(p)
    p.add_argument("--n-min", type=int)
    p.add_argument("--n-max", type=int)
    p.set_defaults(handler=cmd_table1)

    p = sub.add_parser(
        "curvature",
        help="surface/radial curvature over a scale grid "
        "(columns: eta|sigma, Ks, Kr)",
    )
    _add_common(p)
    p.set_defaults(handler=cmd_curvature)

    p = sub.add_parser(
        "psi-table",
        help="Monte Carlo tabulation of the SPD normalizer derivatives "
        "(columns: eta, sigma, psi, psi_p, psi_pp, stderr_psi_p, "
        "stderr_psi_pp, samples, seed); INFOGEO_THREADS caps parallelism",
    )
    _add_common(p)
    p.set_defaults(handler=cmd_psi_table)

    p = sub.add_parser(
        "distance",
        help="affine and generalized Mahalanobis distances between two points "
        "read from whitespace-separated files",
    )
    _add_common(p)
    p.add_argument("file_x", help="first point (n x n floats, or a flat vector)")
    p.add_argument("file_y", help="second point")
    p.add_argument("--psi-table", help="tabulated normalizer CSV (else tabulate now)")
    p.set_defaults(handler=cmd_distance)

    p = sub.add_parser(
        "geodesic",
        help="solve a geodesic and write the sampled path "
        "(columns: t, sigma, r, then the flattened base point)",
    )
    _add_common(p)
    p.add_argument("--psi-table", help="tabulated normalizer CSV for --model rgauss")
    p.add_argument("--u-sigma", type=float, help="initial scale velocity")
    p.add_argument(
        "--u-base",
        help="comma-separated base-tangent norms, one per block "
        "(vmf/isonormal: 1 value; rgauss: trace and trace-free)",
    )
    p.add_argument("--t-end", type=float)
    p.add_argument("--steps", type=int)
    p.set_defaults(handler=cmd_geodesic)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config) if args.config else {}
        return args.handler(args, config)
    except ConfigError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONFIG
    except (ValueError, NotSpdError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONFIG
    except (GeodesicError, np.linalg.LinAlgError, RuntimeError) as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
