"""Figure rendering for the CLI report paths.

Each writer takes already-computed arrays and saves a PNG next to the
delimited output. Rendering is presentation-only; every figure has a CSV
twin carrying the same numbers.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def save_curvature_figure(etas, k_surface, k_radial, path, label="eta") -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.semilogx(etas, k_surface, label="surface curvature", color="tab:blue")
    ax.semilogx(etas, k_radial, label="radial curvature", color="tab:red", ls="--")
    ax.axhline(0.0, color="gray", lw=0.6)
    ax.set_xlabel(label)
    ax.set_ylabel("sectional curvature")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_table_figure(ns, k_surface, k_radial, path) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(ns, k_surface, "o-", label="surface limit", color="tab:blue")
    ax.plot(ns, k_radial, "s--", label="radial limit", color="tab:red")
    ax.set_xlabel("ambient dimension n")
    ax.set_ylabel("large-scale curvature limit")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_psi_figure(sigma, psi_p, psi_pp, path) -> None:
    fig, axes = plt.subplots(1, 2, figsize=(9.0, 4.0))
    axes[0].loglog(sigma, psi_p, color="tab:blue")
    axes[0].set_xlabel("sigma")
    axes[0].set_ylabel("mean squared distance")
    axes[1].loglog(sigma, psi_pp, color="tab:red")
    axes[1].set_xlabel("sigma")
    axes[1].set_ylabel("variance of squared distance")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_geodesic_figure(t, sigma, r, path) -> None:
    fig, axes = plt.subplots(1, 2, figsize=(9.0, 4.0))
    axes[0].plot(t, sigma, color="tab:blue")
    axes[0].set_xlabel("t")
    axes[0].set_ylabel("scale")
    axes[1].plot(t, r, color="tab:red")
    axes[1].set_xlabel("t")
    axes[1].set_ylabel("vertical distance from start")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
