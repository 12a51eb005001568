"""Headless figure rendering for the command line tasks.

Each function takes precomputed arrays plus a destination path, draws
one PNG with the Agg backend, and returns the path.  Nothing here feeds
back into the numerics; figures are a convenience companion to the
delimited artifacts, not part of the data contract.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_DPI = 160


def _save(fig, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)
    return path


def greens_dump_figure(matrix, z_nm, field, interfaces_nm, path) -> Path:
    fig, (left, right) = plt.subplots(1, 2, figsize=(10.0, 4.0))
    image = left.imshow(np.abs(matrix), cmap="viridis")
    left.set_xlabel("resonant layer")
    left.set_ylabel("resonant layer")
    left.set_title("|Green's function| (nm$^{-1}$)")
    fig.colorbar(image, ax=left, fraction=0.046)

    for z in interfaces_nm:
        right.axvline(z, color="0.88", lw=0.6, zorder=0)
    right.plot(z_nm, np.abs(field), color="C0", lw=1.0)
    right.set_xlabel("depth (nm)")
    right.set_ylabel("|field| / |incoming|")
    right.set_title("driven field profile")
    return _save(fig, path)


def matrix_figure(matrix, path, label: str) -> Path:
    fig, ax = plt.subplots(figsize=(5.2, 4.2))
    image = ax.imshow(np.abs(matrix), cmap="viridis")
    ax.set_xlabel("resonant layer")
    ax.set_ylabel("resonant layer")
    ax.set_title(label)
    fig.colorbar(image, ax=ax, fraction=0.046)
    return _save(fig, path)


def eigen_figure(eigenvalues, edge_weights, path) -> Path:
    fig, ax = plt.subplots(figsize=(5.6, 4.2))
    points = ax.scatter(
        np.real(eigenvalues),
        np.imag(eigenvalues),
        c=np.asarray(edge_weights),
        cmap="plasma",
        vmin=0.0,
        vmax=1.0,
        s=42,
        edgecolors="0.3",
        linewidths=0.5,
    )
    fig.colorbar(points, ax=ax, label="edge weight")
    ax.set_xlabel("Re eigenvalue (linewidths)")
    ax.set_ylabel("Im eigenvalue (linewidths)")
    ax.set_title("decay modes")
    return _save(fig, path)


def phase_figure(d_v_nm, d_w_nm, winding, defined, path) -> Path:
    fig, ax = plt.subplots(figsize=(5.2, 4.4))
    # flagged points show through as the axes background
    ax.set_facecolor("0.75")
    grid = np.ma.masked_array(winding, mask=~np.asarray(defined))
    mesh = ax.pcolormesh(
        d_v_nm,
        d_w_nm,
        grid.T,
        cmap="coolwarm",
        vmin=0.0,
        vmax=1.0,
        shading="nearest",
    )
    bar = fig.colorbar(mesh, ax=ax, ticks=[0, 1])
    bar.set_label("winding number")
    ax.set_xlabel("d_v (nm)")
    ax.set_ylabel("d_w (nm)")
    return _save(fig, path)


def reflectivity_figure(detuning, reflectivity, baseline, path) -> Path:
    fig, ax = plt.subplots(figsize=(5.8, 4.0))
    ax.plot(detuning, reflectivity, color="C0", lw=1.2)
    ax.axhline(baseline, color="0.55", ls="--", lw=0.9)
    ax.set_xlabel("detuning (linewidths)")
    ax.set_ylabel("reflectivity")
    return _save(fig, path)


def sweep_figure(ratio, re_values, edge_weights, path) -> Path:
    fig, ax = plt.subplots(figsize=(5.8, 4.2))
    points = ax.scatter(
        ratio,
        re_values,
        c=edge_weights,
        cmap="plasma",
        vmin=0.0,
        vmax=1.0,
        s=7,
    )
    fig.colorbar(points, ax=ax, label="edge weight")
    ax.set_xlabel("d_v / d_w")
    ax.set_ylabel("Re eigenvalue (linewidths)")
    return _save(fig, path)
