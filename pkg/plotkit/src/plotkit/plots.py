"""Figure builders: refinement overlays, the (tau, e) entropy plane with its
isentrope curve, and 2D pseudocolor maps.

Everything is read-only over the input CSVs and deterministic for fixed
inputs and style settings.
"""

from __future__ import annotations

from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import FieldTable, read_table, require_same_problem

__all__ = ["ProfileSet", "plot_profiles", "plot_entropy_plane", "plot_field2d",
           "entropy_scatter_deviation"]

QUANTITIES = ("rho", "p", "e", "sigma", "v")

_STYLE = {"figure.figsize": (7.0, 4.5), "figure.dpi": 110, "axes.grid": True,
          "grid.alpha": 0.3, "legend.frameon": False}


@dataclass
class ProfileSet:
    """Labeled field CSVs to overlay for one quantity."""

    entries: list  # (label, path) pairs
    quantity: str = "rho"
    xlim: tuple | None = None
    ylim: tuple | None = None

    def load(self):
        if not self.entries:
            raise ValueError("empty profile set")
        if self.quantity not in QUANTITIES:
            raise ValueError(f"unknown quantity {self.quantity!r}; expected one of {QUANTITIES}")
        tables = [(label, read_table(path)) for label, path in self.entries]
        require_same_problem([t for _, t in tables])
        for _, t in tables:
            if self.quantity not in t:
                raise ValueError(f"column {self.quantity!r} missing")
        return tables


def plot_profiles(profile_set: ProfileSet, out_path):
    """Overlay one quantity from several runs (refinement comparisons)."""
    tables = profile_set.load()
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        for label, table in tables:
            ax.plot(table["x"], table[profile_set.quantity], lw=1.2, label=label)
        first = tables[0][1]
        ax.set_xlabel("x [mm]")
        ax.set_ylabel(profile_set.quantity)
        ax.set_title(f"{first.problem} at t = {first.time:g}")
        if profile_set.xlim:
            ax.set_xlim(*profile_set.xlim)
        if profile_set.ylim:
            ax.set_ylim(*profile_set.ylim)
        ax.legend()
        fig.savefig(out_path)
        plt.close(fig)
    return out_path


def entropy_scatter_deviation(fields_table: FieldTable, curve_table) -> float:
    """max |e - curve(tau)| / max(1, |curve|) over the nodal scatter."""
    tau = 1.0 / fields_table["rho"]
    e = fields_table["e"]
    curve_e = np.interp(tau, curve_table["tau"], curve_table["e"])
    return float(np.max(np.abs(e - curve_e) / np.maximum(1.0, np.abs(curve_e))))


def plot_entropy_plane(fields_csv, isentrope_csv, out_path):
    """Nodal (tau, e) scatter over the minimum-entropy isentrope curve."""
    fields = read_table(fields_csv)
    curve = read_table(isentrope_csv)
    if "tau" not in curve or "e" not in curve:
        raise ValueError(f"{isentrope_csv}: not an isentrope curve file")
    tau = 1.0 / fields["rho"]
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        ax.plot(curve["tau"], curve["e"], "k-", lw=1.5, label="isentrope")
        ax.scatter(tau, fields["e"], s=6, color="tab:red", zorder=3,
                   label=f"states at t = {fields.time:g}")
        ax.set_xlabel("specific volume tau [cm^3/g]")
        ax.set_ylabel("specific internal energy e [kJ/g]")
        ax.set_xlim(float(np.min(tau)) * 0.95, float(np.max(tau)) * 1.05)
        pad = 0.2 * (float(np.max(fields["e"])) - float(np.min(fields["e"])) + 1e-3)
        ax.set_ylim(float(np.min(fields["e"])) - pad, float(np.max(fields["e"])) + pad)
        ax.set_title(fields.problem)
        ax.legend()
        fig.savefig(out_path)
        plt.close(fig)
    return out_path


def plot_field2d(fields_csv, out_path, quantity="rho"):
    """Pseudocolor map of one quantity on a structured 2D grid."""
    table = read_table(fields_csv)
    if table.dim != 2:
        raise ValueError(f"{fields_csv}: not a 2D field file")
    if quantity not in table:
        raise ValueError(f"column {quantity!r} missing")
    nx, ny = table.grid_shape()
    x = table["x"].reshape(nx, ny)
    y = table["y"].reshape(nx, ny)
    z = table[quantity].reshape(nx, ny)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(6.0, 5.0))
        mesh = ax.pcolormesh(x, y, z, shading="nearest", cmap="viridis")
        fig.colorbar(mesh, ax=ax, label=quantity)
        ax.set_xlabel("x [mm]")
        ax.set_ylabel("y [mm]")
        ax.set_aspect("equal")
        ax.set_title(f"{table.problem}: {quantity} at t = {table.time:g}")
        fig.savefig(out_path)
        plt.close(fig)
    return out_path
