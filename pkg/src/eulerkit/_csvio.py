"""Field CSV emit/ingest.

Layout: a ``#``-prefixed metadata block (key: value per line, the EOS as one
JSON object), one header line, then rows with 17 significant digits so values
round-trip bit-exactly.
"""

from __future__ import annotations

import json

import numpy as np

from .eos import make_model
from .scheme import FieldState, Mesh, make_mesh_1d, make_mesh_2d


def field_columns(model, field: FieldState, mesh: Mesh):
    """(names, columns) for the nodal table; 2D grids are flattened row-major."""
    tau = 1.0 / field.rho
    e = field.specific_internal_energy()
    p = np.asarray(model.pressure(tau, e))
    sigma = np.asarray(model.sigma_extended(tau, e))
    v = field.velocity()
    if mesh.dim == 1:
        x = mesh.axis_centers(0)
        names = ["x", "rho", "v", "p", "e", "sigma"]
        cols = [x, field.rho, v[0], p, e, sigma]
    else:
        xx, yy = mesh.coords()
        names = ["x", "y", "rho", "v", "vy", "p", "e", "sigma"]
        cols = [xx, yy, field.rho, v[0], v[1], p, e, sigma]
    return names, [np.ravel(c) for c in cols]


def write_field_csv(path, model, field: FieldState, mesh: Mesh, problem: str):
    names, cols = field_columns(model, field, mesh)
    meta = {
        "problem": problem,
        "eos": json.dumps(model.params_dict()),
        "t": f"{field.t:.17g}",
        "cells": "x".join(str(s) for s in mesh.shape),
        "dim": str(mesh.dim),
        "domain": " ".join(f"{v:.17g}" for pair in zip(mesh.origin, _domain_hi(mesh)) for v in pair),
    }
    with open(path, "w") as fh:
        for key, val in meta.items():
            fh.write(f"# {key}: {val}\n")
        fh.write(",".join(names) + "\n")
        rows = np.column_stack(cols)
        for row in rows:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def _domain_hi(mesh: Mesh):
    return tuple(o + h * s for o, h, s in zip(mesh.origin, mesh.spacing, mesh.shape))


def read_field_csv(path):
    """Return (meta dict, column dict, model, mesh, FieldState)."""
    meta = {}
    names = None
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, val = line[1:].partition(":")
                meta[key.strip()] = val.strip()
            elif names is None:
                names = line.split(",")
            else:
                rows.append([float(v) for v in line.split(",")])
    data = np.asarray(rows, dtype=np.float64)
    cols = {name: data[:, k] for k, name in enumerate(names)}
    model = make_model(**json.loads(meta["eos"]))
    dim = int(meta["dim"])
    shape = tuple(int(s) for s in meta["cells"].split("x"))
    dom = [float(v) for v in meta["domain"].split()]
    if dim == 1:
        mesh = make_mesh_1d(dom[0], dom[1], shape[0])
        v = cols["v"]
        mom = (cols["rho"] * v)[None, :]
        ke = 0.5 * cols["rho"] * v * v
    else:
        mesh = make_mesh_2d(dom[0], dom[1], dom[2], dom[3], shape[0], shape[1])
        vx = cols["v"].reshape(shape)
        vy = cols["vy"].reshape(shape)
        rho = cols["rho"].reshape(shape)
        mom = np.stack([rho * vx, rho * vy])
        ke = 0.5 * rho * (vx * vx + vy * vy)
    rho = cols["rho"].reshape(shape) if dim == 2 else cols["rho"]
    e = cols["e"].reshape(shape) if dim == 2 else cols["e"]
    energy = rho * e + ke.reshape(shape) if dim == 2 else rho * e + ke
    field = FieldState(rho, np.ascontiguousarray(mom), energy, float(meta["t"]))
    return meta, cols, model, mesh, field
