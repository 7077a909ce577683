"""Invariant checkers: admissible-set membership and the local minimum
principle on the entropy surrogate.

These are reporting tools, not gates: they never raise on a failing field.
Entropy comparisons use the model's entropy-like value, which orders states
exactly as the physical specific entropy does, so minimum-principle
statements are unchanged by the reparameterization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eos import ADMISSIBILITY_RTOL, EosModel
from .scheme import FieldState, Mesh

__all__ = ["AdmissibilityReport", "check_admissible", "MinPrincipleReport", "check_local_min_principle"]

# slack for minimum-principle margins, scaled by the sigma magnitude
MIN_PRINCIPLE_RTOL = 1e-9


@dataclass(frozen=True)
class AdmissibilityReport:
    ok: bool
    worst_node: int
    min_rho: float
    min_excess_energy: float
    min_sigma: float
    rho_floor: float
    energy_tolerance: float

    def to_dict(self):
        return {
            "ok": self.ok,
            "worst_node": self.worst_node,
            "min_rho": self.min_rho,
            "min_excess_energy": self.min_excess_energy,
            "min_sigma": self.min_sigma,
            "rho_floor": self.rho_floor,
            "energy_tolerance": self.energy_tolerance,
        }


def check_admissible(model: EosModel, field: FieldState, sigma_floor: float | None = None) -> AdmissibilityReport:
    """Node-wise admissibility: rho > 0 and energy above the cold curve.

    With ``sigma_floor`` the check also demands the entropy surrogate stay at
    or above that level (the invariant-region variant of the admissible set);
    raising the floor can only turn passing fields into failing ones.
    """
    rho = np.ravel(field.rho)
    min_rho = float(np.min(rho))
    if min_rho <= 0.0:
        worst = int(np.argmin(rho))
        return AdmissibilityReport(
            ok=False, worst_node=worst, min_rho=min_rho,
            min_excess_energy=float("nan"), min_sigma=float("nan"),
            rho_floor=0.0, energy_tolerance=float("nan"),
        )
    e = np.ravel(field.specific_internal_energy())
    margin = e - np.asarray(model.cold_energy(1.0 / rho))
    tol = ADMISSIBILITY_RTOL * (np.abs(e) + 1.0)
    worst = int(np.argmin(margin + tol))
    sigma = np.asarray(model.sigma_extended(1.0 / rho, e))
    min_sigma = float(np.min(sigma))
    ok = bool(np.all(margin >= -tol))
    if sigma_floor is not None:
        sigma_tol = MIN_PRINCIPLE_RTOL * max(1.0, abs(sigma_floor))
        ok = ok and (min_sigma >= sigma_floor - sigma_tol)
    return AdmissibilityReport(
        ok=ok,
        worst_node=worst,
        min_rho=min_rho,
        min_excess_energy=float(np.min(margin)),
        min_sigma=min_sigma,
        rho_floor=0.0,
        energy_tolerance=float(np.max(tol)),
    )


@dataclass(frozen=True)
class MinPrincipleReport:
    ok: bool
    worst_node: int
    min_margin: float
    tolerance: float

    def to_dict(self):
        return {
            "ok": self.ok,
            "worst_node": self.worst_node,
            "min_margin": self.min_margin,
            "tolerance": self.tolerance,
        }


def _stencil_min(sigma: np.ndarray, mesh: Mesh, periodic: bool) -> np.ndarray:
    """min over {self + axis neighbors} of sigma, truncated at boundaries."""
    out = sigma.copy()
    if mesh.dim == 1:
        if periodic:
            out = np.minimum(out, np.roll(sigma, 1))
            out = np.minimum(out, np.roll(sigma, -1))
        else:
            out[1:] = np.minimum(out[1:], sigma[:-1])
            out[:-1] = np.minimum(out[:-1], sigma[1:])
        return out
    for axis in (0, 1):
        if periodic:
            out = np.minimum(out, np.roll(sigma, 1, axis=axis))
            out = np.minimum(out, np.roll(sigma, -1, axis=axis))
        else:
            lead = [slice(None)] * 2
            lag = [slice(None)] * 2
            lead[axis] = slice(1, None)
            lag[axis] = slice(None, -1)
            out[tuple(lead)] = np.minimum(out[tuple(lead)], sigma[tuple(lag)])
            out[tuple(lag)] = np.minimum(out[tuple(lag)], sigma[tuple(lead)])
    return out


def check_local_min_principle(model: EosModel, before: FieldState, after: FieldState,
                              mesh: Mesh, periodic: bool = False) -> MinPrincipleReport:
    """sigma_i(after) >= min over i's stencil of sigma(before), per node."""
    if before.rho.shape != after.rho.shape:
        raise ValueError("field shapes differ")
    sig_before = np.asarray(model.sigma_extended(1.0 / before.rho, before.specific_internal_energy()))
    sig_after = np.asarray(model.sigma_extended(1.0 / after.rho, after.specific_internal_energy()))
    floor = _stencil_min(sig_before, mesh, periodic)
    margin = sig_after - floor
    scale = max(1.0, float(np.max(np.abs(sig_before))))
    tol = MIN_PRINCIPLE_RTOL * scale
    worst = int(np.argmin(margin))
    return MinPrincipleReport(
        ok=bool(np.all(margin >= -tol)),
        worst_node=worst,
        min_margin=float(np.ravel(margin)[worst]),
        tolerance=tol,
    )
