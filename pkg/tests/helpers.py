"""Shared test utilities: admissible-state samplers and independent oracles.

The oracles here deliberately avoid the code paths they check: the classical
stiffened-gas star-pressure solver uses the textbook two-branch functions
with a general exponent, and the isentrope tracer integrates de/dtau = -p
with a fixed-step RK4.
"""

import numpy as np

from eulerkit.eos import DavisReactant, SimpleMacaw
from eulerkit.scheme import ConservedState, FieldState
from eulerkit.wavespeed import SideData


def sample_admissible(model, rng, n, tau_span=(0.45, 2.2), e_excess=(1e-3, 5.0)):
    """Random (tau, e) above the model's energy floor, log-spread in tau."""
    if isinstance(model, (SimpleMacaw, DavisReactant)):
        tau_ref = model.params.tau0
    else:
        tau_ref = 1.0
    tau = tau_ref * np.exp(rng.uniform(np.log(tau_span[0]), np.log(tau_span[1]), n))
    e = np.asarray(model.cold_energy(tau)) + rng.uniform(*e_excess, n)
    return tau, e


def sample_side_data(model, rng, n, mach=3.0, **kw):
    """Random SideData arrays with velocities up to +-mach sound speeds."""
    tau, e = sample_admissible(model, rng, n, **kw)
    p = np.asarray(model.pressure(tau, e))
    kk = np.asarray(model.bulk_modulus(tau, e))
    c = np.sqrt(tau * kk)
    v = rng.uniform(-mach, mach, n) * c
    return SideData(rho=1.0 / tau, tau=tau, v_n=v, p=p, bulk_k=kk, c=c, p_inf=kk - p)


def side_at(side: SideData, i) -> SideData:
    return SideData(*(np.asarray(getattr(side, f))[i] for f in
                      ("rho", "tau", "v_n", "p", "bulk_k", "c", "p_inf")))


def random_field(model, rng, n, dim=1, mach=1.5, **kw):
    """Random admissible FieldState on n nodes."""
    tau, e = sample_admissible(model, rng, n, **kw)
    rho = 1.0 / tau
    kk = np.asarray(model.bulk_modulus(tau, e))
    c = np.sqrt(tau * kk)
    v = rng.uniform(-mach, mach, (dim, n)) * c
    mom = rho * v
    en = rho * e + 0.5 * rho * np.sum(v * v, axis=0)
    return FieldState(rho, np.ascontiguousarray(mom), en, 0.0)


def conserved(model, rho, v, p) -> ConservedState:
    v = np.atleast_1d(np.asarray(v, dtype=np.float64))
    e = float(np.asarray(model.energy_from_pressure(1.0 / rho, p)))
    return ConservedState(rho=rho, momentum=rho * v, energy=rho * e + 0.5 * rho * float(v @ v))


def trace_isentrope(model, tau0, e0, tau1, step_frac=1e-4):
    """Integrate de/dtau = -p(tau, e) from (tau0, e0) to tau1 with RK4.

    Returns (tau_path, e_path) including both endpoints.  The step is
    ``step_frac`` of the reference volume, fixed, sign-adjusted.
    """
    href = step_frac * (model.params.tau0 if hasattr(model, "params") and hasattr(model.params, "tau0") else tau0)
    n = max(2, int(np.ceil(abs(tau1 - tau0) / href)))
    h = (tau1 - tau0) / n
    taus = np.empty(n + 1)
    es = np.empty(n + 1)
    taus[0] = tau0
    es[0] = e0
    t, e = tau0, e0

    def f(tt, ee):
        return -float(np.asarray(model.pressure(tt, ee)))

    for k in range(n):
        k1 = f(t, e)
        k2 = f(t + 0.5 * h, e + 0.5 * h * k1)
        k3 = f(t + 0.5 * h, e + 0.5 * h * k2)
        k4 = f(t + h, e + h * k3)
        e = e + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t = t + h
        taus[k + 1] = t
        es[k + 1] = e
    return taus, es


def classical_stiffened_p_star(rho_l, v_l, p_l, pinf_l, rho_r, v_r, p_r, pinf_r, gamma,
                               tol=1e-14, max_iter=200):
    """Textbook two-branch exact star pressure for a stiffened gas.

    Expansion branch uses expm1/log1p so the solver stays accurate down to
    gamma -> 1, where it limits to the degenerate-exponent wave functions.
    """

    def f_one(p, rho, pz, pinf):
        a = np.sqrt(gamma * (pz + pinf) / rho)  # sound speed
        if p > pz:
            big_a = 2.0 / ((gamma + 1.0) * rho)
            big_b = (gamma - 1.0) / (gamma + 1.0) * (pz + pinf)
            return (p - pz) * np.sqrt(big_a / (p + pinf + big_b))
        expo = (gamma - 1.0) / (2.0 * gamma)
        return 2.0 * a / (gamma - 1.0) * np.expm1(expo * np.log((p + pinf) / (pz + pinf)))

    def phi(p):
        return f_one(p, rho_l, p_l, pinf_l) + f_one(p, rho_r, p_r, pinf_r) + (v_r - v_l)

    lo = -min(pinf_l, pinf_r)
    span = max(p_l + pinf_l, p_r + pinf_r)
    lo = lo + 1e-14 * span
    hi = max(p_l, p_r) + span
    while phi(hi) < 0.0:
        hi = lo + 2.0 * (hi - lo)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if phi(mid) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * max(1.0, abs(mid)):
            break
    return 0.5 * (lo + hi)
