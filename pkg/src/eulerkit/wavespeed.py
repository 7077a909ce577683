"""Guaranteed wave-speed estimates for the local Riemann problem.

The estimate interpolates the oracle EOS at each Riemann endpoint with a
stiffened gas (matching pressure and bulk modulus exactly) and bounds the
wave fan of the resulting surrogate problem in its degenerate-exponent limit.
The star pressure of the surrogate solves ``phi(p) = 0`` with

    phi(p)  = f_L(p) + f_R(p) + v_R - v_L
    f_Z(p)  = c_Z log((p + pinf_Z)/K_Z)          for p <= p_Z   (expansion)
            = (p - p_Z)/sqrt(rho_Z (p + pinf_Z)) for p >  p_Z   (shock)

with ``pinf_Z = K_Z - p_Z``.  Instead of solving, an analytic upper bound
``p_hat >= p*`` is assembled from the closed-form roots of two lower bounds
of phi (double-expansion and double-shock approximations); plugging any
``p_hat >= p*`` into the one-sided speeds

    lam_L = v_L - c_L sqrt(max((p_hat - p_L)/K_L, 0) + 1)
    lam_R = v_R + c_R sqrt(max((p_hat - p_R)/K_R, 0) + 1)

widens the fan, so ``max(|lam_L|, |lam_R|)`` is a certified bound on the
maximum wave speed.  All functions broadcast over numpy arrays.

Validity note: the bound certifies the surrogate fan exactly; it transfers
the oracle's invariant-domain properties (energy above the cold curve,
entropy floor of the pairwise averages) only while the fundamental
derivative stays at or below ~3/2 across shock-compressed states.  Near the
cold curve of stiff condensed-matter laws G can exceed that, and the
averages may dip below the oracle floor; the scheme-level checkers catch
this at run time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eos import EosModel, InadmissibleStateError

__all__ = [
    "SideData",
    "WaveEstimate",
    "make_side_data",
    "side_data_from_primitive",
    "f_side",
    "phi",
    "p_hat_rr",
    "p_hat_ss",
    "p_star_upper",
    "wave_speeds",
    "estimate",
    "lambda_max",
    "p_star_bisect",
    "stiffened_interpolant",
    "exp_clamp_count",
]

# States thinner than this are treated as vacuum and rejected outright.
VACUUM_RHO = 1e-14

# exp() argument clamp for the double-expansion root; counts clamping events
# so pathological inputs remain observable.
EXP_ARG_MAX = 700.0
exp_clamp_count = 0


class WaveSpeedDomainError(ValueError):
    """Pressure argument at or below the interpolant vacuum bound."""


@dataclass(frozen=True)
class SideData:
    """One side of a local Riemann problem, reduced to the interpolant data.

    Fields may be scalars or equal-shape numpy arrays.  Invariants:
    ``tau = 1/rho``, ``c = sqrt(tau*bulk_k)``, ``p_inf = bulk_k - p`` and
    ``bulk_k > 0``.
    """

    rho: np.ndarray
    tau: np.ndarray
    v_n: np.ndarray
    p: np.ndarray
    bulk_k: np.ndarray
    c: np.ndarray
    p_inf: np.ndarray


@dataclass(frozen=True)
class WaveEstimate:
    p_hat_star: float
    lambda_left: float
    lambda_right: float
    lambda_max: float


def make_side_data(model: EosModel, state, normal) -> SideData:
    """Reduce a conserved state to one-sided Riemann data along ``normal``.

    ``state`` is any object with ``rho``, ``momentum`` (length-d vector) and
    ``energy`` attributes.  ``normal`` must have unit Euclidean length.
    """
    n = np.asarray(normal, dtype=np.float64)
    if abs(float(n @ n) - 1.0) > 1e-12:
        raise ValueError(f"normal must be a unit vector, got {normal!r}")
    rho = float(state.rho)
    if rho < VACUUM_RHO:
        raise InadmissibleStateError(f"near-vacuum density {rho!r}")
    mom = np.asarray(state.momentum, dtype=np.float64)
    tau = 1.0 / rho
    v_n = float(mom @ n) / rho
    e = float(state.energy) / rho - 0.5 * float(mom @ mom) / rho**2
    model.check_admissible(tau, e)
    p = model.pressure(tau, e)
    k = model.bulk_modulus(tau, e)
    side = SideData(rho=rho, tau=tau, v_n=v_n, p=p, bulk_k=k, c=float(np.sqrt(tau * k)), p_inf=k - p)
    assert np.isfinite(side.c) and side.bulk_k > 0.0
    return side


def side_data_from_primitive(model: EosModel, rho, v_n, p) -> SideData:
    """SideData straight from primitive values (vectorized; test helper)."""
    rho = np.asarray(rho, dtype=np.float64)
    tau = 1.0 / rho
    e = model.energy_from_pressure(tau, p)
    k = model.bulk_modulus(tau, e)
    p = np.asarray(p, dtype=np.float64)
    return SideData(
        rho=rho,
        tau=tau,
        v_n=np.asarray(v_n, dtype=np.float64),
        p=p,
        bulk_k=np.asarray(k),
        c=np.sqrt(tau * k),
        p_inf=np.asarray(k) - p,
    )


def f_side(side: SideData, p):
    """Genuinely-nonlinear wave function of one side, zero at ``p = side.p``.

    Strictly increasing; expansion (log) branch for ``p <= p_Z``, shock
    branch above.  The expansion argument is written ``((p - p_Z) + K_Z)/K_Z``
    so the branch point evaluates to exactly zero.
    """
    p = np.asarray(p, dtype=np.float64)
    dp = p - np.asarray(side.p)
    arg = dp + np.asarray(side.bulk_k)
    if np.any(arg <= 0.0):
        raise WaveSpeedDomainError("pressure at or below the vacuum bound -p_inf")
    expansion = np.asarray(side.c) * np.log(arg / np.asarray(side.bulk_k))
    shock = dp / np.sqrt(np.asarray(side.rho) * arg)
    out = np.where(dp > 0.0, shock, expansion)
    return float(out) if out.ndim == 0 else out


def phi(left: SideData, right: SideData, p):
    """f_L(p) + f_R(p) + (v_R - v_L); its root is the star pressure."""
    out = f_side(left, p) + f_side(right, p) + (np.asarray(right.v_n) - np.asarray(left.v_n))
    return float(out) if np.ndim(out) == 0 else out


def p_hat_rr(left: SideData, right: SideData):
    """Root of the double-expansion lower bound of phi; always >= p*."""
    global exp_clamp_count
    cl = np.asarray(left.c, dtype=np.float64)
    cr = np.asarray(right.c, dtype=np.float64)
    dv = np.asarray(right.v_n) - np.asarray(left.v_n)
    arg = (cl * np.log(np.asarray(left.bulk_k)) + cr * np.log(np.asarray(right.bulk_k)) - dv) / (cl + cr)
    clamped = arg > EXP_ARG_MAX
    if np.any(clamped):
        exp_clamp_count += int(np.count_nonzero(clamped))
        arg = np.minimum(arg, EXP_ARG_MAX)
    out = np.exp(arg) - np.minimum(np.asarray(left.p_inf), np.asarray(right.p_inf))
    return float(out) if np.ndim(out) == 0 else out


def p_hat_ss(left: SideData, right: SideData):
    """Root of the double-shock lower bound of phi."""
    sl = np.sqrt(np.asarray(left.rho, dtype=np.float64))
    sr = np.sqrt(np.asarray(right.rho, dtype=np.float64))
    pinf_max = np.maximum(np.asarray(left.p_inf), np.asarray(right.p_inf))
    a = sl + sr
    b = sl * sr * (np.asarray(right.v_n) - np.asarray(left.v_n))
    c = -sr * (np.asarray(left.p) + pinf_max) - sl * (np.asarray(right.p) + pinf_max)
    disc = b * b - 4.0 * a * c
    # c < 0 because p_Z + pinf_max >= p_Z + pinf_Z = K_Z > 0.
    assert np.all(disc >= 0.0)
    root = (-b + np.sqrt(disc)) / (2.0 * a)
    out = root * root - pinf_max
    return float(out) if np.ndim(out) == 0 else out


def _phi_at_extremes(left: SideData, right: SideData):
    """phi evaluated at min(p_L, p_R) and max(p_L, p_R), branch-reduced.

    At p_min only the higher-pressure side contributes (its expansion log);
    at p_max only the lower-pressure side does (its shock branch).  When the
    higher side's vacuum bound exceeds p_min the expansion has emptied into
    vacuum before reaching p_min, which counts as phi = -inf.
    """
    pl = np.asarray(left.p, dtype=np.float64)
    pr = np.asarray(right.p, dtype=np.float64)
    dv = np.asarray(right.v_n) - np.asarray(left.v_n)
    left_is_lo = pl <= pr
    p_lo = np.where(left_is_lo, pl, pr)
    p_hi = np.where(left_is_lo, pr, pl)
    k_hi = np.where(left_is_lo, right.bulk_k, left.bulk_k)
    c_hi = np.where(left_is_lo, right.c, left.c)
    k_lo = np.where(left_is_lo, left.bulk_k, right.bulk_k)
    rho_lo = np.where(left_is_lo, left.rho, right.rho)
    arg_min = (p_lo - p_hi) + k_hi
    with np.errstate(divide="ignore", invalid="ignore"):
        phi_min = np.where(arg_min > 0.0, c_hi * np.log(arg_min / k_hi), -np.inf) + dv
    phi_max = (p_hi - p_lo) / np.sqrt(rho_lo * ((p_hi - p_lo) + k_lo)) + dv
    return p_lo, p_hi, phi_min, phi_max


def p_star_upper(left: SideData, right: SideData):
    """Certified upper bound p_hat >= p* without iteration.

    Cases, by the sign of phi at the endpoint pressures (phi is increasing):
    root below both pressures (double expansion) -> p_min, which yields the
    same wave speeds as any smaller value; root between them -> the
    double-expansion bound capped at p_max; root above both (double shock)
    -> the smaller of the double-expansion and double-shock bounds.
    """
    p_lo, p_hi, phi_min, phi_max = _phi_at_extremes(left, right)
    rr = p_hat_rr(left, right)
    ss = p_hat_ss(left, right)
    out = np.where(
        phi_min >= 0.0,
        p_lo,
        np.where(phi_max >= 0.0, np.minimum(p_hi, rr), np.minimum(rr, ss)),
    )
    return float(out) if np.ndim(out) == 0 else out


def wave_speeds(left: SideData, right: SideData, p_hat):
    """Extreme wave speeds of the interpolant fan for star pressure p_hat."""
    p_hat = np.asarray(p_hat, dtype=np.float64)
    lam_l = np.asarray(left.v_n) - np.asarray(left.c) * np.sqrt(
        np.maximum((p_hat - np.asarray(left.p)) / np.asarray(left.bulk_k), 0.0) + 1.0
    )
    lam_r = np.asarray(right.v_n) + np.asarray(right.c) * np.sqrt(
        np.maximum((p_hat - np.asarray(right.p)) / np.asarray(right.bulk_k), 0.0) + 1.0
    )
    if np.ndim(lam_l) == 0:
        return float(lam_l), float(lam_r)
    return lam_l, lam_r


def estimate(left: SideData, right: SideData) -> WaveEstimate:
    """Full Algorithm-style estimate from prepared side data."""
    p_hat = p_star_upper(left, right)
    lam_l, lam_r = wave_speeds(left, right, p_hat)
    lam = np.maximum(np.abs(lam_l), np.abs(lam_r))
    if np.ndim(lam) == 0:
        return WaveEstimate(float(p_hat), float(lam_l), float(lam_r), float(lam))
    return WaveEstimate(p_hat, lam_l, lam_r, lam)


def lambda_max(model: EosModel, state_l, state_r, normal):
    """Certified maximum wave speed for the pair of conserved states.

    Bitwise symmetric under (L, R, n) -> (R, L, -n): the two orientations are
    reduced to a canonical one (lexicographic on (rho, v_n, p)) before
    evaluation.
    """
    a = make_side_data(model, state_l, normal)
    b_raw = make_side_data(model, state_r, normal)
    # Key of the right side as it would appear if it were the left side of
    # the flipped orientation.
    key_a = (a.rho, a.v_n, a.p)
    key_b = (b_raw.rho, -b_raw.v_n, b_raw.p)
    if key_a <= key_b:
        left, right = a, b_raw
    else:
        left = SideData(b_raw.rho, b_raw.tau, -b_raw.v_n, b_raw.p, b_raw.bulk_k, b_raw.c, b_raw.p_inf)
        right = SideData(a.rho, a.tau, -a.v_n, a.p, a.bulk_k, a.c, a.p_inf)
    return estimate(left, right).lambda_max


def p_star_bisect(left: SideData, right: SideData, max_iter: int = 200):
    """Exact star pressure by bisection; reference oracle, vectorized.

    Bracket: phi -> -inf at the vacuum bound and phi(p_hat_rr) >= 0.
    Stops when |phi| <= 1e-12 (c_L + c_R) or the bracket width drops below
    1e-14 max(1, |p|).
    """
    pinf_min = np.minimum(np.asarray(left.p_inf, dtype=np.float64), np.asarray(right.p_inf, dtype=np.float64))
    hi = np.asarray(p_hat_rr(left, right), dtype=np.float64)
    span = np.maximum(hi + pinf_min, 0.0)
    lo = -pinf_min + 1e-12 * np.maximum(span, 1e-300)
    lo, hi = np.broadcast_arrays(lo, hi)
    lo = lo.astype(np.float64).copy()
    hi = hi.astype(np.float64).copy()
    ftol = 1e-12 * (np.asarray(left.c) + np.asarray(right.c))
    mid = 0.5 * (lo + hi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        val = phi(left, right, mid)
        below = np.asarray(val) < 0.0
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        done = (np.abs(val) <= ftol) | ((hi - lo) <= 1e-14 * np.maximum(1.0, np.abs(mid)))
        if np.all(done):
            break
    out = 0.5 * (lo + hi)
    return float(out) if np.ndim(out) == 0 else out


def stiffened_interpolant(side: SideData, eps: float):
    """Positive-exponent interpolant data (gamma, p_inf, q) for one side.

    With gamma = 1 + eps the interpolant matches the side's pressure, energy
    and bulk modulus:  p_inf = K/gamma - p  and
    q = e - tau (p + gamma p_inf)/(gamma - 1).  Only used diagnostically; the
    production estimates live in the eps -> 0 limit where q cancels.
    """
    gamma = 1.0 + eps
    p_inf = np.asarray(side.bulk_k) / gamma - np.asarray(side.p)
    return gamma, p_inf


def interpolant_q(side: SideData, e, eps: float):
    """The transported energy-shift field matching one side at finite eps."""
    gamma, p_inf = stiffened_interpolant(side, eps)
    out = np.asarray(e) - np.asarray(side.tau) * (np.asarray(side.p) + gamma * p_inf) / (gamma - 1.0)
    return float(out) if np.ndim(out) == 0 else out
