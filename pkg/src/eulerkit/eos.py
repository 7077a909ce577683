"""Complete equations of state for condensed-phase gas dynamics.

Every model maps a thermodynamic point ``(tau, e)`` -- specific volume in
cm^3/g and specific internal energy in kJ/g -- to the quantities the solver
needs: pressure ``p`` (GPa), isentropic bulk modulus ``K`` (GPa), sound speed
``c = sqrt(tau*K)`` (mm/us), an entropy-like value ``sigma`` that orders
states the same way the physical specific entropy does, the energy floor
(cold curve / minimum isentrope), and the fundamental derivative ``G``.

All public methods accept scalars or numpy arrays and broadcast elementwise.
Tension states (``p < 0``) are legal; admissibility only requires ``tau > 0``
and the energy to sit on or above the model's energy floor.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ThermoPoint",
    "MacawParams",
    "DavisParams",
    "StiffenedParams",
    "EosModel",
    "MieGruneisen",
    "SimpleMacaw",
    "DavisReactant",
    "StiffenedGas",
    "EosError",
    "EosEvaluationError",
    "HyperbolicityError",
    "InadmissibleStateError",
    "EosDomainError",
    "BoundUnavailableError",
    "make_model",
]

# Relative slack used when deciding whether a state sits on the energy floor;
# absorbs round-off for data constructed exactly on the cold curve.
ADMISSIBILITY_RTOL = 1e-12


class EosError(Exception):
    """Base class for equation-of-state failures."""


class EosEvaluationError(EosError):
    """Non-finite thermodynamic value; carries the offending (tau, e)."""

    def __init__(self, message, tau=None, e=None):
        super().__init__(message)
        self.tau = tau
        self.e = e


class HyperbolicityError(EosError):
    """Bulk modulus K <= 0: the state is outside the hyperbolic region."""

    def __init__(self, message, tau=None, e=None):
        super().__init__(message)
        self.tau = tau
        self.e = e


class InadmissibleStateError(EosError):
    """Energy below the model's floor curve (negative-temperature state)."""


class EosDomainError(EosError):
    """Requested inversion has no solution in the admissible range."""


class BoundUnavailableError(EosError):
    """The Gruneisen/bulk-modulus hypotheses for the closed-form G bound fail."""


@dataclass(frozen=True)
class ThermoPoint:
    """One thermodynamic state: specific volume (cm^3/g), energy (kJ/g)."""

    tau: float
    e: float

    def __post_init__(self):
        if not self.tau > 0.0:
            raise ValueError(f"specific volume must be positive, got {self.tau}")


@dataclass(frozen=True)
class MacawParams:
    """Simple MACAW constants: reference volume, Gruneisen, cold-curve A/B."""

    tau0: float = 1.0 / 8.952
    gamma0: float = 0.5
    a_coef: float = 7.3
    b_coef: float = 3.9

    def __post_init__(self):
        if not (self.tau0 > 0 and self.gamma0 > 0 and self.a_coef > 0 and self.b_coef > 0):
            raise ValueError(f"invalid MACAW parameters: {self}")


@dataclass(frozen=True)
class DavisParams:
    """Reactant Davis constants.

    ``e0`` shifts the reference isentrope uniformly and cancels out of every
    difference the solver uses; it defaults to zero.
    """

    tau0: float = 1.0 / 1.71
    gamma0: float = 0.8437
    t0: float = 298.15
    a_coef: float = 2.434
    b_coef: float = 2.367
    c_coef: float = 1.024
    z_coef: float = 0.0
    cv0: float = 0.001072
    alpha_st: float = 0.8484
    e0: float = 0.0

    def __post_init__(self):
        if not (self.tau0 > 0 and self.cv0 > 0 and self.alpha_st > 0 and self.z_coef >= 0):
            raise ValueError(f"invalid Davis parameters: {self}")


@dataclass(frozen=True)
class StiffenedParams:
    """Stiffened gas law constants: exponent, reference pressure, energy shift."""

    gamma: float = 1.4
    p_inf: float = 0.0
    q: float = 0.0

    def __post_init__(self):
        if not (self.gamma > 1.0 and self.p_inf >= 0.0):
            raise ValueError(f"invalid stiffened-gas parameters: {self}")


def _wrap(x):
    """Return a python float for 0-d results, the array otherwise."""
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


def _check_finite(value, tau, e, what):
    v = np.asarray(value)
    if np.all(np.isfinite(v)):
        return
    idx = int(np.argmax(~np.isfinite(np.ravel(v))))
    tt = np.ravel(np.broadcast_to(np.asarray(tau, dtype=np.float64), v.shape))[idx]
    ee = np.ravel(np.broadcast_to(np.asarray(e, dtype=np.float64), v.shape))[idx]
    raise EosEvaluationError(
        f"non-finite {what} at tau={float(tt)!r}, e={float(ee)!r}", tau=float(tt), e=float(ee)
    )


class EosModel(ABC):
    """Interface every equation of state implements.

    Methods are pure functions of immutable parameter records and are safe
    for concurrent use.
    """

    kind: str = "abstract"

    # -- core surface ------------------------------------------------------

    @abstractmethod
    def pressure(self, tau, e):
        """Oracle pressure p(tau, e) in GPa; may be negative (tension)."""

    @abstractmethod
    def cold_energy(self, tau):
        """Energy floor curve: minimum admissible e at this tau."""

    @abstractmethod
    def cold_pressure(self, tau):
        """Pressure on the energy floor curve, -d/dtau cold_energy."""

    @abstractmethod
    def bulk_modulus(self, tau, e):
        """Isentropic bulk modulus kappa(tau, e) in GPa; raises if <= 0."""

    @abstractmethod
    def entropy_like(self, tau, e):
        """A strictly increasing function of the physical specific entropy."""

    @abstractmethod
    def isentrope_energy(self, tau, sigma):
        """Energy on the sigma-level isentrope; inverse of entropy_like in e."""

    @abstractmethod
    def fundamental_derivative(self, tau, e):
        """Dimensionless fundamental derivative G(tau, e)."""

    @abstractmethod
    def g_min_bound(self):
        """A lower bound for G over the admissible set."""

    # -- derived helpers ----------------------------------------------------

    def sound_speed(self, tau, e):
        """c = sqrt(tau * K) in mm/us."""
        k = self.bulk_modulus(tau, e)
        return _wrap(np.sqrt(np.asarray(tau, dtype=np.float64) * k))

    def admissibility_margin(self, tau, e):
        """e - cold_energy(tau); admissible states are >= -tolerance."""
        return _wrap(np.asarray(e, dtype=np.float64) - self.cold_energy(tau))

    def check_admissible(self, tau, e):
        margin = np.asarray(self.admissibility_margin(tau, e))
        tol = ADMISSIBILITY_RTOL * np.maximum(1.0, np.abs(e))
        if np.any(margin < -tol) or np.any(np.asarray(tau) <= 0.0):
            bad = np.argmax((margin < -tol) | (np.asarray(tau) <= 0.0))
            raise InadmissibleStateError(
                f"state below the energy floor: margin={np.ravel(margin)[bad]!r}"
            )

    def sigma_extended(self, tau, e):
        """entropy_like continued monotonically below the floor (diagnostics).

        Default: the entropy-like formula itself when it is total; models
        whose formula breaks down below the floor override this.
        """
        return self.entropy_like(tau, e, _check=False)

    def energy_from_pressure(self, tau, p):
        """Invert p(tau, e) for e.  Mie-Gruneisen laws are linear in e."""
        raise NotImplementedError

    # -- plumbing ------------------------------------------------------------

    @abstractmethod
    def kernel_args(self):
        """(integer tag, float64 parameter vector) for the compiled kernels."""

    @abstractmethod
    def params_dict(self):
        """JSON-serializable description of the model."""


class MieGruneisen(EosModel):
    """Mie-Gruneisen pressure law built from reference isentrope curves.

    Subclasses supply the reference curves ``e_s``, ``p_s = -e_s'``,
    ``K_s = -tau p_s'``, ``-tau K_s'`` and the Gruneisen coefficient with its
    first two derivatives.  Pressure, bulk modulus and the fundamental
    derivative then follow from

        p(tau, e)     = p_s + (Gamma/tau) (e - e_s)
        kappa(tau, e) = K_s + (Gamma(Gamma+1)/tau - Gamma') (e - e_s)

    and the corresponding closed form for G.  The reference curve doubles as
    the energy floor.
    """

    # sweep used by the sampled g_min bound: (tau_lo/tau0, tau_hi/tau0, n)
    g_min_sweep = (0.1, 10.0, 10_000)

    @abstractmethod
    def ref_energy(self, tau): ...

    @abstractmethod
    def ref_pressure(self, tau): ...

    @abstractmethod
    def ref_bulk_modulus(self, tau): ...

    @abstractmethod
    def ref_bulk_modulus_slope(self, tau):
        """-tau * K_s'(tau)."""

    def gruneisen(self, tau):
        return np.broadcast_to(np.float64(self._gamma_const()), np.shape(tau)).copy() if np.ndim(tau) else self._gamma_const()

    def gruneisen_slope(self, tau):
        return np.zeros_like(np.asarray(tau, dtype=np.float64)) if np.ndim(tau) else 0.0

    def gruneisen_curvature(self, tau):
        return np.zeros_like(np.asarray(tau, dtype=np.float64)) if np.ndim(tau) else 0.0

    def _gamma_const(self):
        raise NotImplementedError

    # -- EosModel surface ----------------------------------------------------

    def cold_energy(self, tau):
        return self.ref_energy(tau)

    def cold_pressure(self, tau):
        return self.ref_pressure(tau)

    def pressure(self, tau, e):
        tau = np.asarray(tau, dtype=np.float64)
        e = np.asarray(e, dtype=np.float64)
        p = self.ref_pressure(tau) + self.gruneisen(tau) / tau * (e - self.ref_energy(tau))
        _check_finite(p, tau, e, "pressure")
        return _wrap(p)

    def energy_from_pressure(self, tau, p):
        tau = np.asarray(tau, dtype=np.float64)
        p = np.asarray(p, dtype=np.float64)
        return _wrap(self.ref_energy(tau) + (p - self.ref_pressure(tau)) * tau / self.gruneisen(tau))

    def bulk_modulus(self, tau, e):
        tau = np.asarray(tau, dtype=np.float64)
        e = np.asarray(e, dtype=np.float64)
        g = self.gruneisen(tau)
        k = self.ref_bulk_modulus(tau) + (g * (g + 1.0) / tau - self.gruneisen_slope(tau)) * (
            e - self.ref_energy(tau)
        )
        _check_finite(k, tau, e, "bulk modulus")
        if np.any(np.asarray(k) <= 0.0):
            bad = int(np.argmax(np.asarray(k) <= 0.0))
            raise HyperbolicityError(
                f"bulk modulus {np.ravel(k)[bad]!r} <= 0 (hyperbolicity lost)",
                tau=float(np.ravel(tau)[bad] if tau.ndim else tau),
                e=float(np.ravel(e)[bad] if e.ndim else e),
            )
        return _wrap(k)

    def fundamental_derivative(self, tau, e):
        tau = np.asarray(tau, dtype=np.float64)
        e = np.asarray(e, dtype=np.float64)
        g = self.gruneisen(tau)
        gp = self.gruneisen_slope(tau)
        gpp = self.gruneisen_curvature(tau)
        de = e - self.ref_energy(tau)
        kappa = self.ref_bulk_modulus(tau) + (g * (g + 1.0) / tau - gp) * de
        if np.any(np.asarray(kappa) <= 0.0):
            raise HyperbolicityError("bulk modulus <= 0 in fundamental derivative")
        num = self.ref_bulk_modulus_slope(tau) + (
            tau * gpp - 2.0 * gp * g + (g + 1.0) * (g * (g + 1.0) / tau - gp)
        ) * de
        return _wrap(0.5 * (1.0 + num / kappa))

    def g_min_bound(self):
        """Sampled Gruneisen/bulk-modulus lower bound for G.

        Sweeps -tau K_s'/K_s over ``g_min_sweep`` and combines it with
        inf Gamma + 1; raises when the hypotheses (Gamma positive decreasing
        convex, K_s positive decreasing) fail on the sweep.
        """
        lo, hi, n = self.g_min_sweep
        taus = np.geomspace(lo * self._tau0(), hi * self._tau0(), n)
        ks = np.asarray(self.ref_bulk_modulus(taus))
        slope = np.asarray(self.ref_bulk_modulus_slope(taus))
        gam = np.asarray(self.gruneisen(taus))
        gp = np.asarray(self.gruneisen_slope(taus))
        gpp = np.asarray(self.gruneisen_curvature(taus))
        if np.any(ks <= 0.0) or np.any(slope < 0.0):
            raise BoundUnavailableError("K_s must be positive and decreasing on the sweep")
        if np.any(gam <= 0.0) or np.any(gp > 0.0) or np.any(gpp < 0.0):
            raise BoundUnavailableError("Gamma must be positive, decreasing and convex")
        return 0.5 * (1.0 + min(float(np.min(slope / ks)), float(np.min(gam)) + 1.0))

    def _tau0(self):
        raise NotImplementedError


class SimpleMacaw(MieGruneisen):
    """Simple MACAW law for condensed materials (copper-like defaults).

    Cold curve:
        e_cold(tau) = A tau0 (x^-B + B x - (B+1)),   x = tau/tau0
        p_cold(tau) = A B (x^-(B+1) - 1)
    with constant Gruneisen coefficient Gamma0, so

        p(tau, e)     = p_cold + (Gamma0/tau) (e - e_cold)
        kappa(tau, e) = K_cold + Gamma0 (Gamma0+1) (e - e_cold) / tau.

    Because Gamma is constant, isentropes are e = e_cold + C x^-Gamma0 with C
    increasing in entropy, so sigma = (e - e_cold) x^Gamma0 is an exact
    entropy-like value.
    """

    kind = "macaw"

    def __init__(self, params: MacawParams | None = None):
        self.params = params or MacawParams()

    def _tau0(self):
        return self.params.tau0

    def _gamma_const(self):
        return self.params.gamma0

    def ref_energy(self, tau):
        p = self.params
        x = np.asarray(tau, dtype=np.float64) / p.tau0
        return _wrap(p.a_coef * p.tau0 * (x ** (-p.b_coef) + p.b_coef * x - (p.b_coef + 1.0)))

    def ref_pressure(self, tau):
        p = self.params
        x = np.asarray(tau, dtype=np.float64) / p.tau0
        return _wrap(p.a_coef * p.b_coef * (x ** (-(p.b_coef + 1.0)) - 1.0))

    def ref_bulk_modulus(self, tau):
        p = self.params
        x = np.asarray(tau, dtype=np.float64) / p.tau0
        return _wrap(p.a_coef * p.b_coef * (p.b_coef + 1.0) * x ** (-(p.b_coef + 1.0)))

    def ref_bulk_modulus_slope(self, tau):
        # K_cold ~ x^-(B+1) gives -tau K_cold' = (B+1) K_cold exactly.
        p = self.params
        return _wrap((p.b_coef + 1.0) * np.asarray(self.ref_bulk_modulus(tau)))

    def entropy_like(self, tau, e, _check=True):
        p = self.params
        tau = np.asarray(tau, dtype=np.float64)
        e = np.asarray(e, dtype=np.float64)
        if _check:
            self.check_admissible(tau, e)
        return _wrap((e - self.ref_energy(tau)) * (tau / p.tau0) ** p.gamma0)

    def isentrope_energy(self, tau, sigma):
        p = self.params
        tau = np.asarray(tau, dtype=np.float64)
        sigma = np.asarray(sigma, dtype=np.float64)
        if np.any(sigma < -ADMISSIBILITY_RTOL):
            raise EosDomainError(f"no MACAW isentrope below the cold curve (sigma={sigma!r})")
        return _wrap(self.ref_energy(tau) + sigma * (p.tau0 / tau) ** p.gamma0)

    def g_min_bound(self):
        p = self.params
        return 0.5 * (1.0 + min(p.b_coef + 1.0, p.gamma0 + 1.0))

    def kernel_args(self):
        p = self.params
        return 0, np.array([p.tau0, p.gamma0, p.a_coef, p.b_coef], dtype=np.float64)

    def params_dict(self):
        p = self.params
        return {
            "kind": self.kind,
            "tau0": p.tau0,
            "gamma0": p.gamma0,
            "a_coef": p.a_coef,
            "b_coef": p.b_coef,
        }


class DavisReactant(MieGruneisen):
    """Reactant Davis law for unreacted high explosives.

    The reference isentrope (two-branch in y = 1 - tau/tau0, series on
    compression, exponential on expansion) is the minimum-entropy curve of the
    admissible set; with s0 = cv0/alpha_ST the law satisfies the third law,
    and states below the s0 isentrope lose convexity, so the reference curve
    is the energy floor here.

    The complete form e(tau, s) inverts in closed form, so entropy_like
    returns the exact physical specific entropy in kJ/(g K).
    """

    kind = "davis"

    def __init__(self, params: DavisParams | None = None):
        self.params = params or DavisParams()

    @property
    def s0(self):
        return self.params.cv0 / self.params.alpha_st

    def _tau0(self):
        return self.params.tau0

    def _y(self, tau):
        return 1.0 - np.asarray(tau, dtype=np.float64) / self.params.tau0

    def ref_energy(self, tau):
        p = self.params
        y = self._y(tau)
        fy = 4.0 * p.b_coef * y
        expand = p.e0 + p.a_coef**2 / (16.0 * p.b_coef**2) * (np.exp(np.where(y < 0, fy, 0.0)) - fy - 1.0)
        series = p.e0 + p.a_coef**2 / (16.0 * p.b_coef**2) * (
            fy**2 / 2.0
            + fy**3 / 6.0
            + fy**4 / 24.0
            + p.c_coef * fy**5 / 120.0
            + 4.0 * p.b_coef * y**3 / (3.0 * (1.0 - y) ** 3)
        )
        return _wrap(np.where(y < 0, expand, series))

    def ref_pressure(self, tau):
        p = self.params
        y = self._y(tau)
        fy = 4.0 * p.b_coef * y
        scale = p.a_coef**2 / (4.0 * p.b_coef * p.tau0)
        expand = scale * (np.exp(np.where(y < 0, fy, 0.0)) - 1.0)
        series = scale * (
            fy + fy**2 / 2.0 + fy**3 / 6.0 + p.c_coef * fy**4 / 24.0 + y**2 / (1.0 - y) ** 4
        )
        return _wrap(np.where(y < 0, expand, series))

    def ref_bulk_modulus(self, tau):
        p = self.params
        y = self._y(tau)
        fy = 4.0 * p.b_coef * y
        scale = p.a_coef**2 / p.tau0 * (1.0 - y)
        expand = scale * np.exp(np.where(y < 0, fy, 0.0))
        series = scale * (
            fy**2 / 2.0
            + fy
            + 1.0
            + p.c_coef * fy**3 / 6.0
            + y * (y + 1.0) / (2.0 * p.b_coef * (1.0 - y) ** 5)
        )
        return _wrap(np.where(y < 0, expand, series))

    def ref_bulk_modulus_slope(self, tau):
        p = self.params
        y = self._y(tau)
        fy = 4.0 * p.b_coef * y
        scale = p.a_coef**2 / p.tau0 * (1.0 - y)
        expand = scale * np.exp(np.where(y < 0, fy, 0.0)) * (4.0 * p.b_coef * (1.0 - y) - 1.0)
        series = scale * (
            (4.0 * p.b_coef) ** 2 * y * (1.0 - 1.5 * y)
            + 4.0 * p.b_coef * (1.0 - 2.0 * y)
            - 1.0
            + p.c_coef * (4.0 * p.b_coef) ** 3 * y**2 * (0.5 - 2.0 * y / 3.0)
            + (2.0 * y**2 + 5.0 * y + 1.0) / (2.0 * p.b_coef * (1.0 - y) ** 5)
        )
        return _wrap(np.where(y < 0, expand, series))

    def gruneisen(self, tau):
        p = self.params
        y = self._y(tau)
        return _wrap(np.where(y < 0, p.gamma0, p.gamma0 + p.z_coef * y))

    def gruneisen_slope(self, tau):
        p = self.params
        y = self._y(tau)
        return _wrap(np.where(y < 0, 0.0, -p.z_coef / p.tau0) * np.ones_like(y))

    def _gamma_const(self):
        return self.params.gamma0

    def ref_temperature(self, tau):
        """Temperature on the reference isentrope."""
        p = self.params
        x = np.asarray(tau, dtype=np.float64) / p.tau0
        expand = p.t0 * x ** (-p.gamma0)
        compress = p.t0 * x ** (-(p.gamma0 + p.z_coef)) * np.exp(-p.z_coef * (1.0 - x))
        return _wrap(np.where(x > 1.0, expand, compress))

    def _w(self, tau, e):
        p = self.params
        return (np.asarray(e, dtype=np.float64) - self.ref_energy(tau)) * (1.0 + p.alpha_st) / (
            p.cv0 * np.asarray(self.ref_temperature(tau))
        ) + 1.0

    def entropy_like(self, tau, e, _check=True):
        p = self.params
        if _check:
            self.check_admissible(tau, e)
        w = np.maximum(self._w(tau, e), 0.0)
        return _wrap(self.s0 + (p.cv0 / p.alpha_st) * (w ** (p.alpha_st / (1.0 + p.alpha_st)) - 1.0))

    def sigma_extended(self, tau, e):
        # Odd extension of w^(alpha/(1+alpha)) keeps the value monotone in e
        # below the floor, where the physical entropy is undefined.
        p = self.params
        w = self._w(tau, e)
        root = np.sign(w) * np.abs(w) ** (p.alpha_st / (1.0 + p.alpha_st))
        return _wrap(self.s0 + (p.cv0 / p.alpha_st) * (root - 1.0))

    def isentrope_energy(self, tau, sigma):
        p = self.params
        sigma = np.asarray(sigma, dtype=np.float64)
        bracket = 1.0 + (p.alpha_st / p.cv0) * (sigma - self.s0)
        if np.any(bracket < -1e-12):
            raise EosDomainError("entropy level below the absolute-zero isentrope")
        bracket = np.maximum(bracket, 0.0)
        ts = np.asarray(self.ref_temperature(tau))
        return _wrap(
            self.ref_energy(tau)
            + p.cv0 * ts / (1.0 + p.alpha_st) * (bracket ** ((1.0 + p.alpha_st) / p.alpha_st) - 1.0)
        )

    def temperature(self, tau, e):
        """Physical temperature in K; defined for e >= e_s(tau)."""
        self.check_admissible(tau, e)
        p = self.params
        w = np.maximum(self._w(tau, e), 0.0)
        return _wrap(np.asarray(self.ref_temperature(tau)) * w ** (1.0 / (1.0 + p.alpha_st)))

    def kernel_args(self):
        p = self.params
        return 1, np.array(
            [p.tau0, p.gamma0, p.t0, p.a_coef, p.b_coef, p.c_coef, p.z_coef, p.cv0, p.alpha_st, p.e0],
            dtype=np.float64,
        )

    def params_dict(self):
        p = self.params
        return {
            "kind": self.kind,
            "tau0": p.tau0,
            "gamma0": p.gamma0,
            "t0": p.t0,
            "a_coef": p.a_coef,
            "b_coef": p.b_coef,
            "c_coef": p.c_coef,
            "z_coef": p.z_coef,
            "cv0": p.cv0,
            "alpha_st": p.alpha_st,
            "e0": p.e0,
        }


class StiffenedGas(EosModel):
    """Stiffened gas law p = (gamma-1)(e-q)/tau - gamma p_inf.

    Serves both as a test EOS with known exact behavior (G = (gamma+1)/2
    everywhere) and as the interpolant family underlying the wave-speed
    estimates.
    """

    kind = "stiffened"

    def __init__(self, params: StiffenedParams | None = None):
        self.params = params or StiffenedParams()

    def pressure(self, tau, e):
        p = self.params
        tau = np.asarray(tau, dtype=np.float64)
        e = np.asarray(e, dtype=np.float64)
        out = (p.gamma - 1.0) * (e - p.q) / tau - p.gamma * p.p_inf
        _check_finite(out, tau, e, "pressure")
        return _wrap(out)

    def energy_from_pressure(self, tau, p_val):
        p = self.params
        return _wrap(p.q + (np.asarray(p_val, dtype=np.float64) + p.gamma * p.p_inf) * np.asarray(tau, dtype=np.float64) / (p.gamma - 1.0))

    def cold_energy(self, tau):
        p = self.params
        return _wrap(p.q + p.p_inf * np.asarray(tau, dtype=np.float64))

    def cold_pressure(self, tau):
        p = self.params
        return _wrap(np.full_like(np.asarray(tau, dtype=np.float64), -p.p_inf))

    def bulk_modulus(self, tau, e):
        p = self.params
        k = p.gamma * (np.asarray(self.pressure(tau, e)) + p.p_inf)
        if np.any(np.asarray(k) <= 0.0):
            raise HyperbolicityError("stiffened-gas bulk modulus <= 0")
        return _wrap(k)

    def entropy_like(self, tau, e, _check=True):
        p = self.params
        tau = np.asarray(tau, dtype=np.float64)
        e = np.asarray(e, dtype=np.float64)
        if _check:
            self.check_admissible(tau, e)
        return _wrap((e - p.q - p.p_inf * tau) * tau ** (p.gamma - 1.0))

    def isentrope_energy(self, tau, sigma):
        p = self.params
        tau = np.asarray(tau, dtype=np.float64)
        sigma = np.asarray(sigma, dtype=np.float64)
        if np.any(sigma < -ADMISSIBILITY_RTOL):
            raise EosDomainError("no stiffened-gas isentrope below the floor")
        return _wrap(p.q + p.p_inf * tau + sigma * tau ** (-(p.gamma - 1.0)))

    def fundamental_derivative(self, tau, e):
        p = self.params
        g = 0.5 * (p.gamma + 1.0)
        return g if np.ndim(tau) == 0 else np.full(np.shape(tau), g)

    def g_min_bound(self):
        return 0.5 * (self.params.gamma + 1.0)

    def kernel_args(self):
        p = self.params
        return 2, np.array([p.gamma, p.p_inf, p.q], dtype=np.float64)

    def params_dict(self):
        p = self.params
        return {"kind": self.kind, "gamma": p.gamma, "p_inf": p.p_inf, "q": p.q}


_KINDS = {"macaw": (SimpleMacaw, MacawParams), "davis": (DavisReactant, DavisParams), "stiffened": (StiffenedGas, StiffenedParams)}


def make_model(kind: str, **params) -> EosModel:
    """Construct an EOS model by name, e.g. make_model('macaw')."""
    try:
        cls, pcls = _KINDS[kind]
    except KeyError:
        raise ValueError(f"unknown EOS kind {kind!r}; expected one of {sorted(_KINDS)}") from None
    params = {k: v for k, v in params.items() if k != "kind"}
    return cls(pcls(**params)) if params else cls()
