"""Heralded entanglement generation between neighbouring emitters.

Four schemes are modelled in closed form: resonant (Rayleigh) scattering with
interferometric heralding, Raman scattering, and optical pi-pulses heralded by
one or two photon clicks. Each maps physical rates to a
:class:`GenerationOutcome` (initial fidelity, per-attempt success probability
and the mean time to produce one pair).

Units: rates are angular frequencies in 1/s, times in seconds, distances in
km, attenuation in dB/km.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Literal, Union

import numpy as np

from .bell import BellVector, shape_state
from .errors import (
    DomainError,
    InfeasibleParametersError,
    NoEntanglementError,
    SingularParameterError,
)

FIBER_SPEED_KM_S = 2.0e5
WEAK_DRIVE_RATIO = 0.1


class WeakDriveWarning(UserWarning):
    """Drive too strong for the weak-excitation formulas."""


class AdiabaticWarning(UserWarning):
    """Cavity not fast enough to be adiabatically eliminated."""


@dataclass(frozen=True)
class OpticalParams:
    g: float
    kappa: float
    gamma: float
    Gamma: float = 0.0
    Omega: float = 0.0
    t0: float = 0.0
    zeta: float = 1.0
    gamma_dc: float = 0.0
    gamma_e: float = 0.0

    def __post_init__(self):
        for name in ("g", "kappa", "gamma", "Gamma", "Omega", "t0", "gamma_dc", "gamma_e"):
            value = getattr(self, name)
            if not value >= 0.0:
                raise DomainError(f"{name}={value} must be >= 0")
        if not 0.0 <= self.zeta <= 1.0:
            raise DomainError(f"zeta={self.zeta} outside [0, 1]")

    @property
    def weak_drive(self) -> bool:
        return self.Omega < WEAK_DRIVE_RATIO * (self.gamma + self.Gamma)

    @property
    def cooperativity(self) -> float:
        """Broadened Purcell factor 4 g^2 / kappa (gamma + Gamma)."""
        denom = self.kappa * (self.gamma + self.Gamma)
        if denom == 0.0:
            raise SingularParameterError("kappa * (gamma + Gamma) must be > 0")
        return 4.0 * self.g**2 / denom

    @property
    def purcell(self) -> float:
        """Unbroadened Purcell factor 4 g^2 / kappa gamma."""
        denom = self.kappa * self.gamma
        if denom == 0.0:
            raise SingularParameterError("kappa * gamma must be > 0")
        return 4.0 * self.g**2 / denom

    @property
    def gamma_eff(self) -> float:
        return self.gamma * (1.0 + self.purcell)


@dataclass(frozen=True)
class LinkParams:
    L0: float
    attenuation: float = 0.2
    signal_speed: float = FIBER_SPEED_KM_S
    t_c_override: float | None = None

    def __post_init__(self):
        if not self.L0 > 0.0:
            raise DomainError(f"L0={self.L0} must be > 0")
        if not self.attenuation >= 0.0:
            raise DomainError(f"attenuation={self.attenuation} must be >= 0")
        if not self.signal_speed > 0.0:
            raise DomainError(f"signal_speed={self.signal_speed} must be > 0")
        if self.t_c_override is not None and not self.t_c_override > 0.0:
            raise DomainError("t_c_override must be > 0")

    @property
    def t_c(self) -> float:
        if self.t_c_override is not None:
            return self.t_c_override
        return self.L0 / self.signal_speed

    @property
    def transmission(self) -> float:
        return 10.0 ** (-self.attenuation * self.L0 / 10.0)


@dataclass(frozen=True)
class ResonantScattering:
    resolve_photon_number: bool = True


@dataclass(frozen=True)
class Raman:
    pass


@dataclass(frozen=True)
class PiPulseSingle:
    phi: float
    T: float

    def __post_init__(self):
        if not 0.0 < self.phi < math.pi / 2:
            raise DomainError(f"phi={self.phi} outside (0, pi/2)")
        if not self.T > 0.0:
            raise DomainError(f"T={self.T} must be > 0")


@dataclass(frozen=True)
class PiPulseDouble:
    P: float | None = None


SchemeKind = Union[ResonantScattering, Raman, PiPulseSingle, PiPulseDouble]


@dataclass(frozen=True)
class GenerationOutcome:
    F0: float
    P: float
    T0: float
    Pem: float
    epsilon: float
    t_c: float = 0.0
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def elementary(self, upsilon: float = 0.0) -> BellVector:
        return shape_state(self.F0, upsilon)


@dataclass(frozen=True)
class Emission:
    """Scheme-independent inputs of the resonant/Raman formulas.

    ``collection`` is zeta * P_cav, i.e. everything except the fiber.
    """

    Pem: float
    collection: float
    t0: float = 0.0
    gamma_e: float = 0.0
    gamma_dc: float = 0.0
    broadening: float = 0.0

    def __post_init__(self):
        if not self.Pem >= 0.0:
            raise DomainError(f"Pem={self.Pem} must be >= 0")
        if not 0.0 <= self.collection <= 1.0:
            raise DomainError(f"collection={self.collection} outside [0, 1]")


def _check_weak_drive(opt: OpticalParams, messages: list[str]):
    if not opt.weak_drive:
        msg = (
            f"weak-drive condition violated: Omega={opt.Omega:g} >= "
            f"{WEAK_DRIVE_RATIO} (gamma + Gamma)"
        )
        warnings.warn(msg, WeakDriveWarning, stacklevel=3)
        messages.append(msg)


def cavity_moments(opt: OpticalParams) -> tuple[complex, float, complex]:
    """Steady-state <alpha>, <|alpha|^2>, <beta> of the noise-averaged Langevin equations."""
    if opt.kappa == 0.0:
        raise SingularParameterError("kappa must be > 0")
    gG = opt.gamma + opt.Gamma
    if gG == 0.0:
        raise SingularParameterError("gamma + Gamma must be > 0")
    _check_weak_drive(opt, [])
    g, k, W = opt.g, opt.kappa, opt.Omega
    C = 4.0 * g * g / (k * gG)
    alpha = complex(-2.0 * g * W / (k * gG * (1.0 + C)))
    incoherent = 1.0 - opt.Gamma * k / (gG * (opt.gamma + k))
    alpha_sq = (4.0 * g * g * W * W / (k * k * gG * gG)) / ((1.0 + C) * (incoherent + C))
    beta = -1j * W / (gG * (1.0 + C))
    return alpha, alpha_sq, beta


def broadening_infidelity(opt: OpticalParams) -> float:
    """Fidelity lost to incoherently scattered light that passes the filter."""
    gG = opt.gamma + opt.Gamma
    if gG == 0.0 or opt.gamma + opt.kappa == 0.0:
        raise SingularParameterError("gamma + Gamma and gamma + kappa must be > 0")
    if opt.Gamma == 0.0:
        return 0.0
    return 1.5 * (opt.Gamma / gG) * (opt.kappa / (opt.gamma + opt.kappa)) / (1.0 + opt.cooperativity)


def emission_probability(opt: OpticalParams) -> float:
    """Probability that one driven pulse of length t0 scatters a photon."""
    _check_weak_drive(opt, [])
    gG = opt.gamma + opt.Gamma
    if gG == 0.0:
        raise SingularParameterError("gamma + Gamma must be > 0")
    return opt.t0 * opt.Omega**2 / (gG * (1.0 + opt.cooperativity))


def collection_efficiency(opt: OpticalParams, broadened: bool = True) -> float:
    """zeta * P_cav; the broadened Purcell factor is used iff ``broadened``."""
    C = opt.cooperativity if broadened else opt.purcell
    return opt.zeta * C / (1.0 + C)


def _finish(F_raw, P, Pem, eps, em: Emission, t_c, messages, broadening=True) -> GenerationOutcome:
    if not P > 0.0:
        raise NoEntanglementError(f"success probability is {P!r}; no entanglement is heralded")
    F0 = F_raw - em.gamma_e * (em.t0 + t_c) - em.gamma_dc * em.t0 / P
    if broadening:
        F0 -= em.broadening
    if F0 < 0.0:
        raise InfeasibleParametersError(f"penalties drive F0 to {F0:.4g} < 0")
    return GenerationOutcome(
        F0=min(F0, 1.0),
        P=P,
        T0=(em.t0 + t_c) / P,
        Pem=Pem,
        epsilon=eps,
        t_c=t_c,
        warnings=tuple(messages),
    )


def _emission(opt: OpticalParams, broadened: bool) -> Emission:
    return Emission(
        Pem=emission_probability(opt),
        collection=collection_efficiency(opt, broadened=broadened),
        t0=opt.t0,
        gamma_e=opt.gamma_e,
        gamma_dc=opt.gamma_dc,
        broadening=broadening_infidelity(opt),
    )


def resonant_fidelity(Pem: float, eps: float, resolve_photon_number: bool = True) -> float:
    """Heralded fidelity limited by multiple scattering events."""
    loss = (1.0 - eps) if resolve_photon_number else (1.0 - eps / 2.0)
    return 0.5 + 0.5 * math.exp(-Pem * loss)


def resonant_success(Pem: float, eps: float) -> float:
    return 0.5 * -math.expm1(-eps * Pem / 2.0)


def resonant_from_emission(em: Emission, link: LinkParams, resolve_photon_number=True, messages=()):
    eps = em.collection * link.transmission
    P = resonant_success(em.Pem, eps)
    F = resonant_fidelity(em.Pem, eps, resolve_photon_number)
    return _finish(F, P, em.Pem, eps, em, link.t_c, list(messages))


def resonant_outcome(opt: OpticalParams, link: LinkParams, resolve_photon_number: bool = True):
    messages: list[str] = []
    _check_weak_drive(opt, messages)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WeakDriveWarning)
        em = _emission(opt, broadened=True)
    return resonant_from_emission(em, link, resolve_photon_number, messages)


def raman_from_emission(em: Emission, link: LinkParams, messages=()):
    # P_em is per emitter; either of the two can send the herald photon.
    eps = em.collection * link.transmission
    P = 2.0 * em.Pem * eps
    return _finish(1.0 - em.Pem, P, em.Pem, eps, em, link.t_c, list(messages))


def raman_outcome(opt: OpticalParams, link: LinkParams):
    messages: list[str] = []
    _check_weak_drive(opt, messages)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WeakDriveWarning)
        em = _emission(opt, broadened=True)
    return raman_from_emission(em, link, messages)


def _check_adiabatic(opt: OpticalParams, messages: list[str]):
    if not opt.kappa > 10.0 * max(opt.g, opt.gamma, opt.Gamma):
        msg = "adiabatic elimination needs kappa >> g, gamma, Gamma"
        warnings.warn(msg, AdiabaticWarning, stacklevel=3)
        messages.append(msg)


def pi_single_click_probability(eps: float, gamma_eff: float, phi: float, T: float) -> float:
    """Integrated click density 2 eps gamma_eff sin^2(phi) exp(-gamma_eff t) over [0, T]."""
    return 2.0 * eps * math.sin(phi) ** 2 * -math.expm1(-gamma_eff * T)


def pi_single_window_fidelity(Gamma: float, gamma_eff: float, phi: float, T: float) -> float:
    """Click-density weighted average of cos^2(phi) (1 + exp(-Gamma t)) / 2 over [0, T]."""
    if not T > 0.0:
        raise DomainError(f"T={T} must be > 0")
    inside = -math.expm1(-gamma_eff * T)
    ratio = gamma_eff / (gamma_eff + Gamma) * -math.expm1(-(gamma_eff + Gamma) * T) / inside
    return math.cos(phi) ** 2 * (0.5 + 0.5 * ratio)


def pi_single_bound(Gamma_over_gamma_eff: float, P_over_eps: float) -> float:
    """Closed-form optimum of the single-click pi scheme for F close to 1."""
    return 1.0 - math.sqrt(Gamma_over_gamma_eff / 8.0) * math.sqrt(P_over_eps)


@dataclass(frozen=True)
class PiSingleOptimum:
    phi: float
    T: float
    fidelity: float
    P_over_eps: float


def optimize_pi_single(Gamma: float, gamma_eff: float, P_over_eps: float, n_T: int = 400) -> PiSingleOptimum:
    """Best window-averaged fidelity at fixed P/eps over a (phi, T) search.

    For each window length on a log grid phi is fixed by the success
    constraint; the best grid point is then polished with a bounded scalar
    search in log T.
    """
    from scipy.optimize import minimize_scalar

    if not 0.0 < P_over_eps < 2.0:
        raise DomainError("P/eps must lie in (0, 2)")

    def phi_for(T):
        s2 = P_over_eps / (2.0 * -math.expm1(-gamma_eff * T))
        return math.asin(math.sqrt(s2)) if s2 < 1.0 else None

    def infidelity(logT):
        T = math.exp(logT)
        phi = phi_for(T)
        if phi is None:
            return 1.0
        return 1.0 - pi_single_window_fidelity(Gamma, gamma_eff, phi, T)

    grid = np.linspace(math.log(1e-6 / gamma_eff), math.log(50.0 / gamma_eff), n_T)
    vals = [infidelity(x) for x in grid]
    i = int(np.argmin(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, n_T - 1)]
    res = minimize_scalar(infidelity, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    best = res.x if res.fun < vals[i] else grid[i]
    T = math.exp(best)
    phi = phi_for(T)
    return PiSingleOptimum(phi, T, pi_single_window_fidelity(Gamma, gamma_eff, phi, T), P_over_eps)


def pi_single_outcome(opt: OpticalParams, link: LinkParams, phi: float, T: float) -> GenerationOutcome:
    scheme = PiPulseSingle(phi, T)
    messages: list[str] = []
    _check_adiabatic(opt, messages)
    geff = opt.gamma_eff
    eps = collection_efficiency(opt, broadened=False) * link.transmission
    P = pi_single_click_probability(eps, geff, scheme.phi, scheme.T)
    F = pi_single_window_fidelity(opt.Gamma, geff, scheme.phi, scheme.T)
    em = Emission(Pem=math.sin(phi) ** 2, collection=eps, t0=opt.t0, gamma_e=opt.gamma_e, gamma_dc=opt.gamma_dc)
    return _finish(F, P, em.Pem, eps, em, link.t_c, messages, broadening=False)


def pi_double_fidelity(Gamma_over_gamma_eff: float, eps: float, P: float) -> float:
    if Gamma_over_gamma_eff == 0.0:
        return 1.0
    return 1.0 - Gamma_over_gamma_eff / eps * math.sqrt(2.0 * P)


def pi_double_outcome(opt: OpticalParams, link: LinkParams, P: float | None = None) -> GenerationOutcome:
    """Two-click pi scheme; ``P`` defaults to the full-window value eps^2 / 2."""
    messages: list[str] = []
    _check_adiabatic(opt, messages)
    eps = collection_efficiency(opt, broadened=False) * link.transmission
    P_max = eps * eps / 2.0
    if P is None:
        P = P_max
    elif not 0.0 < P <= P_max * (1 + 1e-12):
        raise DomainError(f"P={P} outside (0, eps^2/2={P_max}]")
    F = pi_double_fidelity(opt.Gamma / opt.gamma_eff, eps, P) if eps > 0 else 1.0
    em = Emission(Pem=1.0, collection=eps, t0=opt.t0, gamma_e=opt.gamma_e, gamma_dc=opt.gamma_dc)
    return _finish(F, P, 1.0, eps, em, link.t_c, messages, broadening=False)


def generate(scheme: SchemeKind, opt: OpticalParams, link: LinkParams) -> GenerationOutcome:
    if isinstance(scheme, ResonantScattering):
        return resonant_outcome(opt, link, scheme.resolve_photon_number)
    if isinstance(scheme, Raman):
        return raman_outcome(opt, link)
    if isinstance(scheme, PiPulseSingle):
        return pi_single_outcome(opt, link, scheme.phi, scheme.T)
    if isinstance(scheme, PiPulseDouble):
        return pi_double_outcome(opt, link, scheme.P)
    raise DomainError(f"unknown scheme {scheme!r}")


def shelving_loss(
    Gamma_S: float,
    delta: float,
    mu_ratio: float,
    epsilon: float,
    opt: OpticalParams,
    context: Literal["generation", "measurement"] = "generation",
) -> float:
    """Probability of bleaching into the metastable shelving state.

    This costs extra attempts (time) but never fidelity, since a dark emitter
    reveals itself in the next readout.
    """
    if not delta > 0.0 or not epsilon > 0.0:
        raise DomainError("delta and epsilon must be > 0")
    base = Gamma_S * opt.gamma / (delta**2 * epsilon**2) * mu_ratio**2
    if context == "generation":
        return 4.0 * base
    if context == "measurement":
        return base
    raise DomainError(f"unknown context {context!r}")
