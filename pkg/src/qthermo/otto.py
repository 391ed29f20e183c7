"""Otto cycle with instantaneous quenches and partially thermalizing isochores.

During an isochore of duration ``t`` at gap ``eps_j`` the ground population
relaxes as ``p(t) = p_j + (p(0) - p_j) f_j(t)`` with ``f_j(0) = 1``. The cold
isochore sits at ``eps1`` (bath ``beta_C``), the hot one at ``eps2 > eps1``
(bath ``beta_H``).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dissipators import BathSpec, reset_dissipator
from .errors import AccuracyError, DomainError
from .optimize import golden_max
from .qdyn import ground_population, propagate_const

Profile = Callable[[float], float]
STEADY_TOL = 1e-12
TAU_BRACKET = (1e-3, 50.0)
TAU_TOL = 1e-8
SUP_PROBE = 1e-6


def exponential_profile(rate: float) -> Profile:
    return lambda t: float(np.exp(-rate * t))


@dataclass(frozen=True)
class OttoSpec:
    eps1: float
    eps2: float
    beta_C: float
    beta_H: float
    tau_C: float = 1.0
    tau_H: float = 1.0
    f_C: Profile = exponential_profile(1.0)
    f_H: Profile = exponential_profile(1.0)

    def __post_init__(self):
        if not (0 <= self.eps1 <= self.eps2):
            raise DomainError(f"need 0 <= eps1 <= eps2, got {self.eps1}, {self.eps2}")
        if not (self.beta_C > 0 and self.beta_H > 0):
            raise DomainError("inverse temperatures must be positive")
        if self.beta_C * self.eps1 < self.beta_H * self.eps2 - 1e-15:
            raise DomainError("engine ordering violated: need beta_C eps1 >= beta_H eps2")
        if not (self.tau_C > 0 and self.tau_H > 0):
            raise DomainError("isochore durations must be positive")
        for name in ("f_C", "f_H"):
            if abs(getattr(self, name)(0.0) - 1.0) > 1e-12:
                raise DomainError(f"{name}(0) must equal 1")

    @property
    def p_C(self) -> float:
        return ground_population(self.beta_C, self.eps1)

    @property
    def p_H(self) -> float:
        return ground_population(self.beta_H, self.eps2)

    @property
    def eta_carnot(self) -> float:
        return 1 - self.beta_H / self.beta_C


def itt_heats(spec: OttoSpec) -> tuple[float, float, float]:
    """``(Q_abs, Q_rel, eta_o)`` for fully thermalizing isochores."""
    q_abs = spec.eps2 * (spec.p_C - spec.p_H)
    eta_o = 1 - spec.eps1 / spec.eps2 if spec.eps2 > 0 else 0.0
    return q_abs, -(1 - eta_o) * q_abs, eta_o


def itt_power(spec: OttoSpec) -> float:
    return (spec.eps2 - spec.eps1) * (spec.p_C - spec.p_H) / (spec.tau_C + spec.tau_H)


def thermalization_factor(fC: float, fH: float) -> float:
    """``(1 - f_H)(1 - f_C) / (1 - f_C f_H)``; lies in ``[0, 1]``."""
    for v in (fC, fH):
        if not (-1e-12 <= v <= 1 + 1e-12):
            raise DomainError(f"relaxation factor {v} outside [0, 1]")
    if fC * fH >= 1.0:
        return 0.0
    return (1 - fH) * (1 - fC) / (1 - fC * fH)


def exact_power(spec: OttoSpec) -> float:
    """Limit-cycle power for arbitrary relaxation profiles."""
    return itt_power(spec) * thermalization_factor(spec.f_C(spec.tau_C), spec.f_H(spec.tau_H))


def steady_cycle_populations(spec: OttoSpec, p_start: float | None = None,
                             max_cycles: int = 100000) -> tuple[float, float, int]:
    """Iterate the population map to its fixed point.

    Returns ``(p_after_cold, p_after_hot, cycles)``.
    """
    fC, fH = spec.f_C(spec.tau_C), spec.f_H(spec.tau_H)
    if fC * fH >= 1:
        raise AccuracyError("population map is not contracting")
    p = spec.p_H if p_start is None else p_start
    for n in range(1, max_cycles + 1):
        after_cold = spec.p_C + (p - spec.p_C) * fC
        after_hot = spec.p_H + (after_cold - spec.p_H) * fH
        if abs(after_hot - p) < STEADY_TOL:
            return after_cold, after_hot, n
        p = after_hot
    raise AccuracyError("steady cycle not reached")


@dataclass(frozen=True)
class SteadyCycle:
    alpha: float
    alpha_leading: float
    eta: float
    power: float
    power_leading: float
    p_after_cold: float
    p_after_hot: float


def reset_model_steady_cycle(Gamma_C: float, Gamma_H: float, tau_C: float, tau_H: float,
                             spec: OttoSpec) -> SteadyCycle:
    """Steady cycle for reset baths, with the leading-order corrections.

    ``alpha`` is the common ratio ``Q1_j / Q0_j``; its leading order is
    ``-(e^{-Gamma_C tau_C} + e^{-Gamma_H tau_H})``.
    """
    if Gamma_C * tau_C < 1 or Gamma_H * tau_H < 1:
        raise DomainError("leading-order treatment needs Gamma*tau >= 1 on both isochores")
    spec = OttoSpec(spec.eps1, spec.eps2, spec.beta_C, spec.beta_H, tau_C, tau_H,
                    exponential_profile(Gamma_C), exponential_profile(Gamma_H))
    after_cold, after_hot, _ = steady_cycle_populations(spec)
    dp_itt = spec.p_C - spec.p_H
    dp = after_cold - after_hot
    q_abs, _, eta_o = itt_heats(spec)
    alpha = dp / dp_itt - 1 if dp_itt != 0 else 0.0
    Q_H = spec.eps2 * dp
    Q_C = -spec.eps1 * dp
    eta = (Q_H + Q_C) / Q_H if Q_H != 0 else 0.0
    alpha_lo = -(np.exp(-Gamma_C * tau_C) + np.exp(-Gamma_H * tau_H))
    power = (Q_H + Q_C) / (tau_C + tau_H)
    power_lo = q_abs * eta_o * (1 + alpha_lo) / (tau_C + tau_H)
    return SteadyCycle(float(alpha), float(alpha_lo), float(eta), float(power), float(power_lo),
                       float(after_cold), float(after_hot))


def reset_cycle_by_propagation(Gamma_C: float, Gamma_H: float, spec: OttoSpec, rho0: np.ndarray,
                               n_cycles: int) -> np.ndarray:
    """Compose exact isochore propagators for reset baths; returns states after each hot stroke."""
    L_C = reset_dissipator(BathSpec(1 / spec.beta_C, Gamma_C), spec.eps1)
    L_H = reset_dissipator(BathSpec(1 / spec.beta_H, Gamma_H), spec.eps2)
    rho = np.asarray(rho0, dtype=complex)
    out = []
    for _ in range(n_cycles):
        rho = propagate_const(L_C, rho, spec.tau_C)
        rho = propagate_const(L_H, rho, spec.tau_H)
        out.append(rho)
    return np.array(out)


def power_factor(f: Profile, tau_C: float, tau_H: float) -> float:
    """``C(tau_C, tau_H)``: power per unit ``(eps2 - eps1)(p_C - p_H)``."""
    return thermalization_factor(f(tau_C), f(tau_H)) / (tau_C + tau_H)


@dataclass(frozen=True)
class SymmetricOptimum:
    tau_star: float
    power: float
    at_lower_bound: bool


def symmetric_optimum(f: Profile, spec: OttoSpec, gamma: float = 1.0, grid: int = 2000,
                      check_pairs: int = 0, seed: int = 0) -> SymmetricOptimum:
    """Best common isochore duration ``tau`` for identical baths.

    A log-spaced scan over ``[1e-3, 50] / gamma`` locates the best cell, then
    golden-section refines inside it. When the optimum sits on the lower
    bracket the power is a supremum approached as ``tau -> 0``; ``tau_star``
    is then reported as ``0`` and the power is evaluated at ``1e-6 / gamma``,
    where the gap to the limit is far below any reported tolerance.
    """
    K = (spec.eps2 - spec.eps1) * (spec.p_C - spec.p_H)
    lo, hi = TAU_BRACKET[0] / gamma, TAU_BRACKET[1] / gamma
    taus = np.geomspace(lo, hi, grid)
    vals = np.array([power_factor(f, t, t) for t in taus])
    i = int(np.argmax(vals))
    if check_pairs:
        rng = np.random.default_rng(seed)
        for tc, th in rng.uniform(lo, hi, size=(check_pairs, 2)):
            bound = np.sqrt(power_factor(f, tc, tc) * power_factor(f, th, th))
            if power_factor(f, tc, th) > bound * (1 + 1e-12):
                raise AccuracyError(f"off-diagonal pair ({tc}, {th}) beats the diagonal bound")
    if i == 0:
        t0 = SUP_PROBE / gamma
        return SymmetricOptimum(0.0, K * power_factor(f, t0, t0), True)
    a, b = taus[i - 1], taus[min(i + 1, grid - 1)]
    tau, c = golden_max(lambda t: power_factor(f, t, t), a, b, TAU_TOL / gamma)
    return SymmetricOptimum(float(tau), K * float(c), False)
