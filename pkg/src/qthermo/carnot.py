"""Finite-time Carnot cycle on a qubit at first slow-driving order.

The cycle runs a hot isotherm, a quench, a cold isotherm and a second quench.
Quenches are instantaneous work strokes that keep the populations, so the
cold protocol must retrace the hot endpoints in reverse.

Heats per isotherm at inverse temperature ``beta``:

* zeroth order ``Q0 = Delta S / beta`` with ``S`` the Gibbs entropy;
* first order ``Q1 = -(A / (beta tau)) int_0^1 q'^2 / (q (1 - q)) dx <= 0``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
import scipy.integrate

from .dissipators import BathSpec
from .errors import AccuracyError, CycleConstructionError, DomainError
from .optimize import golden_max
from .protocols import (
    ControlProtocol,
    Q_MAX,
    Q_MIN,
    cosine_branch,
    cosine_parameters,
    logit,
)

Amplitude = Union[float, Callable[[np.ndarray], np.ndarray]]
MESH_RTOL = 1e-6


def binary_entropy(p):
    p = np.asarray(p, dtype=float)
    return -(p * np.log(p) + (1 - p) * np.log1p(-p))


def zeroth_order_heat(beta: float, p_in: float, p_fin: float) -> float:
    """Quasi-static heat ``[S(p_fin) - S(p_in)] / beta``."""
    for p in (p_in, p_fin):
        if not 0 < p < 1:
            raise DomainError(f"endpoint population must lie in (0, 1), got {p}")
    if not beta > 0:
        raise DomainError(f"beta must be > 0, got {beta}")
    return float((binary_entropy(p_fin) - binary_entropy(p_in)) / beta)


def amplitude_for_bath(bath: BathSpec) -> Callable[[np.ndarray], np.ndarray]:
    """S-D amplitude as a function of the ground population."""
    if bath.kind == "bosonic":
        return lambda q: (2 * np.asarray(q) - 1) / bath.rate
    return lambda q: np.full_like(np.asarray(q, dtype=float), 1.0 / bath.rate)


def _as_callable(A: Amplitude) -> Callable[[np.ndarray], np.ndarray]:
    if callable(A):
        return A
    if not A > 0:
        raise DomainError(f"amplitude must be > 0, got {A}")
    return lambda q: np.full_like(np.asarray(q, dtype=float), float(A))


def _checked_integral(protocol: ControlProtocol, fun) -> float:
    coarse = protocol.integrate(fun)
    fine = protocol.integrate(fun, n=2 * protocol.mesh)
    if abs(coarse - fine) > MESH_RTOL * max(abs(fine), 1e-300):
        raise AccuracyError(f"quadrature not converged: {coarse!r} vs {fine!r} on a refined mesh")
    return fine


def first_order_heat(A: Amplitude, beta: float, protocol: ControlProtocol) -> float:
    """``-(1/beta) int A q_dot^2 / (q (1 - q)) dt`` over the stroke."""
    if not beta > 0:
        raise DomainError(f"beta must be > 0, got {beta}")
    if protocol.is_static:
        return 0.0
    amp = _as_callable(A)
    integral = _checked_integral(protocol, lambda x, q, dq, d2q: amp(q) * dq**2 / (q * (1 - q)))
    return -integral / (beta * protocol.tau)


def shape_functional(protocol: ControlProtocol, form: str = "second") -> float:
    """``F = |int_0^1 ln(q/(1-q)) q'' dx|``.

    ``form="first"`` evaluates the integrated-by-parts form
    ``int q'^2 / (q (1 - q)) dx``; the two agree when ``q'`` vanishes at both ends.
    """
    if protocol.is_static:
        return 0.0
    if form == "second":
        return abs(protocol.integrate(lambda x, q, dq, d2q: logit(q) * d2q))
    if form == "first":
        return protocol.integrate(lambda x, q, dq, d2q: dq**2 / (q * (1 - q)))
    raise DomainError(f"form must be 'first' or 'second', got {form!r}")


@dataclass(frozen=True)
class CycleReport:
    Q0_H: float
    Q0_C: float
    Q1_H: float
    Q1_C: float
    alpha_H: float
    alpha_C: float
    eta: float
    eta_carnot: float
    power: float
    tau_H: float
    tau_C: float

    @property
    def work(self) -> float:
        return self.Q0_H + self.Q1_H + self.Q0_C + self.Q1_C


def cycle_report(hot: ControlProtocol, cold: ControlProtocol, bath_H: BathSpec, bath_C: BathSpec,
                 A_H: Amplitude | None = None, A_C: Amplitude | None = None) -> CycleReport:
    """Heats, efficiency and power of one Carnot cycle.

    Amplitudes default to the closed-form values of the bath models.
    """
    if not bath_H.temperature > bath_C.temperature:
        raise CycleConstructionError("hot bath must be hotter than the cold bath")
    if abs(cold.q0 - hot.q1) > 1e-12 or abs(cold.q1 - hot.q0) > 1e-12:
        raise CycleConstructionError(
            "quench continuity violated: the cold isotherm must run from the hot end "
            f"population {hot.q1} back to {hot.q0}"
        )
    A_H = amplitude_for_bath(bath_H) if A_H is None else A_H
    A_C = amplitude_for_bath(bath_C) if A_C is None else A_C
    Q0_H = zeroth_order_heat(bath_H.beta, hot.q0, hot.q1)
    Q0_C = zeroth_order_heat(bath_C.beta, cold.q0, cold.q1)
    if Q0_H < 0:
        raise CycleConstructionError("hot isotherm must absorb heat (entropy must increase)")
    ratio = -bath_C.beta / bath_H.beta
    if abs(Q0_H - ratio * Q0_C) > 1e-12 * max(1.0, abs(Q0_H)):
        raise CycleConstructionError("zeroth-order heats violate the entropy balance")
    Q1_H = first_order_heat(A_H, bath_H.beta, hot)
    Q1_C = first_order_heat(A_C, bath_C.beta, cold)
    eta_c = 1 - bath_C.temperature / bath_H.temperature
    if Q0_H == 0:
        alpha_H = alpha_C = 0.0
        eta = 0.0
    else:
        alpha_H = Q1_H / Q0_H
        alpha_C = Q1_C / Q0_C
        eta = efficiency(alpha_C, alpha_H, bath_C.temperature, bath_H.temperature)
    power = (Q0_H + Q1_H + Q0_C + Q1_C) / (hot.tau + cold.tau)
    return CycleReport(Q0_H, Q0_C, Q1_H, Q1_C, alpha_H, alpha_C, eta, eta_c, power, hot.tau, cold.tau)


def efficiency(alpha_C: float, alpha_H: float, T_C: float, T_H: float) -> float:
    """``1 - (1 - eta_c)(1 + alpha_C) / (1 + alpha_H)``."""
    return 1 - (T_C / T_H) * (1 + alpha_C) / (1 + alpha_H)


def rescaled_power(lambda_C: float, lambda_H: float, alpha_C: float, alpha_H: float,
                   tau_C: float, tau_H: float, beta_C: float, beta_H: float, Q0_H: float = 1.0) -> float:
    """Power after stretching the strokes to ``lambda_j * tau_j``.

    First-order heats scale as ``1/lambda``; the work is
    ``Q0_H (eta_c - |alpha_H|/lambda_H - (beta_H/beta_C) alpha_C/lambda_C)``.
    """
    eta_c = 1 - beta_H / beta_C
    work = Q0_H * (eta_c - abs(alpha_H) / lambda_H - (beta_H / beta_C) * alpha_C / lambda_C)
    return work / (lambda_C * tau_C + lambda_H * tau_H)


def rescaled_efficiency(lambda_C: float, lambda_H: float, alpha_C: float, alpha_H: float,
                        beta_C: float, beta_H: float) -> float:
    return efficiency(alpha_C / lambda_C, alpha_H / lambda_H, 1 / beta_C, 1 / beta_H)


def optimal_rescaling(alpha_C: float, alpha_H: float, tau_C: float, tau_H: float,
                      beta_C: float, beta_H: float) -> tuple[float, float]:
    """Stretch factors ``(lambda_C, lambda_H)`` maximizing :func:`rescaled_power`.

    With ``r = sqrt(|alpha_H| beta_C tau_H / (alpha_C beta_H tau_C))``:
    ``lambda_C = 2 alpha_C beta_H (1 + r) / (eta_c beta_C)`` and
    ``lambda_H = lambda_C r tau_C / tau_H``.
    """
    eta_c = 1 - beta_H / beta_C
    if not eta_c > 0:
        raise DomainError(f"Carnot efficiency must be positive, got {eta_c}")
    if not (alpha_C > 0 and alpha_H < 0):
        raise DomainError("need alpha_C > 0 and alpha_H < 0")
    if not (tau_C > 0 and tau_H > 0):
        raise DomainError("stroke durations must be positive")
    r = np.sqrt(abs(alpha_H) * beta_C * tau_H / (alpha_C * beta_H * tau_C))
    lam_C = 2 * alpha_C * beta_H * (1 + r) / (eta_c * beta_C)
    lam_H = lam_C * r * tau_C / tau_H
    return float(lam_C), float(lam_H)


def euler_lagrange_residual(q, dq, d2q):
    """``2 q'' + q'^2 (2q - 1) / (q (1 - q))``; zero on the optimal branch."""
    return 2 * d2q + dq**2 * (2 * q - 1) / (q * (1 - q))


@dataclass(frozen=True)
class OptimalShape:
    q0: float
    q1: float
    omega: float
    phi: float
    F_bar: float
    delta_F: float

    @property
    def F_min(self) -> float:
        return self.F_bar + self.delta_F

    def qbar(self, x):
        return cosine_branch(x, self.omega, self.phi)

    def protocol(self, k: int, tau: float = 1.0, mesh: int = 2000) -> ControlProtocol:
        """Member ``q_k`` of the smoothed family approaching the infimum."""
        return ControlProtocol(self.q0, self.q1, tau=tau, shape="cosine", k=k, mesh=mesh)

    def smoothing_table(self, ks, gamma: float, tau: float):
        """``(k, F[q_k], flag)`` rows; ``flag`` marks ``max|q''| > 10 Gamma tau``."""
        rows = []
        for k in ks:
            p = self.protocol(k, tau)
            _, _, d2q = p.evaluate(p.mesh_points())
            rows.append((int(k), shape_functional(p, form="first"),
                         bool(np.abs(d2q).max() > 10 * gamma * tau)))
        return rows


def optimal_shape(q0: float, q1: float) -> OptimalShape:
    """Cosine branch joining ``q0`` to ``q1`` and the infimum of ``F``.

    ``F[qbar]`` is the second-derivative form on the bare branch, whose end
    slopes do not vanish; ``delta_F = qbar'(1) L(1) - qbar'(0) L(0)`` with
    ``L = ln(q/(1-q))`` restores the boundary terms, so the infimum equals
    ``omega^2``.
    """
    omega, phi = cosine_parameters(q0, q1)
    x = np.linspace(0.0, 1.0, 4001)
    q, dq, d2q = cosine_branch(x, omega, phi)
    F_bar = float(-scipy.integrate.simpson(logit(q) * d2q, x=x))
    delta_F = float(dq[-1] * logit(q[-1]) - dq[0] * logit(q[0]))
    return OptimalShape(q0, q1, omega, phi, F_bar, delta_F)


def quasi_otto_objective(q):
    """``ln(q/(1-q))^2 q (1 - q) / 4``."""
    return logit(q) ** 2 * q * (1 - q) / 4


def quasi_otto_constants(tol: float = 1e-10) -> tuple[float, float]:
    """``(xi, q_star)``: the maximum of :func:`quasi_otto_objective` on ``(1/2, 1)``."""
    q_star, xi = golden_max(lambda q: float(quasi_otto_objective(q)), 0.5, Q_MAX, tol)
    return float(xi), float(q_star)


def max_power(deltaS0: float, T_C: float, T_H: float, A: float, F_value: float) -> float:
    """``(Delta S)^2 (sqrt(T_C) - sqrt(T_H))^2 / (4 A F)``."""
    if not (A > 0 and F_value > 0):
        raise DomainError("need A > 0 and F > 0")
    return float(deltaS0**2 * (np.sqrt(T_C) - np.sqrt(T_H)) ** 2 / (4 * A * F_value))


def quasi_otto_power(q: float, T_C: float, T_H: float, A: float) -> float:
    """Limit of :func:`max_power` as the isotherm endpoints coalesce at ``q``."""
    if not Q_MIN <= q <= Q_MAX:
        raise DomainError(f"q outside [{Q_MIN}, {Q_MAX}]")
    return float(quasi_otto_objective(q) * (np.sqrt(T_H) - np.sqrt(T_C)) ** 2 / A)
