"""Thermalizing GKSL dissipators for a driven qubit.

Three families, each with the Gibbs state of ``eps * sigma_z / 2`` as its
unique fixed point:

``reset``      ``D[rho] = Gamma * (Omega - rho)``
``fermionic``  jump rates ``Gamma_- = (1 - N_F) Gamma``, ``Gamma_+ = N_F Gamma``
``bosonic``    jump rates ``Gamma_- = (1 + N_B) Gamma``, ``Gamma_+ = N_B Gamma``

with ``N_F, N_B`` evaluated at ``beta * eps``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import DomainError
from .qdyn import (
    gibbs_qubit,
    ground_population,
    lindblad_generator,
    trace_row,
    vectorize,
)

BathKind = Literal["reset", "fermionic", "bosonic"]
BATH_KINDS: tuple[str, ...] = ("reset", "fermionic", "bosonic")

# |0> is the ground state: lowering takes |1> to |0>
SIGMA_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
SIGMA_PLUS = SIGMA_MINUS.T.copy()


@dataclass(frozen=True)
class BathSpec:
    temperature: float
    rate: float
    kind: str = "reset"

    def __post_init__(self):
        if not self.temperature > 0:
            raise DomainError(f"temperature must be > 0, got {self.temperature}")
        if not self.rate > 0:
            raise DomainError(f"rate must be > 0, got {self.rate}")
        if self.kind not in BATH_KINDS:
            raise DomainError(f"unknown bath kind {self.kind!r}; expected one of {BATH_KINDS}")

    @property
    def beta(self) -> float:
        return 1.0 / self.temperature


def occupation(kind: str, x: float) -> float:
    """Fermi (``1/(e^x+1)``) or Bose (``1/(e^x-1)``) occupation at ``x = beta*eps``."""
    if kind == "fermionic":
        return float(0.5 * (1.0 - np.tanh(0.5 * x)))
    if kind == "bosonic":
        if not x > 0:
            raise DomainError(f"Bose occupation needs x > 0, got {x}")
        return float(1.0 / np.expm1(x))
    raise DomainError(f"occupation is defined for 'fermionic' or 'bosonic', got {kind!r}")


def jump_rates(bath: BathSpec, eps: float) -> tuple[float, float]:
    """``(Gamma_-, Gamma_+)``: decay to and excitation from the ground state."""
    x = bath.beta * eps
    if bath.kind == "fermionic":
        n = occupation("fermionic", x)
        return (1.0 - n) * bath.rate, n * bath.rate
    if bath.kind == "bosonic":
        n = occupation("bosonic", x)
        return (1.0 + n) * bath.rate, n * bath.rate
    raise DomainError("jump rates are defined only for fermionic and bosonic baths")


_TRACE2 = trace_row(2)
_EYE4 = np.eye(4)
_LOWER = lindblad_generator(SIGMA_MINUS)
_RAISE = lindblad_generator(SIGMA_PLUS)


def reset_dissipator(bath: BathSpec, eps: float) -> np.ndarray:
    """Superoperator of ``Gamma * (Omega Tr[rho] - rho)``."""
    omega = gibbs_qubit(bath.beta, eps)
    return bath.rate * (np.outer(vectorize(omega), _TRACE2) - _EYE4)


def two_level_dissipator(bath: BathSpec, eps: float) -> np.ndarray:
    if bath.kind not in ("fermionic", "bosonic"):
        raise DomainError(f"two-level dissipator needs a fermionic or bosonic bath, got {bath.kind!r}")
    if eps < 0:
        raise DomainError(f"gap must be >= 0, got {eps}")
    g_minus, g_plus = jump_rates(bath, eps)
    return g_minus * _LOWER + g_plus * _RAISE


def dissipator(bath: BathSpec, eps: float) -> np.ndarray:
    """Dissipator of any supported kind at gap ``eps``."""
    if eps < 0:
        raise DomainError(f"gap must be >= 0, got {eps}")
    if bath.kind == "reset":
        return reset_dissipator(bath, eps)
    return two_level_dissipator(bath, eps)


def sd_amplitude(bath: BathSpec, eps: float) -> float:
    """Closed-form slow-driving amplitude of a single-qubit bath.

    The ground population relaxes at the total rate ``Gamma_- + Gamma_+``,
    so ``A`` is its inverse: ``1/Gamma`` for reset and fermionic baths and
    ``(2p - 1)/Gamma`` for the bosonic one.
    """
    if bath.kind == "reset":
        return 1.0 / bath.rate
    g_minus, g_plus = jump_rates(bath, eps)
    return 1.0 / (g_minus + g_plus)


def thermal_population(bath: BathSpec, eps: float) -> float:
    return ground_population(bath.beta, eps)
