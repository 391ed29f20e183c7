"""Information-flow diagnostics for the ancilla bath model."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError, DomainError
from .nonmarkov import AncillaBathSpec, full_generator, relaxation_profile
from .qdyn import (
    check_density_matrix,
    evolve_vector,
    ground_population,
    partial_trace,
    trace_distance,
    vectorize,
)

BLP_T_MAX = 15.0
BLP_MESH = 10_000
BLP_RTOL = 0.01
BLP_ZERO = 1e-10


def _require_resonant_equal_rates(spec: AncillaBathSpec, eps: float) -> None:
    if abs(eps - spec.E) > 1e-12:
        raise DomainError("closed-form dynamics requires resonance (eps = E)")
    if abs(spec.Gamma_A - spec.Gamma_S) > 1e-12 * spec.Gamma_S:
        raise DomainError("closed-form dynamics requires Gamma_A = Gamma_S")


def _positive_increments(D: np.ndarray) -> float:
    return float(np.clip(np.diff(D), 0.0, None).sum())


def blp_measure(spec: AncillaBathSpec, p1_0: float, p2_0: float, t_max: float | None = None,
                mesh: int = BLP_MESH, max_doublings: int = 6) -> float:
    """Backflow of distinguishability for two diagonal initial system states.

    The trace distance is ``|p1(t) - p2(t)| = |p1(0) - p2(0)| |f(t)|``; its
    positive increments are summed over a uniform mesh on ``[0, t_max]``
    (default ``15 / Gamma``), doubling the mesh until the sum changes by
    less than 1%.
    """
    _require_resonant_equal_rates(spec, spec.E)
    for p in (p1_0, p2_0):
        if not 0 <= p <= 1:
            raise DomainError(f"population must lie in [0, 1], got {p}")
    t_max = BLP_T_MAX / spec.Gamma_S if t_max is None else t_max
    d0 = abs(p1_0 - p2_0)

    def at(n):
        t = np.linspace(0.0, t_max, n)
        return _positive_increments(d0 * np.abs(relaxation_profile(t, spec.y, spec.Gamma_S)))

    prev = at(mesh)
    for _ in range(max_doublings):
        mesh *= 2
        cur = at(mesh)
        if abs(cur - prev) <= BLP_RTOL * max(abs(cur), BLP_ZERO):
            return cur
        prev = cur
    raise AccuracyError("BLP measure did not stabilize under mesh refinement")


def blp_measure_propagated(spec: AncillaBathSpec, rho1: np.ndarray, rho2: np.ndarray,
                           t_max: float | None = None, mesh: int = 2000) -> float:
    """Same measure from propagating both joint states; works for any inputs."""
    t_max = BLP_T_MAX / spec.Gamma_S if t_max is None else t_max
    t = np.linspace(0.0, t_max, mesh)
    L = full_generator(spec, spec.E)
    omega_a = _ancilla_gibbs(spec)
    states = []
    for rho in (rho1, rho2):
        v = evolve_vector(L, vectorize(np.kron(check_density_matrix(rho), omega_a)), t)
        states.append(partial_trace(v.reshape(t.size, 4, 4, order="F"), "system"))
    D = np.array([trace_distance(a, b) for a, b in zip(*states)])
    return _positive_increments(D)


def blp_threshold(Gamma: float = 1.0, lo: float = 0.0, hi: float = 4.0, tol: float = 1e-6,
                  T: float = 1.0, E: float = 1.0) -> float:
    """Smallest coupling ``y`` with a nonzero BLP measure, by bisection."""
    def N(y):
        return blp_measure(AncillaBathSpec(T, Gamma, Gamma, y * Gamma, E), 1.0, 0.0)

    if N(hi) <= BLP_ZERO:
        raise DomainError(f"no backflow up to y = {hi}")
    if N(lo) > BLP_ZERO:
        return lo
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if N(mid) > BLP_ZERO:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class FreeEnergyTrace:
    times: np.ndarray
    F_total: np.ndarray
    F_S: np.ndarray
    F_A: np.ndarray
    MI: np.ndarray

    def decomposition_residual(self) -> float:
        return float(np.abs(self.F_total - self.F_S - self.F_A - self.MI).max())


def _ancilla_gibbs(spec: AncillaBathSpec) -> np.ndarray:
    pa = ground_population(spec.beta, spec.E)
    return np.diag([pa, 1 - pa]).astype(complex)


def _entropies(states: np.ndarray) -> np.ndarray:
    lam = np.clip(np.linalg.eigvalsh(states), 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(lam > 0, lam * np.log(np.where(lam > 0, lam, 1.0)), 0.0)
    return -terms.sum(axis=-1)


def _relative_entropy_to_diagonal(states: np.ndarray, log_diag: np.ndarray) -> np.ndarray:
    """``S(rho || diag(exp(log_diag)))`` for a stack of states."""
    pops = np.real(np.diagonal(states, axis1=-2, axis2=-1))
    return -_entropies(states) - pops @ log_diag


def free_energy_trace(spec: AncillaBathSpec, rho0_S: np.ndarray, t_max: float, mesh: int = 10_000) -> FreeEnergyTrace:
    """Excess free energy of the joint state and its local and correlation parts.

    The joint state starts as ``rho0_S (x) Omega_A`` and evolves at resonance.
    All four series are relative entropies divided by ``beta``.
    """
    if not t_max > 0:
        raise DomainError("t_max must be > 0")
    rho0_S = check_density_matrix(rho0_S)
    omega_a = _ancilla_gibbs(spec)
    omega_s = omega_a  # resonance: same gap, same temperature
    times = np.linspace(0.0, t_max, mesh)
    L = full_generator(spec, spec.E)
    v = evolve_vector(L, vectorize(np.kron(rho0_S, omega_a)), times)
    R = v.reshape(times.size, 4, 4, order="F")
    R = 0.5 * (R + np.conj(np.swapaxes(R, -1, -2)))
    rho_s = partial_trace(R, "system")
    rho_a = partial_trace(R, "ancilla")
    log_s = np.log(np.real(np.diag(omega_s)))
    log_a = np.log(np.real(np.diag(omega_a)))
    log_joint = (log_s[:, None] + log_a[None, :]).reshape(-1)
    T = 1.0 / spec.beta
    F_total = T * _relative_entropy_to_diagonal(R, log_joint)
    F_S = T * _relative_entropy_to_diagonal(rho_s, log_s)
    F_A = T * _relative_entropy_to_diagonal(rho_a, log_a)
    MI = T * (_entropies(rho_s) + _entropies(rho_a) - _entropies(R))
    return FreeEnergyTrace(times, F_total, F_S, F_A, MI)
