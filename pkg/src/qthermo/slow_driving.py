"""First-order slow-driving expansion.

For a generator ``L_t`` with instantaneous fixed point ``rho0(t)``, the
state follows ``rho(t) = rho0(t) + rho1(t) + O(1/tau^2)`` with ``rho1`` the
traceless solution of ``L_t[rho1] = d rho0 / dt``. For a qubit the ground
population correction is proportional to the control velocity,
``rho1_00 = -A * dp/dt``, which defines the amplitude ``A``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.integrate

from .dissipators import BathSpec, dissipator
from .errors import DegeneracyError, DimensionError, DomainError
from .protocols import ControlProtocol
from .qdyn import (
    devectorize,
    hamiltonian_generator,
    propagate_driven,
    qubit_hamiltonian,
    trace_row,
    vectorize,
)

SINGULAR_RTOL = 1e-12
TRACE_TOL = 1e-10
RESIDUAL_TOL = 1e-9
PDOT_FLOOR = 1e-14
SAMPLE_RTOL = 1e-8
MIN_GAMMA_TAU = 20.0


def sd_first_order(L: np.ndarray, rho0_dot: np.ndarray, trace_functional=None) -> np.ndarray:
    """Traceless solution ``x`` of ``L x = rho0_dot``.

    ``rho0_dot`` is either a ``d x d`` matrix (returned in the same form) or
    a vector; for vectors whose length is not a perfect square the row
    ``trace_functional`` must be supplied. The zero mode of ``L`` is
    deflated by appending the trace row to the linear system.
    """
    L = np.asarray(L, dtype=complex)
    as_matrix = np.ndim(rho0_dot) == 2
    b = vectorize(rho0_dot) if as_matrix else np.asarray(rho0_dot, dtype=complex)
    D = b.size
    if L.shape != (D, D):
        raise DimensionError(f"generator shape {L.shape} incompatible with input of size {D}")
    if trace_functional is None:
        d = int(round(np.sqrt(D)))
        if d * d != D:
            raise DimensionError("a trace functional is required for non-square dimensions")
        trace_functional = trace_row(d)
    tr = np.asarray(trace_functional, dtype=complex).reshape(1, D)
    scale = max(1.0, float(np.abs(b).max()))
    if abs(tr @ b) > TRACE_TOL * scale:
        raise DomainError("rho0_dot must be traceless")
    M = np.vstack([L, tr])
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[-1] <= SINGULAR_RTOL * sv[0]:
        raise DegeneracyError("generator is singular on the traceless subspace")
    x, *_ = np.linalg.lstsq(M, np.concatenate([b, [0.0]]), rcond=None)
    if np.abs(L @ x - b).max() > RESIDUAL_TOL * scale:
        raise DegeneracyError("rho0_dot is not in the range of the generator")
    return devectorize(x) if as_matrix else x


def extract_amplitude(rho1_00: float, p_dot: float) -> float:
    """``A = -rho1_00 / p_dot``."""
    if abs(p_dot) <= PDOT_FLOOR:
        raise DomainError("amplitude undefined at a stationary control point")
    return -float(np.real(rho1_00)) / float(p_dot)


_UNIT_GAP = hamiltonian_generator(qubit_hamiltonian(1.0))


def qubit_generator(bath: BathSpec, eps: float) -> np.ndarray:
    """Full qubit generator ``-i[H, .] + D`` at gap ``eps``."""
    return eps * _UNIT_GAP + dissipator(bath, eps)


@dataclass(frozen=True)
class SDExpansion:
    times: np.ndarray
    zeroth: np.ndarray
    first: np.ndarray
    amplitude_times: np.ndarray
    amplitude_samples: np.ndarray


def sd_expansion(protocol: ControlProtocol, bath: BathSpec, n: int | None = None) -> SDExpansion:
    """Zeroth and first order states along a qubit protocol."""
    x = protocol.mesh_points(n)
    q, dqx, _ = protocol.evaluate(x)
    eps, _ = protocol.gap(bath.beta, x)
    p_dot = dqx / protocol.tau
    zeroth = np.zeros((x.size, 2, 2), dtype=complex)
    first = np.zeros_like(zeroth)
    zeroth[:, 0, 0] = q
    zeroth[:, 1, 1] = 1 - q
    for i in range(x.size):
        rdot = np.diag([p_dot[i], -p_dot[i]]).astype(complex)
        first[i] = sd_first_order(qubit_generator(bath, eps[i]), rdot)
    mask = np.abs(p_dot) > SAMPLE_RTOL * max(np.abs(p_dot).max(), PDOT_FLOOR)
    if protocol.is_static:
        mask[:] = False
    amps = np.array([extract_amplitude(first[i, 0, 0], p_dot[i]) for i in np.flatnonzero(mask)])
    return SDExpansion(x * protocol.tau, zeroth, first, x[mask] * protocol.tau, amps)


def exact_trajectory(protocol: ControlProtocol, bath: BathSpec, n_out: int = 401,
                     steps: int = 2000) -> tuple[np.ndarray, np.ndarray]:
    """RK4 trajectory starting from the Gibbs state at ``q0``.

    The internal step is ``tau / steps``, capped at half the
    inverse spectral radius of the generator for stability.
    """
    tau = protocol.tau
    beta = bath.beta

    def L_of_t(t):
        eps, _ = protocol.gap(beta, min(max(t / tau, 0.0), 1.0))
        return qubit_generator(bath, float(eps))

    radius = max(np.abs(np.linalg.eigvals(L_of_t(s * tau))).max() for s in (0.0, 0.5, 1.0))
    h = min(tau / steps, 0.5 / radius)
    grid = np.linspace(0.0, tau, n_out)
    rho0 = np.diag([protocol.q0, 1 - protocol.q0]).astype(complex)
    return grid, propagate_driven(L_of_t, rho0, grid, max_step=h)


def sd_residual(protocol: ControlProtocol, bath: BathSpec, n_out: int = 401) -> float:
    """Max-norm gap between the exact state and ``rho0 + rho1`` on the mesh."""
    grid, states = exact_trajectory(protocol, bath, n_out=n_out)
    x = grid / protocol.tau
    q, dqx, _ = protocol.evaluate(x)
    eps, _ = protocol.gap(bath.beta, x)
    worst = 0.0
    for i in range(x.size):
        rdot = np.diag([dqx[i], -dqx[i]]).astype(complex) / protocol.tau
        approx = np.diag([q[i], 1 - q[i]]) + sd_first_order(qubit_generator(bath, eps[i]), rdot)
        worst = max(worst, float(np.abs(states[i] - approx).max()))
    return worst


def sd_accuracy_scan(protocol: ControlProtocol, bath: BathSpec, durations) -> list[tuple[float, float]]:
    """``(tau, residual)`` rows; the residual should fall as ``1/tau^2``."""
    return [(float(tau), sd_residual(protocol.with_duration(float(tau)), bath)) for tau in durations]


def trajectory_heat(protocol: ControlProtocol, bath: BathSpec, grid, states) -> float:
    """Heat ``-int eps dp`` absorbed along a computed trajectory.

    Integrated by parts as ``-[eps p] + int p d eps`` with Simpson's rule.
    """
    x = np.asarray(grid) / protocol.tau
    eps, deps_dx = protocol.gap(bath.beta, x)
    p = np.real(states[:, 0, 0])
    boundary = eps[-1] * p[-1] - eps[0] * p[0]
    return float(-boundary + scipy.integrate.simpson(p * deps_dx, x=x))


@dataclass(frozen=True)
class DissipationReport:
    deltaS_irr: float
    sigma: float
    dW1: float


def dissipation_report(protocol: ControlProtocol, bath: BathSpec, n: int | None = None) -> DissipationReport:
    """Irreversible entropy ``beta * int Tr[rho1 dH]`` of one isothermal stroke.

    ``rho1`` is computed numerically from the generator, so the report does
    not assume any closed-form amplitude.
    """
    tau = protocol.tau
    if bath.rate * tau < MIN_GAMMA_TAU:
        raise DomainError(f"slow driving needs Gamma*tau >= {MIN_GAMMA_TAU}, got {bath.rate * tau}")
    if protocol.is_static:
        return DissipationReport(0.0, 0.0, 0.0)
    beta = bath.beta

    def integrand(x, q, dq, d2q):
        eps = np.log(q / (1 - q)) / beta
        deps_dx = dq / (q * (1 - q)) / beta
        out = np.empty_like(x)
        for i in range(x.size):
            rdot = np.diag([dq[i], -dq[i]]).astype(complex) / tau
            r1 = sd_first_order(qubit_generator(bath, eps[i]), rdot)
            # Tr[rho1 dH/dx] with dH = diag(-1, 1) deps / 2
            out[i] = 0.5 * deps_dx[i] * np.real(r1[1, 1] - r1[0, 0])
        return out

    dW1 = protocol.integrate(integrand, n=n if n is not None else 400)
    dS = beta * dW1
    return DissipationReport(dS, dS * tau, dW1)
