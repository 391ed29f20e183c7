"""Dense operator algebra, thermal states and exact propagation for qubits.

Conventions used throughout the package
---------------------------------------
* Units: hbar = k_B = 1.
* Qubit basis ``|0>, |1>`` with ``|0>`` the ground state, so the driven
  Hamiltonian ``eps * sigma_z / 2`` is ``diag(-eps/2, +eps/2)``.
* Composite states are ordered ``system (x) ancilla``.
* Vectorization is column stacking: ``vec(A X B) = (B^T (x) A) vec(X)``.
  A density matrix ``rho`` maps to ``rho.reshape(-1, order="F")`` and the
  trace functional is the row ``vec(I)^T``.

States and generators are plain ``numpy`` arrays; nothing here mutates its
inputs.
"""
from __future__ import annotations

from typing import Callable, Literal

import numpy as np
import scipy.linalg

from .errors import AccuracyError, DimensionError, DomainError

STATE_TOL = 1e-12
PSD_FLOOR = -1e-10
# eigenvector conditioning above which e^{Lt} falls back to scaling-and-squaring
EIG_COND_MAX = 1e8


# --------------------------------------------------------------------------
# states
# --------------------------------------------------------------------------

def qubit_hamiltonian(eps: float) -> np.ndarray:
    """``eps * sigma_z / 2`` with the ground state first."""
    return np.diag([-0.5 * eps, 0.5 * eps]).astype(complex)


def ground_population(beta: float, eps: float) -> float:
    """Thermal ground-state population ``1 / (1 + exp(-beta * eps))``."""
    if beta < 0 or eps < 0:
        raise DomainError(f"need beta >= 0 and eps >= 0, got beta={beta}, eps={eps}")
    # logistic form, stable for large beta * eps
    return float(0.5 * (1.0 + np.tanh(0.5 * beta * eps)))


def gibbs_qubit(beta: float, eps: float) -> np.ndarray:
    """Gibbs state of ``eps * sigma_z / 2`` at inverse temperature ``beta``."""
    p = ground_population(beta, eps)
    return np.diag([p, 1.0 - p]).astype(complex)


def gibbs_state(H: np.ndarray, beta: float) -> np.ndarray:
    """Gibbs state ``exp(-beta H) / Z`` of a Hermitian ``H``."""
    if beta < 0:
        raise DomainError(f"beta must be >= 0, got {beta}")
    w, V = np.linalg.eigh(H)
    x = -beta * (w - w.min())
    weights = np.exp(x)
    weights /= weights.sum()
    return (V * weights) @ V.conj().T


def check_density_matrix(rho: np.ndarray, tol: float = STATE_TOL) -> np.ndarray:
    """Raise ``DomainError`` unless ``rho`` is Hermitian, unit-trace and PSD.

    Returns ``rho`` as a complex array so the call can be used inline.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionError(f"density matrix must be square, got shape {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise DomainError("density matrix has non-finite entries")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise DomainError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > tol:
        raise DomainError(f"density matrix trace is {np.trace(rho).real!r}, expected 1")
    if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() < PSD_FLOOR:
        raise DomainError("density matrix has negative eigenvalues")
    return rho


def is_density_matrix(rho: np.ndarray, tol: float = STATE_TOL) -> bool:
    try:
        check_density_matrix(rho, tol)
    except (DomainError, DimensionError):
        return False
    return True


# --------------------------------------------------------------------------
# vectorization and superoperators
# --------------------------------------------------------------------------

def vectorize(rho: np.ndarray) -> np.ndarray:
    """Column-stack a square matrix into a vector of length ``d**2``."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {rho.shape}")
    return rho.reshape(-1, order="F").astype(complex)


def devectorize(v: np.ndarray) -> np.ndarray:
    """Inverse of :func:`vectorize`."""
    v = np.asarray(v)
    if v.ndim != 1:
        raise DimensionError(f"expected a 1-d vector, got shape {v.shape}")
    d = int(round(np.sqrt(v.size)))
    if d * d != v.size:
        raise DimensionError(f"vector length {v.size} is not a perfect square")
    return v.reshape(d, d, order="F").astype(complex)


def trace_row(d: int) -> np.ndarray:
    """Row vector ``t`` with ``t @ vectorize(X) == Tr X``."""
    return vectorize(np.eye(d)).real


def spre(A: np.ndarray) -> np.ndarray:
    """Superoperator of ``X -> A X``."""
    return np.kron(np.eye(A.shape[0]), A)


def spost(A: np.ndarray) -> np.ndarray:
    """Superoperator of ``X -> X A``."""
    return np.kron(A.T, np.eye(A.shape[0]))


def sprepost(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Superoperator of ``X -> A X B``."""
    return np.kron(B.T, A)


def hamiltonian_generator(H: np.ndarray) -> np.ndarray:
    """Superoperator of ``X -> -i [H, X]``."""
    H = np.asarray(H, dtype=complex)
    return -1j * (spre(H) - spost(H))


def lindblad_generator(L_op: np.ndarray, rate: float = 1.0) -> np.ndarray:
    """Superoperator of ``rate * (L X L^+ - {L^+ L, X} / 2)``."""
    L_op = np.asarray(L_op, dtype=complex)
    LdL = L_op.conj().T @ L_op
    return rate * (sprepost(L_op, L_op.conj().T) - 0.5 * (spre(LdL) + spost(LdL)))


def apply_superop(L: np.ndarray, rho: np.ndarray) -> np.ndarray:
    return devectorize(L @ vectorize(rho))


# --------------------------------------------------------------------------
# propagation
# --------------------------------------------------------------------------

def _eig_propagator(L: np.ndarray):
    w, V = np.linalg.eig(L)
    if np.linalg.cond(V) > EIG_COND_MAX:
        return None
    return w, V, np.linalg.inv(V)


def evolve_vector(L: np.ndarray, v0: np.ndarray, t) -> np.ndarray:
    """``exp(L t) v0`` for a scalar ``t`` or a 1-d array of times.

    Uses one eigendecomposition of ``L`` for all times; when the eigenvector
    matrix is ill-conditioned each time is handled by ``scipy.linalg.expm``.
    For an array of times the result has shape ``(len(t), len(v0))``.
    """
    L = np.asarray(L, dtype=complex)
    v0 = np.asarray(v0, dtype=complex)
    times = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(times < 0):
        raise DomainError("propagation time must be non-negative")
    eig = _eig_propagator(L)
    if eig is not None:
        w, V, Vinv = eig
        coeff = Vinv @ v0
        out = (np.exp(np.outer(times, w)) * coeff) @ V.T
    else:
        out = np.array([scipy.linalg.expm(L * tk) @ v0 for tk in times])
    if not np.all(np.isfinite(out)):
        raise AccuracyError("propagation produced non-finite entries")
    return out[0] if np.ndim(t) == 0 else out


def propagate_const(L: np.ndarray, rho0: np.ndarray, t):
    """Exact propagation ``exp(L t)[rho0]`` for a time-independent generator.

    ``t`` may be a scalar (returns one state) or an array (returns a stack
    of states with shape ``(len(t), d, d)``).
    """
    rho0 = np.asarray(rho0, dtype=complex)
    d = rho0.shape[0]
    if L.shape != (d * d, d * d):
        raise DimensionError(f"generator shape {L.shape} does not act on {d}x{d} states")
    out = evolve_vector(L, vectorize(rho0), t)
    if np.ndim(t) == 0:
        return devectorize(out)
    return out.reshape(len(out), d, d, order="F")


def propagate_driven(
    L_of_t: Callable[[float], np.ndarray],
    rho0: np.ndarray,
    grid,
    max_step: float | None = None,
    drift_tol: float = 1e-9,
) -> np.ndarray:
    """Fixed-step RK4 for ``d rho/dt = L(t)[rho]``.

    Parameters
    ----------
    L_of_t
        Callable returning the ``d**2 x d**2`` generator at time ``t``.
    rho0
        Initial state at ``grid[0]``.
    grid
        Strictly increasing output times.
    max_step
        Upper bound on the internal step; each grid interval is split into
        equal substeps no longer than this. ``None`` steps on the grid itself.
    drift_tol
        Allowed trace drift per step before renormalization. Exceeding it
        raises ``AccuracyError`` (the step is too coarse).

    Returns
    -------
    Array of shape ``(len(grid), d, d)``.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 1:
        raise DimensionError("grid must be a non-empty 1-d array")
    if np.any(np.diff(grid) <= 0):
        raise DomainError("grid must be strictly increasing")
    rho0 = np.asarray(rho0, dtype=complex)
    d = rho0.shape[0]
    tr = trace_row(d)
    v = vectorize(rho0)
    out = np.empty((grid.size, d, d), dtype=complex)
    out[0] = rho0
    L_next = L_of_t(grid[0])
    for i in range(grid.size - 1):
        t0, t1 = grid[i], grid[i + 1]
        n = 1 if max_step is None else max(1, int(np.ceil((t1 - t0) / max_step)))
        h = (t1 - t0) / n
        for j in range(n):
            t = t0 + j * h
            # the end-of-step generator is reused as the next step's start
            L0 = L_next
            Lm = L_of_t(t + 0.5 * h)
            L1 = L_of_t(t + h)
            L_next = L1
            k1 = L0 @ v
            k2 = Lm @ (v + 0.5 * h * k1)
            k3 = Lm @ (v + 0.5 * h * k2)
            k4 = L1 @ (v + h * k3)
            v = v + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            trace = tr @ v
            if not np.isfinite(trace) or abs(trace - 1.0) > drift_tol:
                raise AccuracyError(f"trace drift {abs(trace - 1.0):.3e} at t={t + h:.6g}")
            v = v / trace
        out[i + 1] = devectorize(v)
    return out


# --------------------------------------------------------------------------
# entropic functionals
# --------------------------------------------------------------------------

def _clamped_eigvals(rho: np.ndarray) -> np.ndarray:
    lam = np.linalg.eigvalsh(0.5 * (rho + np.conj(np.swapaxes(rho, -1, -2))))
    return np.clip(lam, 0.0, 1.0)


def _xlogx(lam: np.ndarray) -> np.ndarray:
    out = np.zeros_like(lam)
    pos = lam > 0
    out[pos] = lam[pos] * np.log(lam[pos])
    return out


def von_neumann_entropy(rho: np.ndarray):
    """``-Tr rho ln rho`` with eigenvalues clamped to ``[0, 1]``.

    Accepts a single state or a stack ``(..., d, d)``.
    """
    lam = _clamped_eigvals(np.asarray(rho, dtype=complex))
    s = -_xlogx(lam).sum(axis=-1)
    return float(s) if np.ndim(s) == 0 else s


def relative_entropy(rho1: np.ndarray, rho2: np.ndarray, support_tol: float = 1e-14) -> float:
    """Quantum relative entropy ``S(rho1 || rho2)``.

    Returns ``inf`` when ``rho1`` has weight outside the support of ``rho2``.
    """
    rho1 = np.asarray(rho1, dtype=complex)
    rho2 = np.asarray(rho2, dtype=complex)
    if rho1.shape != rho2.shape:
        raise DimensionError(f"shape mismatch {rho1.shape} vs {rho2.shape}")
    lam2, V2 = np.linalg.eigh(0.5 * (rho2 + rho2.conj().T))
    weights = np.real(np.einsum("ik,ij,jk->k", V2.conj(), rho1, V2))
    cross = 0.0
    for w, lam in zip(weights, lam2):
        if lam <= support_tol:
            if w > support_tol:
                return float("inf")
            continue
        cross += w * np.log(lam)
    return max(-von_neumann_entropy(rho1) - cross, 0.0)


def free_energy(rho: np.ndarray, H: np.ndarray, beta: float) -> float:
    """Non-equilibrium free energy ``Tr[rho H] - S(rho) / beta``."""
    if beta <= 0:
        raise DomainError(f"beta must be > 0, got {beta}")
    energy = np.real(np.trace(np.asarray(rho) @ np.asarray(H)))
    return float(energy - von_neumann_entropy(rho) / beta)


def partial_trace(
    joint: np.ndarray, keep: Literal["system", "ancilla"] = "system"
) -> np.ndarray:
    """Reduced state of a two-qubit ``system (x) ancilla`` state.

    Works on a single 4x4 matrix or a stack ``(..., 4, 4)``.
    """
    joint = np.asarray(joint, dtype=complex)
    if joint.shape[-2:] != (4, 4):
        raise DimensionError(f"expected 4x4 joint state(s), got shape {joint.shape}")
    t = joint.reshape(joint.shape[:-2] + (2, 2, 2, 2))
    if keep == "system":
        return np.einsum("...iaja->...ij", t)
    if keep == "ancilla":
        return np.einsum("...aiaj->...ij", t)
    raise DomainError(f"keep must be 'system' or 'ancilla', got {keep!r}")


def mutual_information(joint: np.ndarray):
    """``S(rho_S) + S(rho_A) - S(R)`` for a two-qubit state (or a stack)."""
    return (
        von_neumann_entropy(partial_trace(joint, "system"))
        + von_neumann_entropy(partial_trace(joint, "ancilla"))
        - von_neumann_entropy(joint)
    )


def trace_distance(rho1: np.ndarray, rho2: np.ndarray) -> float:
    """Half the trace norm of ``rho1 - rho2``."""
    rho1 = np.asarray(rho1, dtype=complex)
    rho2 = np.asarray(rho2, dtype=complex)
    if rho1.shape != rho2.shape:
        raise DimensionError(f"shape mismatch {rho1.shape} vs {rho2.shape}")
    return float(0.5 * np.linalg.svd(rho1 - rho2, compute_uv=False).sum())
