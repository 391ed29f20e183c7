"""Qubit coupled to a bath through an explicitly modeled ancilla qubit.

Joint Hamiltonian, ordered ``system (x) ancilla``::

    H = eps sz/2 (x) 1 + 1 (x) E sz/2 + gamma (s+ (x) s- + s- (x) s+)

Both qubits are reset towards their own Gibbs state at temperature ``T``::

    D[R] = Gamma_S (Omega_S (x) Tr_S R - R) + Gamma_A (Tr_A R (x) Omega_A - R)

Starting from a state diagonal in the product basis, the dynamics stays in
the six-dimensional subset spanned by the four populations ``q_sa`` and the
exchange coherence ``k = <0 1|R|1 0> = re + i im``. Reduced vectors are
ordered ``(q00, q01, q10, q11, im, re)`` with the first index labelling the
system.

Units: rates and ``gamma`` in units of ``Gamma_S`` where dimensionless
ratios appear, ``c = Gamma_A / Gamma_S`` and ``y = gamma / Gamma_S``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .optimize import golden_min
from .otto import SymmetricOptimum, power_factor, symmetric_optimum, OttoSpec
from .qdyn import (
    devectorize,
    ground_population,
    hamiltonian_generator,
    partial_trace,
    propagate_const,
    trace_row,
    vectorize,
)
from .slow_driving import sd_first_order

SIGMA_PLUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)
SIGMA_MINUS = SIGMA_PLUS.T.copy()
REDUCED_TRACE = np.array([1.0, 1.0, 1.0, 1.0, 0.0, 0.0])
CRITICAL_C = math.sqrt(2.0) - 1.0
UNBOUNDED = math.inf
_POP = {(0, 0): 0, (0, 1): 1, (1, 0): 2, (1, 1): 3}
IM, RE = 4, 5


@dataclass(frozen=True)
class AncillaBathSpec:
    T: float
    Gamma_S: float
    Gamma_A: float
    gamma: float
    E: float

    def __post_init__(self):
        if not self.T > 0:
            raise DomainError(f"temperature must be > 0, got {self.T}")
        if not (self.Gamma_S > 0 and self.Gamma_A > 0):
            raise DomainError("reset rates must be > 0")
        if self.gamma < 0:
            raise DomainError(f"coupling must be >= 0, got {self.gamma}")
        if self.E < 0:
            raise DomainError(f"ancilla gap must be >= 0, got {self.E}")

    @property
    def beta(self) -> float:
        return 1.0 / self.T

    @property
    def c(self) -> float:
        return self.Gamma_A / self.Gamma_S

    @property
    def y(self) -> float:
        return self.gamma / self.Gamma_S


# --------------------------------------------------------------------------
# generators
# --------------------------------------------------------------------------

def joint_hamiltonian(spec: AncillaBathSpec, eps: float) -> np.ndarray:
    hs = np.diag([-0.5 * eps, 0.5 * eps])
    ha = np.diag([-0.5 * spec.E, 0.5 * spec.E])
    exchange = np.kron(SIGMA_PLUS, SIGMA_MINUS) + np.kron(SIGMA_MINUS, SIGMA_PLUS)
    return np.kron(hs, np.eye(2)) + np.kron(np.eye(2), ha) + spec.gamma * exchange


def _reset_superops(omega_s: np.ndarray, omega_a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Superoperators of ``R -> Omega_S (x) Tr_S R`` and ``R -> Tr_A R (x) Omega_A``."""
    to_s = np.zeros((16, 16), dtype=complex)
    to_a = np.zeros((16, 16), dtype=complex)
    for k in range(16):
        basis = np.zeros(16, dtype=complex)
        basis[k] = 1.0
        R = devectorize(basis)
        to_s[:, k] = vectorize(np.kron(omega_s, partial_trace(R, "ancilla")))
        to_a[:, k] = vectorize(np.kron(partial_trace(R, "system"), omega_a))
    return to_s, to_a


def full_generator(spec: AncillaBathSpec, eps: float) -> np.ndarray:
    """16x16 generator of the joint system-ancilla state."""
    if eps < 0:
        raise DomainError(f"gap must be >= 0, got {eps}")
    ps = ground_population(spec.beta, eps)
    pa = ground_population(spec.beta, spec.E)
    to_s, to_a = _reset_superops(np.diag([ps, 1 - ps]), np.diag([pa, 1 - pa]))
    eye = np.eye(16)
    return (hamiltonian_generator(joint_hamiltonian(spec, eps))
            + spec.Gamma_S * (to_s - eye) + spec.Gamma_A * (to_a - eye))


def reduced_generator(spec: AncillaBathSpec, eps: float) -> np.ndarray:
    """6x6 real generator on ``(q00, q01, q10, q11, im, re)``."""
    if eps < 0:
        raise DomainError(f"gap must be >= 0, got {eps}")
    ps = ground_population(spec.beta, eps)
    pa = ground_population(spec.beta, spec.E)
    om_s, om_a = (ps, 1 - ps), (pa, 1 - pa)
    gs, ga, g = spec.Gamma_S, spec.Gamma_A, spec.gamma
    delta = eps - spec.E
    M = np.zeros((6, 6))
    for (s, a), i in _POP.items():
        M[i, i] -= gs + ga
        for s2 in (0, 1):
            M[i, _POP[(s2, a)]] += gs * om_s[s]
        for a2 in (0, 1):
            M[i, _POP[(s, a2)]] += ga * om_a[a]
    M[_POP[(0, 1)], IM] = -2 * g
    M[_POP[(1, 0)], IM] = 2 * g
    M[IM, _POP[(0, 1)]] = g
    M[IM, _POP[(1, 0)]] = -g
    M[IM, RE] = delta
    M[RE, IM] = -delta
    M[IM, IM] = M[RE, RE] = -(gs + ga)
    return M


@dataclass(frozen=True)
class JointGenerators:
    full: np.ndarray
    reduced: np.ndarray


def build_joint_liouvillian(spec: AncillaBathSpec, eps: float) -> JointGenerators:
    return JointGenerators(full_generator(spec, eps), reduced_generator(spec, eps))


def reduced_to_joint(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    R = np.diag(v[:4]).astype(complex)
    k = v[RE] + 1j * v[IM]
    R[1, 2] = k
    R[2, 1] = np.conj(k)
    return R


def joint_to_reduced(R: np.ndarray) -> np.ndarray:
    R = np.asarray(R)
    k = R[..., 1, 2]
    pops = np.real(np.diagonal(R, axis1=-2, axis2=-1))
    return np.concatenate([pops, np.imag(k)[..., None], np.real(k)[..., None]], axis=-1)


def system_ground(v: np.ndarray):
    """Ground population of the system from reduced vector(s)."""
    v = np.asarray(v)
    return v[..., 0] + v[..., 1]


def stationary_state(spec: AncillaBathSpec, eps: float) -> np.ndarray:
    """Null vector of the reduced generator, normalized to unit trace."""
    M = np.vstack([reduced_generator(spec, eps), REDUCED_TRACE])
    rhs = np.zeros(7)
    rhs[-1] = 1.0
    return np.linalg.lstsq(M, rhs, rcond=None)[0]


def stationary_first_order(spec: AncillaBathSpec, eps: float) -> np.ndarray:
    """First-order expansion of the stationary state in the detuning.

    Uses ``Delta_p = p_S - p_A`` as the small parameter; the coherence
    ``re`` vanishes at this order.
    """
    ps = ground_population(spec.beta, eps)
    pa = ground_population(spec.beta, spec.E)
    gs, ga, g = spec.Gamma_S, spec.Gamma_A, spec.gamma
    dp = ps - pa
    norm = (gs * ga + 2 * g**2) * (gs + ga)
    base = np.array([ps * pa, ps * (1 - pa), (1 - ps) * pa, (1 - ps) * (1 - pa), 0.0, 0.0])
    shift = np.array([
        2 * g**2 * (ga * pa - gs * ps),
        2 * g**2 * ((gs * ps - ga * pa) + ga),
        2 * g**2 * ((gs * ps - ga * pa) - gs),
        2 * g**2 * (ga * (pa - 1) - gs * (ps - 1)),
        -gs * ga * g,
        0.0,
    ])
    return base - dp / norm * shift


# --------------------------------------------------------------------------
# resonant, equal-rate solution
# --------------------------------------------------------------------------

def kappa(y: float) -> complex:
    """``sqrt(1 - 16 y^2)``; imaginary for ``y > 1/4``."""
    return np.sqrt(complex(1 - 16 * y * y))


def resonant_eigenvalues(y: float, Gamma: float = 1.0) -> np.ndarray:
    """``{0, -1, -2, (-3 + kappa)/2, (-3 - kappa)/2} * Gamma``."""
    k = kappa(y)
    return Gamma * np.array([0.0, -1.0, -2.0, (-3 + k) / 2, (-3 - k) / 2])


def resonant_generator(p0: float, y: float, Gamma: float = 1.0) -> np.ndarray:
    """5x5 generator on ``(q00, q01, q10, q11, im)`` at resonance with equal rates."""
    if not 0 < p0 < 1:
        raise DomainError(f"ground population must lie in (0, 1), got {p0}")
    if p0 < 0.5:
        raise DomainError("ground population below 1/2 implies a negative gap")
    gap = math.log(p0 / (1 - p0))
    spec = AncillaBathSpec(1.0, Gamma, Gamma, y * Gamma, gap)
    return reduced_generator(spec, gap)[:5, :5]


@dataclass(frozen=True)
class ResonantEigensystem:
    eigenvalues: np.ndarray
    numeric_eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def resonant_eigensystem(p0: float, y: float, Gamma: float = 1.0) -> ResonantEigensystem:
    """Closed-form spectrum and numeric eigenvectors matched to it column by column."""
    closed = resonant_eigenvalues(y, Gamma)
    w, V = np.linalg.eig(resonant_generator(p0, y, Gamma))
    order = []
    free = list(range(w.size))
    for lam in closed:
        j = min(free, key=lambda m: abs(w[m] - lam))
        order.append(j)
        free.remove(j)
    return ResonantEigensystem(closed, w[order], V[:, order])


def relaxation_profile(t, y: float, Gamma: float = 1.0):
    """Ground-population relaxation ``f(t)`` of the system at resonance.

    ``f = e^{-s}/2 + e^{-3s/2} [cosh(k s/2) + sinh(k s/2)/k] / 2`` with
    ``s = Gamma t``; the trigonometric continuation is used for imaginary ``k``.
    """
    s = Gamma * np.asarray(t, dtype=float)
    if np.any(s < 0):
        raise DomainError("time must be non-negative")
    k2 = 1 - 16 * y * y
    if k2 > 0:
        k = math.sqrt(k2)
        bracket = np.cosh(k * s / 2) + np.sinh(k * s / 2) / k
    elif k2 == 0:
        bracket = 1 + s / 2
    else:
        mu = math.sqrt(-k2)
        bracket = np.cos(mu * s / 2) + np.sin(mu * s / 2) / mu
    f = 0.5 * np.exp(-s) + 0.5 * np.exp(-1.5 * s) * bracket
    return float(f) if np.ndim(f) == 0 else f


def profile(y: float, Gamma: float = 1.0):
    return lambda t: relaxation_profile(t, y, Gamma)


# --------------------------------------------------------------------------
# slow-driving amplitude
# --------------------------------------------------------------------------

def sd_amplitude_resonant(c: float, y: float, Gamma: float = 1.0) -> float:
    """Closed-form amplitude at resonance in terms of ``c`` and ``y``."""
    if not c > 0 or y < 0:
        raise DomainError("need c > 0 and y >= 0")
    if y == 0:
        return 1 / Gamma
    u = c + 2 * y * y
    return (1 / Gamma) / (c + 1) ** 2 * (2 + c * (c - 2) / u + (c**2 * (c + 1) ** 2 - c**3) / u**2)


def sd_amplitude_rates(Gamma_S: float, Gamma_A: float, gamma: float) -> float:
    """The same amplitude written in the raw rates."""
    gs, ga, g = Gamma_S, Gamma_A, gamma
    num = gs * ((ga**2 + ga * gs) ** 2 + 2 * g**2 * (ga**2 + 2 * ga * gs + 4 * g**2))
    den = (ga + gs) ** 2 * (ga * gs + 2 * g**2) ** 2
    return num / den


def sd_amplitude_strong(c: float, Gamma: float = 1.0) -> float:
    """Large-coupling limit ``2 / (Gamma (c + 1)^2)``."""
    return 2 / (Gamma * (c + 1) ** 2)


def sd_amplitude_numeric(spec: AncillaBathSpec, eps: float | None = None,
                         representation: str = "reduced", h: float | None = None) -> float:
    """Amplitude from the generic pipeline ``rho1 = (L P)^{-1} d rho0/dt``.

    ``d rho0/dt`` is the central difference of the stationary state in the
    gap at unit gap velocity; ``rho1`` is the traceless solution of the
    generator equation. Defaults to resonance ``eps = E``.
    """
    eps = spec.E if eps is None else eps
    h = 1e-5 * max(1.0, abs(eps)) if h is None else h
    if representation == "reduced":
        def null(e):
            return stationary_state(spec, e)
        L, tr = reduced_generator(spec, eps), REDUCED_TRACE
    elif representation == "full":
        tr = trace_row(4)

        def null(e):
            M = np.vstack([full_generator(spec, e), tr])
            rhs = np.zeros(17, dtype=complex)
            rhs[-1] = 1.0
            return np.linalg.lstsq(M, rhs, rcond=None)[0]
        L = full_generator(spec, eps)
    else:
        raise DomainError(f"representation must be 'reduced' or 'full', got {representation!r}")
    d0 = (null(eps + h) - null(eps - h)) / (2 * h)
    x = sd_first_order(L, d0, trace_functional=tr)
    if representation == "reduced":
        rho1_00 = float(system_ground(np.real(x)))
    else:
        rho1_00 = float(np.real(partial_trace(devectorize(x), "system")[0, 0]))
    ps = ground_population(spec.beta, eps)
    p_dot = spec.beta * ps * (1 - ps)
    return -rho1_00 / p_dot


def optimal_coupling(c: float) -> float:
    """``y_opt`` minimizing the amplitude; ``UNBOUNDED`` (``inf``) for ``c >= 2``."""
    if not c > 0:
        raise DomainError(f"c must be > 0, got {c}")
    if c >= 2:
        return UNBOUNDED
    return math.sqrt(c * c * (2 * c + 3) / (2 * (2 - c)))


def optimal_coupling_numeric(c: float, y_max: float = 1e3, tol: float = 1e-10) -> float:
    y, _ = golden_min(lambda v: sd_amplitude_resonant(c, v), 0.0, y_max, tol)
    return y


def carnot_regime(c: float) -> str:
    """Shape of ``1/(A Gamma)`` versus ``y``."""
    if c < CRITICAL_C:
        return "peak-then-below-markov"
    if c < 2:
        return "peak-above-markov"
    return "monotone-increasing"


def carnot_power_sweep(c_list, y_grid) -> list[tuple[float, float, float]]:
    """Rows ``(c, y, P_max / P_max_markov)`` sorted by ``c`` then ``y``."""
    rows = []
    for c in sorted(float(v) for v in c_list):
        for y in sorted(float(v) for v in y_grid):
            rows.append((c, y, 1.0 / sd_amplitude_resonant(c, y)))
    return rows


# --------------------------------------------------------------------------
# Otto cycle with ancilla baths
# --------------------------------------------------------------------------

def _otto_spec(eps1, eps2, T_C, T_H, tau_C=1.0, tau_H=1.0, f=None) -> OttoSpec:
    if f is None:
        return OttoSpec(eps1, eps2, 1 / T_C, 1 / T_H, tau_C, tau_H)
    return OttoSpec(eps1, eps2, 1 / T_C, 1 / T_H, tau_C, tau_H, f, f)


def otto_power_nonmarkov(eps1: float, eps2: float, T_C: float, T_H: float, y: float,
                         tau_C: float, tau_H: float | None = None, Gamma: float = 1.0) -> float:
    """Exact limit-cycle power with resonant ancillas on both baths."""
    tau_H = tau_C if tau_H is None else tau_H
    spec = _otto_spec(eps1, eps2, T_C, T_H, tau_C, tau_H, profile(y, Gamma))
    K = (eps2 - eps1) * (spec.p_C - spec.p_H)
    return K * power_factor(spec.f_C, tau_C, tau_H)


def markov_otto_reference(eps1: float, eps2: float, T_C: float, T_H: float, Gamma: float = 1.0) -> float:
    """``(Gamma / 4)(eps2 - eps1)(p_C - p_H)``: the ``tau -> 0`` supremum at zero coupling."""
    spec = _otto_spec(eps1, eps2, T_C, T_H)
    return Gamma / 4 * (eps2 - eps1) * (spec.p_C - spec.p_H)


def otto_max(eps1: float, eps2: float, T_C: float, T_H: float, y: float,
             Gamma: float = 1.0, check_pairs: int = 0) -> SymmetricOptimum:
    spec = _otto_spec(eps1, eps2, T_C, T_H)
    return symmetric_optimum(profile(y, Gamma), spec, gamma=Gamma, check_pairs=check_pairs)


def otto_max_sweep(y_grid, eps1: float = 1.0, eps2: float = 2.0, T_C: float = 1.0, T_H: float = 4.0,
                   Gamma: float = 1.0) -> list[tuple[float, float, float]]:
    """Rows ``(y, tau_star, P_max / reference)`` sorted by ``y``."""
    ref = markov_otto_reference(eps1, eps2, T_C, T_H, Gamma)
    rows = []
    for y in sorted(float(v) for v in y_grid):
        opt = otto_max(eps1, eps2, T_C, T_H, y, Gamma)
        rows.append((y, opt.tau_star, opt.power / ref))
    return rows


def otto_limit_cycle(eps1: float, eps2: float, T_C: float, T_H: float, y: float, tau_C: float,
                     tau_H: float, Gamma: float = 1.0, n_cycles: int = 200,
                     p_start: float = 0.5) -> tuple[float, np.ndarray]:
    """Power of the last of ``n_cycles`` cycles by joint-state propagation.

    Each isochore attaches a fresh thermal ancilla at the stroke gap,
    propagates the 16-dim joint state and traces the ancilla out.
    Returns the power and the system ground population after every stroke.
    """
    spec_C = AncillaBathSpec(T_C, Gamma, Gamma, y * Gamma, eps1)
    spec_H = AncillaBathSpec(T_H, Gamma, Gamma, y * Gamma, eps2)
    L_C, L_H = full_generator(spec_C, eps1), full_generator(spec_H, eps2)
    anc_C = np.diag([ground_population(1 / T_C, eps1), 1 - ground_population(1 / T_C, eps1)])
    anc_H = np.diag([ground_population(1 / T_H, eps2), 1 - ground_population(1 / T_H, eps2)])
    rho = np.diag([p_start, 1 - p_start]).astype(complex)
    pops = [p_start]
    for _ in range(n_cycles):
        for L, anc, tau in ((L_C, anc_C, tau_C), (L_H, anc_H, tau_H)):
            R = propagate_const(L, np.kron(rho, anc), tau)
            rho = partial_trace(R, "system")
            pops.append(float(np.real(rho[0, 0])))
    pops = np.array(pops)
    dp_C = pops[-2] - pops[-3]
    dp_H = pops[-1] - pops[-2]
    work = -eps1 * dp_C - eps2 * dp_H
    return float(work / (tau_C + tau_H)), pops
