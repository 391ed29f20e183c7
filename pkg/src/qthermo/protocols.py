"""Control protocols expressed in ground-population space.

A protocol is a trajectory ``q(x)`` of the instantaneous Gibbs ground
population over the rescaled time ``x = t / tau`` in ``[0, 1]``. The gap
follows as ``eps(t) = ln(q / (1 - q)) / beta``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
import scipy.integrate
import scipy.interpolate
import scipy.special

from .errors import DomainError

Q_MIN = 1e-6
Q_MAX = 1.0 - 1e-6
SHAPES = ("smoothstep", "beta-mix", "cosine", "mesh")
K_MAX = 200


def logit(q):
    return np.log(q) - np.log1p(-q)


def _smoothstep(x):
    return 3 * x**2 - 2 * x**3, 6 * x - 6 * x**2, 6 - 12 * x


def _beta_mix(x, coeffs):
    s = np.zeros_like(x)
    ds = np.zeros_like(x)
    d2s = np.zeros_like(x)
    total = sum(w for w, _, _ in coeffs)
    for w, a, b in coeffs:
        w = w / total
        s += w * scipy.special.betainc(a, b, x)
        # polynomial density, integer a, b >= 2 keep it finite and flat at the ends
        norm = 1.0 / scipy.special.beta(a, b)
        pdf = norm * x ** (a - 1) * (1 - x) ** (b - 1)
        dpdf = norm * (
            (a - 1) * x ** max(a - 2, 0) * (1 - x) ** (b - 1)
            - (b - 1) * x ** (a - 1) * (1 - x) ** max(b - 2, 0)
        )
        ds += w * pdf
        d2s += w * dpdf
    return s, ds, d2s


def cosine_parameters(q0: float, q1: float) -> tuple[float, float]:
    """``(omega, phi)`` of ``(1 + cos(omega (x + phi))) / 2`` through both endpoints."""
    if not (0 < q0 < 1 and 0 < q1 < 1):
        raise DomainError(f"endpoints must lie in (0, 1), got {q0}, {q1}")
    if q0 == q1:
        raise DomainError("a cosine branch cannot join equal endpoints")
    th0 = np.arccos(2 * q0 - 1)
    th1 = np.arccos(2 * q1 - 1)
    omega = th1 - th0
    return float(omega), float(th0 / omega)


def cosine_branch(x, omega: float, phi: float):
    arg = omega * (np.asarray(x, dtype=float) + phi)
    return (
        0.5 * (1 + np.cos(arg)),
        -0.5 * omega * np.sin(arg),
        -0.5 * omega**2 * np.cos(arg),
    )


def _hermite(x, x0, x1, y0, m0, y1, m1):
    h = x1 - x0
    t = (x - x0) / h
    h00 = 2 * t**3 - 3 * t**2 + 1
    h10 = t**3 - 2 * t**2 + t
    h01 = -2 * t**3 + 3 * t**2
    h11 = t**3 - t**2
    y = h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1
    dy = ((6 * t**2 - 6 * t) * y0 + (3 * t**2 - 4 * t + 1) * h * m0
          + (-6 * t**2 + 6 * t) * y1 + (3 * t**2 - 2 * t) * h * m1) / h
    d2y = ((12 * t - 6) * y0 + (6 * t - 4) * h * m0
           + (-12 * t + 6) * y1 + (6 * t - 2) * h * m1) / h**2
    return y, dy, d2y


@dataclass(frozen=True)
class ControlProtocol:
    """Ground-population trajectory with flat endpoints.

    ``shape`` selects the profile:

    * ``smoothstep``  ``q0 + (q1 - q0) (3x^2 - 2x^3)``
    * ``beta-mix``    mixture of regularized incomplete beta functions;
      ``coeffs`` holds ``(weight, a, b)`` triples with integers ``a, b >= 2``
    * ``cosine``      the optimal cosine branch with cubic Hermite boundary
      layers of width ``1/k``
    * ``mesh``        clamped cubic spline through ``samples`` on a uniform grid
    """

    q0: float
    q1: float
    tau: float = 1.0
    shape: str = "smoothstep"
    k: int | None = None
    coeffs: tuple = ()
    samples: tuple = ()
    mesh: int = 2000
    _spline: object = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ("q0", "q1"):
            q = getattr(self, name)
            if not (Q_MIN <= q <= Q_MAX):
                raise DomainError(f"{name}={q} outside [{Q_MIN}, {Q_MAX}]")
        if not self.tau > 0:
            raise DomainError(f"tau must be > 0, got {self.tau}")
        if self.shape not in SHAPES:
            raise DomainError(f"unknown shape {self.shape!r}; expected one of {SHAPES}")
        if self.mesh < 4 or self.mesh % 2:
            raise DomainError("mesh must be an even integer >= 4")
        if self.shape == "cosine":
            if self.k is None or not (2 < self.k <= K_MAX):
                raise DomainError(f"cosine shape needs 2 < k <= {K_MAX}, got {self.k}")
            cosine_parameters(self.q0, self.q1)
        elif self.shape == "beta-mix":
            if not self.coeffs:
                raise DomainError("beta-mix shape needs coeffs")
            for w, a, b in self.coeffs:
                if w <= 0 or a < 2 or b < 2 or int(a) != a or int(b) != b:
                    raise DomainError(f"bad beta-mix component {(w, a, b)}")
        elif self.shape == "mesh":
            s = np.asarray(self.samples, dtype=float)
            if s.size < 4:
                raise DomainError("mesh shape needs at least 4 samples")
            if abs(s[0] - self.q0) > 1e-12 or abs(s[-1] - self.q1) > 1e-12:
                raise DomainError("mesh samples must start at q0 and end at q1")
            steps = np.diff(s)
            if np.any(steps * np.sign(self.q1 - self.q0) < 0):
                raise DomainError("mesh samples must be monotone")
            spline = scipy.interpolate.CubicSpline(
                np.linspace(0, 1, s.size), s, bc_type=((1, 0.0), (1, 0.0))
            )
            object.__setattr__(self, "_spline", spline)

    # ---------------------------------------------------------------
    def with_duration(self, tau: float) -> "ControlProtocol":
        return replace(self, tau=tau)

    def with_mesh(self, mesh: int) -> "ControlProtocol":
        return replace(self, mesh=mesh)

    def reversed(self) -> "ControlProtocol":
        """Time-reversed protocol ``q(1 - x)``."""
        if self.shape == "mesh":
            return replace(self, q0=self.q1, q1=self.q0, samples=tuple(self.samples[::-1]))
        if self.shape == "beta-mix":
            return replace(self, q0=self.q1, q1=self.q0,
                           coeffs=tuple((w, b, a) for w, a, b in self.coeffs))
        return replace(self, q0=self.q1, q1=self.q0)

    @property
    def is_static(self) -> bool:
        return self.q0 == self.q1

    def breakpoints(self) -> np.ndarray:
        """Points where ``q''`` may jump; quadrature never straddles them."""
        if self.shape == "cosine":
            h = 1.0 / self.k
            return np.array([0.0, h, 1.0 - h, 1.0])
        if self.shape == "mesh":
            return np.linspace(0.0, 1.0, len(self.samples))
        return np.array([0.0, 1.0])

    def evaluate(self, x):
        """``(q, dq/dx, d2q/dx2)`` at rescaled times ``x``."""
        x = np.asarray(x, dtype=float)
        if x.ndim == 0:
            return tuple(float(v[0]) for v in self._evaluate(x.reshape(1)))
        return self._evaluate(x)

    def _evaluate(self, x):
        if np.any((x < -1e-12) | (x > 1 + 1e-12)):
            raise DomainError("x must lie in [0, 1]")
        x = np.clip(x, 0.0, 1.0)
        dq = self.q1 - self.q0
        if self.shape == "smoothstep":
            s, ds, d2s = _smoothstep(x)
            return self.q0 + dq * s, dq * ds, dq * d2s
        if self.shape == "beta-mix":
            s, ds, d2s = _beta_mix(x, self.coeffs)
            return self.q0 + dq * s, dq * ds, dq * d2s
        if self.shape == "mesh":
            sp = self._spline
            return sp(x), sp(x, 1), sp(x, 2)
        omega, phi = cosine_parameters(self.q0, self.q1)
        q, dqx, d2q = (np.array(a, dtype=float) for a in cosine_branch(x, omega, phi))
        h = 1.0 / self.k
        a0, a1, _ = cosine_branch(h, omega, phi)
        b0, b1, _ = cosine_branch(1 - h, omega, phi)
        left = x < h
        right = x > 1 - h
        if np.any(left):
            y = _hermite(x[left], 0.0, h, self.q0, 0.0, float(a0), float(a1))
            q[left], dqx[left], d2q[left] = y
        if np.any(right):
            y = _hermite(x[right], 1 - h, 1.0, float(b0), float(b1), self.q1, 0.0)
            q[right], dqx[right], d2q[right] = y
        return q, dqx, d2q

    def mesh_points(self, n: int | None = None) -> np.ndarray:
        """Sample points: ``n`` even intervals per smooth segment."""
        n = self.mesh if n is None else n
        bp = self.breakpoints()
        per = max(2, 2 * int(np.ceil(n / (2 * (len(bp) - 1)))))
        pts = [np.linspace(a, b, per + 1)[:-1] for a, b in zip(bp[:-1], bp[1:])]
        return np.concatenate(pts + [np.array([1.0])])

    def gap(self, beta: float, x):
        """Instantaneous gap ``eps(x)`` and its ``x``-derivative."""
        q, dqx, _ = self.evaluate(x)
        return logit(q) / beta, dqx / (q * (1 - q)) / beta

    def integrate(self, fun, n: int | None = None) -> float:
        """Composite Simpson of ``fun(x, q, q', q'')`` over ``[0, 1]``."""
        n = self.mesh if n is None else n
        bp = self.breakpoints()
        per = max(2, 2 * int(np.ceil(n / (2 * (len(bp) - 1)))))
        total = 0.0
        for a, b in zip(bp[:-1], bp[1:]):
            x = np.linspace(a, b, per + 1)
            # one-sided evaluation keeps each segment on its own smooth branch
            eps = 1e-13 * (b - a)
            xe = x.copy()
            xe[0] += eps
            xe[-1] -= eps
            q, dq, d2q = self.evaluate(xe)
            total += scipy.integrate.simpson(fun(xe, q, dq, d2q), x=x)
        return float(total)


def smoothstep(q0: float, q1: float, tau: float = 1.0, mesh: int = 2000) -> ControlProtocol:
    return ControlProtocol(q0, q1, tau=tau, shape="smoothstep", mesh=mesh)


def random_protocol(q0: float, q1: float, rng: np.random.Generator, tau: float = 1.0,
                    n_terms: int = 3, max_order: int = 6, mesh: int = 2000) -> ControlProtocol:
    """Random admissible protocol: a positive mixture of beta CDFs."""
    coeffs = tuple(
        (float(rng.uniform(0.1, 1.0)), int(rng.integers(2, max_order + 1)),
         int(rng.integers(2, max_order + 1)))
        for _ in range(n_terms)
    )
    return ControlProtocol(q0, q1, tau=tau, shape="beta-mix", coeffs=coeffs, mesh=mesh)
