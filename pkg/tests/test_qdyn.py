import numpy as np
import pytest
from hypothesis import given, strategies as st

from qthermo.dissipators import BathSpec, dissipator, reset_dissipator
from qthermo.errors import AccuracyError, DimensionError, DomainError
from qthermo.qdyn import (
    apply_superop,
    check_density_matrix,
    devectorize,
    free_energy,
    gibbs_qubit,
    gibbs_state,
    ground_population,
    hamiltonian_generator,
    mutual_information,
    partial_trace,
    propagate_const,
    propagate_driven,
    qubit_hamiltonian,
    relative_entropy,
    trace_distance,
    trace_row,
    vectorize,
    von_neumann_entropy,
)
from qthermo.slow_driving import qubit_generator

from conftest import random_state

seeds = st.integers(0, 2**31 - 1)


def rk4_oracle(L, v, t, n=4000):
    h = t / n
    for _ in range(n):
        k1 = L @ v
        k2 = L @ (v + h / 2 * k1)
        k3 = L @ (v + h / 2 * k2)
        k4 = L @ (v + h * k3)
        v = v + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return v


class TestGibbs:
    def test_degenerate_gap(self):
        assert ground_population(3.7, 0.0) == 0.5

    def test_infinite_temperature(self):
        assert ground_population(0.0, 5.0) == 0.5

    def test_gap_over_T_2_4(self):
        assert ground_population(1.0, 2.4) == pytest.approx(0.917, abs=1e-3)

    @pytest.mark.parametrize("beta,eps", [(-1, 1), (1, -1)])
    def test_negative_inputs(self, beta, eps):
        with pytest.raises(DomainError):
            gibbs_qubit(beta, eps)

    def test_matches_general_gibbs(self):
        H = qubit_hamiltonian(1.3)
        assert np.allclose(gibbs_state(H, 0.7), gibbs_qubit(0.7, 1.3), atol=1e-14)

    def test_large_argument_stable(self):
        assert ground_population(1e4, 1e4) == 1.0


class TestVectorize:
    def test_round_trip(self, rng):
        rho = random_state(rng, 4)
        assert np.array_equal(devectorize(vectorize(rho)), rho)

    def test_trace_row(self):
        assert trace_row(2) @ vectorize(np.eye(2) / 2) == pytest.approx(1.0)

    def test_pairing(self, rng):
        A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        A = A + A.conj().T
        rho = random_state(rng, 3)
        oracle = sum(A[i, j] * rho[j, i] for i in range(3) for j in range(3))
        assert vectorize(A.T) @ vectorize(rho) == pytest.approx(oracle, abs=1e-13)

    def test_dimension_errors(self):
        with pytest.raises(DimensionError):
            vectorize(np.zeros((2, 3)))
        with pytest.raises(DimensionError):
            devectorize(np.zeros(5))

    def test_superop_convention(self, rng):
        H = qubit_hamiltonian(1.0) + 0.3 * np.array([[0, 1], [1, 0]])
        rho = random_state(rng)
        lhs = apply_superop(hamiltonian_generator(H), rho)
        assert np.allclose(lhs, -1j * (H @ rho - rho @ H), atol=1e-14)

    @given(seeds)
    def test_round_trip_property(self, seed):
        rho = random_state(np.random.default_rng(seed), 4)
        assert np.array_equal(devectorize(vectorize(rho)), rho)


class TestPropagateConst:
    L = qubit_generator(BathSpec(1.0, 1.0, "fermionic"), 1.0)

    def test_zero_time(self, rng):
        rho = random_state(rng)
        assert np.allclose(propagate_const(self.L, rho, 0.0), rho, atol=1e-14)

    def test_relaxes_to_gibbs(self, rng):
        L = reset_dissipator(BathSpec(0.5, 2.0), 1.0)
        out = propagate_const(L, random_state(rng), 50 / 2.0)
        assert np.abs(out - gibbs_qubit(2.0, 1.0)).max() < 1e-10

    def test_agrees_with_rk4(self, rng):
        rho = random_state(rng)
        oracle = devectorize(rk4_oracle(self.L, vectorize(rho), 0.3))
        assert np.abs(propagate_const(self.L, rho, 0.3) - oracle).max() < 1e-8

    def test_stack_of_times(self, rng):
        rho = random_state(rng)
        out = propagate_const(self.L, rho, np.array([0.0, 0.5]))
        assert out.shape == (2, 2, 2)
        assert np.allclose(out[1], propagate_const(self.L, rho, 0.5))

    def test_defective_generator_fallback(self):
        # Jordan block: eigenvector matrix is singular
        L = np.array([[0, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]], dtype=complex)
        rho = np.array([[0.5, 0], [0, 0.5]], dtype=complex)
        out = propagate_const(L, rho, 1.0)
        assert np.allclose(vectorize(out), [0.5, 0, 0, 0.5])

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            propagate_const(np.eye(16), np.eye(2) / 2, 1.0)

    def test_negative_time(self):
        with pytest.raises(DomainError):
            propagate_const(self.L, np.eye(2) / 2, -1.0)

    @given(seeds, st.floats(0.0, 5.0))
    def test_trace_and_hermiticity(self, seed, t):
        rng = np.random.default_rng(seed)
        bath = BathSpec(float(rng.uniform(0.2, 3)), float(rng.uniform(0.1, 3)),
                        ["reset", "fermionic", "bosonic"][seed % 3])
        rho = propagate_const(qubit_generator(bath, float(rng.uniform(0.1, 3))), random_state(rng), t)
        assert abs(np.trace(rho) - 1) < 1e-9
        assert np.abs(rho - rho.conj().T).max() < 1e-12
        check_density_matrix(rho, tol=1e-9)

    @given(seeds, st.floats(1e-3, 1.0))
    def test_data_processing(self, seed, dt):
        rng = np.random.default_rng(seed)
        bath = BathSpec(float(rng.uniform(0.2, 3)), float(rng.uniform(0.1, 3)),
                        ["reset", "fermionic", "bosonic"][seed % 3])
        L = qubit_generator(bath, float(rng.uniform(0.1, 3)))
        r1, r2 = random_state(rng), random_state(rng)
        before = relative_entropy(r1, r2)
        after = relative_entropy(propagate_const(L, r1, dt), propagate_const(L, r2, dt))
        assert after <= before + 1e-9

    def test_free_energy_decreases(self, rng):
        bath = BathSpec(0.7, 1.0, "fermionic")
        eps = 1.5
        L = qubit_generator(bath, eps)
        states = propagate_const(L, random_state(rng), np.linspace(0, 10, 200))
        F = [free_energy(r, qubit_hamiltonian(eps), bath.beta) for r in states]
        assert np.all(np.diff(F) <= 1e-12)


class TestPropagateDriven:
    def test_constant_generator(self, rng):
        L = qubit_generator(BathSpec(1.0, 1.0, "bosonic"), 1.0)
        rho = random_state(rng)
        grid = np.linspace(0, 2, 21)
        traj = propagate_driven(lambda t: L, rho, grid, max_step=2 / 2000)
        assert np.abs(traj - propagate_const(L, rho, grid)).max() < 1e-8

    def test_zero_generator(self, rng):
        rho = random_state(rng)
        traj = propagate_driven(lambda t: np.zeros((4, 4)), rho, np.linspace(0, 1, 5))
        assert np.allclose(traj, rho)

    def test_slow_ramp_tracks_gibbs(self):
        bath = BathSpec(1.0, 1.0)
        tau = 100.0

        def eps(t):
            return 1.0 + t / tau

        grid = np.linspace(0, tau, 11)
        traj = propagate_driven(lambda t: qubit_generator(bath, eps(t)), gibbs_qubit(1.0, 1.0), grid,
                                max_step=tau / 2000)
        gap = np.abs(traj[-1] - gibbs_qubit(1.0, 2.0)).max()
        assert gap < 1 / tau

    def test_coarse_step_raises(self):
        # a non-trace-preserving generator exposes the drift check
        L = -np.eye(4)
        with pytest.raises(AccuracyError):
            propagate_driven(lambda t: L, np.eye(2) / 2, np.linspace(0, 1, 3))

    def test_grid_must_increase(self):
        with pytest.raises(DomainError):
            propagate_driven(lambda t: np.zeros((4, 4)), np.eye(2) / 2, [0.0, 0.0])

    @given(seeds)
    def test_trace_preserved(self, seed):
        rng = np.random.default_rng(seed)
        bath = BathSpec(float(rng.uniform(0.3, 2)), 1.0, "fermionic")
        traj = propagate_driven(lambda t: qubit_generator(bath, 1 + 0.5 * np.sin(t)),
                                random_state(rng), np.linspace(0, 3, 7), max_step=0.01)
        tr = np.trace(traj, axis1=1, axis2=2)
        assert np.abs(tr - 1).max() < 1e-9
        assert np.abs(traj - np.conj(np.swapaxes(traj, 1, 2))).max() < 1e-12


class TestEntropies:
    def test_pure(self):
        assert von_neumann_entropy(np.diag([1.0, 0.0])) == 0.0

    def test_maximally_mixed(self):
        assert von_neumann_entropy(np.eye(2) / 2) == pytest.approx(np.log(2), abs=1e-15)

    def test_gibbs_092(self):
        oracle = -0.92 * np.log(0.92) - 0.08 * np.log(0.08)
        assert von_neumann_entropy(np.diag([0.92, 0.08])) == pytest.approx(oracle, abs=1e-14)
        assert oracle == pytest.approx(0.2785, abs=5e-4)

    def test_relative_self(self, rng):
        rho = random_state(rng)
        assert relative_entropy(rho, rho) == pytest.approx(0.0, abs=1e-12)

    @given(st.floats(0.01, 0.99), st.floats(0.01, 0.99))
    def test_relative_diagonal(self, p, q):
        oracle = p * np.log(p / q) + (1 - p) * np.log((1 - p) / (1 - q))
        assert relative_entropy(np.diag([p, 1 - p]), np.diag([q, 1 - q])) == pytest.approx(oracle, abs=1e-12)

    def test_relative_infinite(self):
        assert relative_entropy(np.eye(2) / 2, np.diag([1.0, 0.0])) == np.inf

    @given(seeds, st.floats(0.1, 5), st.floats(0.0, 3))
    def test_free_energy_identity(self, seed, beta, eps):
        rho = random_state(np.random.default_rng(seed))
        H = qubit_hamiltonian(eps)
        omega = gibbs_qubit(beta, eps)
        lhs = beta * (free_energy(rho, H, beta) - free_energy(omega, H, beta))
        assert lhs == pytest.approx(relative_entropy(rho, omega), abs=1e-10)
        assert lhs >= -1e-12

    def test_free_energy_gibbs(self):
        beta, eps = 0.8, 1.7
        Z = 2 * np.cosh(beta * eps / 2)
        F = free_energy(gibbs_qubit(beta, eps), qubit_hamiltonian(eps), beta)
        assert F == pytest.approx(-np.log(Z) / beta, abs=1e-13)

    def test_free_energy_zero_temperature(self):
        F = free_energy(gibbs_qubit(1e3, 1.0), qubit_hamiltonian(1.0), 1e3)
        assert F == pytest.approx(-0.5, abs=1e-9)

    def test_free_energy_bad_beta(self):
        with pytest.raises(DomainError):
            free_energy(np.eye(2) / 2, np.eye(2), 0.0)


BELL = np.zeros((4, 4), dtype=complex)
BELL[np.ix_([0, 3], [0, 3])] = 0.5


class TestJoint:
    def test_product_partial_trace(self, rng):
        r, s = random_state(rng), random_state(rng)
        J = np.kron(r, s)
        assert np.allclose(partial_trace(J, "system"), r)
        assert np.allclose(partial_trace(J, "ancilla"), s)

    def test_bell_reduced(self):
        assert np.allclose(partial_trace(BELL, "system"), np.eye(2) / 2)

    def test_index_contraction_oracle(self, rng):
        J = random_state(rng, 4)
        T = J.reshape(2, 2, 2, 2)
        oracle = np.zeros((2, 2), dtype=complex)
        for i in range(2):
            for j in range(2):
                for a in range(2):
                    oracle[i, j] += T[i, a, j, a]
        assert np.allclose(partial_trace(J, "system"), oracle, atol=1e-15)

    def test_wrong_dimension(self):
        with pytest.raises(DimensionError):
            partial_trace(np.eye(2) / 2)

    def test_mutual_information(self, rng):
        assert mutual_information(np.kron(random_state(rng), random_state(rng))) == pytest.approx(0, abs=1e-12)
        assert mutual_information(BELL) == pytest.approx(2 * np.log(2), abs=1e-12)
        J = random_state(rng, 4)
        oracle = (von_neumann_entropy(partial_trace(J, "system"))
                  + von_neumann_entropy(partial_trace(J, "ancilla")) - von_neumann_entropy(J))
        assert mutual_information(J) == pytest.approx(oracle, abs=1e-14)

    @given(seeds)
    def test_mutual_information_nonnegative(self, seed):
        assert mutual_information(random_state(np.random.default_rng(seed), 4)) >= -1e-10

    def test_trace_distance(self, rng):
        rho = random_state(rng)
        assert trace_distance(rho, rho) == pytest.approx(0, abs=1e-15)
        assert trace_distance(np.diag([1.0, 0]), np.diag([0, 1.0])) == pytest.approx(1.0)

    @given(st.floats(0, 1), st.floats(0, 1))
    def test_trace_distance_diagonal(self, p1, p2):
        assert trace_distance(np.diag([p1, 1 - p1]), np.diag([p2, 1 - p2])) == pytest.approx(abs(p1 - p2), abs=1e-14)


class TestLiouvillianInvariants:
    @pytest.mark.parametrize("kind", ["reset", "fermionic", "bosonic"])
    def test_trace_preserving_and_fixed_point(self, kind):
        bath = BathSpec(0.8, 1.3, kind)
        L = dissipator(bath, 1.1)
        assert np.abs(trace_row(2) @ L).max() < 1e-12
        assert np.abs(L @ vectorize(gibbs_qubit(bath.beta, 1.1))).max() < 1e-10
