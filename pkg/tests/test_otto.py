import numpy as np
import pytest
from hypothesis import given, strategies as st

from qthermo.dissipators import BathSpec, reset_dissipator
from qthermo.errors import DomainError
from qthermo.otto import (
    OttoSpec,
    exact_power,
    exponential_profile,
    itt_heats,
    itt_power,
    power_factor,
    reset_cycle_by_propagation,
    reset_model_steady_cycle,
    steady_cycle_populations,
    symmetric_optimum,
    thermalization_factor,
)
from qthermo.nonmarkov import profile
from qthermo.qdyn import propagate_const


def reset_limit_cycle_power(spec, Gamma_C, Gamma_H, rho0, n_cycles=200):
    """Oracle: compose exact isochore propagators, then read off one cycle."""
    rho_hot = reset_cycle_by_propagation(Gamma_C, Gamma_H, spec, rho0, n_cycles)[-1]
    rho_cold = propagate_const(reset_dissipator(BathSpec(1 / spec.beta_C, Gamma_C), spec.eps1), rho_hot,
                               spec.tau_C)
    dp = rho_cold[0, 0].real - rho_hot[0, 0].real
    return (spec.eps2 - spec.eps1) * dp / (spec.tau_C + spec.tau_H)


@st.composite
def otto_specs(draw):
    beta_H = draw(st.floats(0.1, 1.0))
    beta_C = beta_H * draw(st.floats(1.1, 5.0))
    eps1 = draw(st.floats(0.1, 3.0))
    eps2 = eps1 * draw(st.floats(1.0, beta_C / beta_H))
    return OttoSpec(eps1, eps2, beta_C, beta_H)


class TestSpec:
    def test_ordering_violation(self):
        with pytest.raises(DomainError):
            OttoSpec(1.0, 5.0, 1.0, 1.0)

    def test_profile_must_start_at_one(self):
        with pytest.raises(DomainError):
            OttoSpec(1.0, 2.0, 1.0, 0.25, f_C=lambda t: 0.5)


class TestITT:
    def test_equal_gaps(self):
        q_abs, q_rel, eta = itt_heats(OttoSpec(1.0, 1.0, 1.0, 0.5))
        assert eta == 0 and q_abs + q_rel == 0

    def test_constraint_edge(self):
        spec = OttoSpec(1.0, 2.0, 1.0, 0.5)
        assert spec.p_C == spec.p_H
        assert itt_heats(spec)[0] == 0

    @given(otto_specs())
    def test_eta_below_carnot(self, spec):
        q_abs, q_rel, eta = itt_heats(spec)
        assert q_abs >= -1e-12
        assert q_rel == pytest.approx(-(spec.eps1 / spec.eps2) * q_abs)
        assert eta <= spec.eta_carnot + 1e-15


class TestExactPower:
    spec = OttoSpec(1.0, 2.0, 1.0, 0.25)

    def test_full_thermalization(self):
        s = OttoSpec(1.0, 2.0, 1.0, 0.25, 3.0, 3.0, lambda t: 0.0 if t else 1.0, lambda t: 0.0 if t else 1.0)
        assert exact_power(s) == itt_power(s)

    def test_no_thermalization(self):
        assert thermalization_factor(1.0, 1.0) == 0.0
        assert thermalization_factor(1 - 1e-9, 1 - 1e-9) == pytest.approx(0, abs=1e-8)

    def test_factor_domain(self):
        with pytest.raises(DomainError):
            thermalization_factor(1.5, 0.2)

    def test_matches_limit_cycle(self):
        s = OttoSpec(1.0, 2.0, 1.0, 0.25, 1.0, 1.0, exponential_profile(1.0), exponential_profile(1.0))
        oracle = reset_limit_cycle_power(s, 1.0, 1.0, np.diag([0.3, 0.7]))
        assert exact_power(s) == pytest.approx(oracle, abs=1e-6)

    @given(st.floats(0, 1), st.floats(0, 1))
    def test_factor_in_unit_interval(self, a, b):
        assert 0.0 <= thermalization_factor(a, b) <= 1.0

    @given(otto_specs(), st.floats(0.01, 20), st.floats(0.01, 20))
    def test_power_bounded_by_itt(self, spec, tc, th):
        f = exponential_profile(1.0)
        s = OttoSpec(spec.eps1, spec.eps2, spec.beta_C, spec.beta_H, tc, th, f, f)
        assert 0 <= exact_power(s) <= itt_power(s) + 1e-15


class TestResetModel:
    spec = OttoSpec(1.0, 2.0, 1.0, 0.25)

    def test_long_strokes(self):
        r = reset_model_steady_cycle(1.0, 1.0, 40.0, 40.0, self.spec)
        assert abs(r.alpha) < 1e-15
        s = OttoSpec(1.0, 2.0, 1.0, 0.25, 40.0, 40.0)
        assert r.power == pytest.approx(itt_power(s), rel=1e-12)

    @pytest.mark.parametrize("gt", [2.0, 4.0, 8.0])
    def test_leading_alpha(self, gt):
        r = reset_model_steady_cycle(1.0, 1.5, gt, gt / 1.5, self.spec)
        assert abs(r.alpha - r.alpha_leading) <= 5 * np.exp(-2 * gt)

    def test_efficiency_unchanged(self):
        r = reset_model_steady_cycle(1.0, 1.0, 1.5, 2.0, self.spec)
        _, _, eta_o = itt_heats(self.spec)
        assert r.eta == pytest.approx(eta_o, abs=1e-14)

    def test_recursion_vs_propagator(self):
        Gc, Gh, tc, th = 1.3, 0.7, 2.0, 3.0
        r = reset_model_steady_cycle(Gc, Gh, tc, th, self.spec)
        s = OttoSpec(1.0, 2.0, 1.0, 0.25, tc, th)
        rho = np.diag([r.p_after_hot, 1 - r.p_after_hot]).astype(complex)
        after = reset_cycle_by_propagation(Gc, Gh, s, rho, 1)[0]
        assert after[0, 0].real == pytest.approx(r.p_after_hot, abs=1e-12)

    def test_validity_threshold(self):
        with pytest.raises(DomainError):
            reset_model_steady_cycle(1.0, 1.0, 0.5, 2.0, self.spec)

    def test_initial_state_independence(self):
        s = OttoSpec(1.0, 2.0, 1.0, 0.25, 0.7, 0.4)
        a = reset_cycle_by_propagation(1.0, 1.0, s, np.diag([1.0, 0.0]), 100)[-1]
        b = reset_cycle_by_propagation(1.0, 1.0, s, np.diag([0.0, 1.0]), 100)[-1]
        assert np.abs(a - b).max() < 1e-10

    def test_population_map(self):
        s = OttoSpec(1.0, 2.0, 1.0, 0.25, 0.5, 0.5)
        c1 = steady_cycle_populations(s, 0.0)
        c2 = steady_cycle_populations(s, 1.0)
        assert c1[0] == pytest.approx(c2[0], abs=1e-11)


class TestSymmetricOptimum:
    spec = OttoSpec(1.0, 2.0, 1.0, 0.25)

    @pytest.mark.parametrize("tau", [0.1, 1.0, 5.0])
    def test_exponential_closed_form(self, tau):
        K = (self.spec.eps2 - self.spec.eps1) * (self.spec.p_C - self.spec.p_H)
        f = exponential_profile(1.0)
        assert K * power_factor(f, tau, tau) == pytest.approx(K * np.tanh(tau / 2) / (2 * tau), rel=1e-12)

    def test_exponential_supremum(self):
        opt = symmetric_optimum(exponential_profile(1.0), self.spec, check_pairs=100)
        K = (self.spec.eps2 - self.spec.eps1) * (self.spec.p_C - self.spec.p_H)
        assert opt.at_lower_bound and opt.tau_star == 0.0
        assert opt.power == pytest.approx(K / 4, rel=1e-6)

    def test_off_diagonal_inequality(self):
        rng = np.random.default_rng(5)
        f = profile(2.0)
        for tc, th in rng.uniform(1e-3, 20, (100, 2)):
            assert power_factor(f, tc, th) <= np.sqrt(power_factor(f, tc, tc) * power_factor(f, th, th)) * (1 + 1e-12)

    def test_interior_optimum(self):
        f = profile(2.0)
        opt = symmetric_optimum(f, self.spec)
        assert not opt.at_lower_bound and opt.tau_star > 0
        d = 1e-4
        left = power_factor(f, opt.tau_star - d, opt.tau_star - d) - power_factor(f, opt.tau_star, opt.tau_star)
        right = power_factor(f, opt.tau_star + d, opt.tau_star + d) - power_factor(f, opt.tau_star, opt.tau_star)
        assert left < 0 and right < 0
