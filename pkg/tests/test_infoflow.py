import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qthermo.errors import DomainError
from qthermo.infoflow import blp_measure, blp_measure_propagated, blp_threshold, free_energy_trace
from qthermo.nonmarkov import AncillaBathSpec


def spec_y(y, T=1.0, E=1.0):
    return AncillaBathSpec(T, 1.0, 1.0, y, E)


REF_SPEC = AncillaBathSpec(2.5, 1.0, 1.0, 2.0, 1.0)
RHO0 = np.diag([0.7, 0.3])


class TestBLP:
    def test_markov(self):
        assert blp_measure(spec_y(0.0), 1.0, 0.0) == 0.0

    def test_monotone(self):
        N = [blp_measure(spec_y(y), 1.0, 0.0) for y in (0.5, 1, 2, 4)]
        assert np.all(np.diff(N) >= 0) and N[-1] > 0

    @pytest.mark.parametrize("y", [0.5, 2.0, 4.0])
    def test_propagation_oracle(self, y):
        a = blp_measure(spec_y(y), 1.0, 0.0)
        b = blp_measure_propagated(spec_y(y), np.diag([1.0, 0.0]), np.diag([0.0, 1.0]), mesh=10_000)
        assert a == pytest.approx(b, abs=1e-3)

    def test_threshold(self):
        y0 = blp_threshold(tol=1e-4)
        assert blp_measure(spec_y(y0 * 0.99), 1.0, 0.0) <= 1e-10
        assert blp_measure(spec_y(y0 * 1.05), 1.0, 0.0) > 1e-10
        assert 0.25 < y0 < 2.0

    def test_requires_equal_rates(self):
        with pytest.raises(DomainError):
            blp_measure(AncillaBathSpec(1.0, 1.0, 2.0, 1.0, 1.0), 1.0, 0.0)

    def test_population_domain(self):
        with pytest.raises(DomainError):
            blp_measure(spec_y(1.0), 1.5, 0.0)

    @settings(max_examples=15)
    @given(st.floats(0, 5), st.floats(0, 1), st.floats(0, 1))
    def test_nonnegative_and_scales(self, y, p1, p2):
        N = blp_measure(spec_y(y), p1, p2)
        assert N >= 0
        full = blp_measure(spec_y(y), 1.0, 0.0)
        assert N == pytest.approx(abs(p1 - p2) * full, rel=1e-9, abs=1e-15)


class TestFreeEnergy:
    tr = free_energy_trace(REF_SPEC, RHO0, 10.0, 10_000)

    def test_decomposition(self):
        assert self.tr.decomposition_residual() < 1e-9

    def test_initial_values(self):
        assert abs(self.tr.F_A[0]) < 1e-14 and abs(self.tr.MI[0]) < 1e-14

    def test_total_monotone(self):
        assert np.all(np.diff(self.tr.F_total) <= 1e-12)

    def test_system_below_initial(self):
        assert np.all(self.tr.F_S <= self.tr.F_S[0] + 1e-12)

    def test_nonnegative_parts(self):
        assert self.tr.MI.min() >= -1e-10 and self.tr.F_A.min() >= -1e-10

    def test_ordering(self):
        # the system sheds free energy faster than the joint state
        i = np.searchsorted(self.tr.times, 1.0)
        assert self.tr.F_S[i] < self.tr.F_total[i]
        assert self.tr.F_A[i] > 0 and self.tr.MI[i] > 0

    def test_uncoupled(self):
        tr = free_energy_trace(AncillaBathSpec(2.5, 1.0, 1.0, 0.0, 1.0), RHO0, 5.0, 500)
        assert np.abs(tr.F_A).max() < 1e-14 and np.abs(tr.MI).max() < 1e-12

    def test_long_time(self):
        tr = free_energy_trace(REF_SPEC, RHO0, 50.0, 1000)
        for series in (tr.F_total, tr.F_S, tr.F_A, tr.MI):
            assert abs(series[-1]) < 1e-8

    def test_bad_time(self):
        with pytest.raises(DomainError):
            free_energy_trace(REF_SPEC, RHO0, 0.0)
