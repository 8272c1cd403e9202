import itertools
import math

import numpy as np
import pytest

from smoothcount.errors import CertificationError, InputError
from smoothcount.evaluator import (conditional_expectation,
                                   smoothed_expectation,
                                   smoothed_expectation_geometric)
from smoothcount.model import ProbabilityVector, SparseSystem, penalty
from smoothcount.oracle import brute_force_expectation

from genutil import (certified_instance, direct_expectation,
                     direct_geometric_expectation,
                     direct_solution_probability, random_system, with_gamma)


def single(alpha, beta, gamma):
    return SparseSystem.from_entries(1, 1, [(0, 0, alpha)], [beta], [gamma])


def zero_matrix(n):
    return SparseSystem.from_entries(0, n, [], [], [])


class TestSmoothedExpectation:
    def test_closed_form_single_variable(self):
        # (1-p) e^{-1} + p; the point x = 1 sits outside any certified disc,
        # so the exact full-degree route runs under force
        result = smoothed_expectation(single(1.0, 1.0, 1.0), [0.5], 1e-6, force=True)
        assert result.value == pytest.approx(0.683940, abs=1e-6)
        assert result.value == pytest.approx(0.5 * math.exp(-1.0) + 0.5, rel=1e-14)
        assert not result.certified

    def test_zero_matrix_is_one(self):
        certified = smoothed_expectation(zero_matrix(4), [0.3, 0.2, 0.4, 0.1], 1e-6)
        assert certified.certified
        assert certified.value == pytest.approx(1.0, rel=1e-12)
        forced = smoothed_expectation(zero_matrix(3), [0.9, 0.8, 0.7], 1e-6, force=True)
        assert forced.value == pytest.approx(1.0, rel=1e-12)

    def test_certified_against_oracle(self):
        rng = np.random.default_rng(41)
        for _ in range(30):
            system, p = certified_instance(rng, n_max=12)
            eps = 1e-3
            result = smoothed_expectation(system, p, eps)
            assert result.certified
            assert result.tail_bound <= eps / 2
            expected = brute_force_expectation(system, p)
            assert result.value == pytest.approx(expected, rel=eps)

    def test_uncertifiable_raises_with_binding_constraint(self):
        with pytest.raises(CertificationError) as err:
            smoothed_expectation(single(1.0, 1.0, 1.0), [0.5], 1e-3)
        assert err.value.report is not None
        assert err.value.report.violations

    def test_explicit_delta_is_verified(self):
        rng = np.random.default_rng(42)
        system, p = certified_instance(rng, n_max=8)
        from smoothcount.zerofree import max_delta
        best = max_delta(system, p.evaluation_points)
        ok = smoothed_expectation(system, p, 1e-3, delta=best / 2)
        assert ok.certified and ok.delta == best / 2
        with pytest.raises(CertificationError):
            smoothed_expectation(system, p, 1e-3, delta=min(0.99, best + 0.2))

    def test_upper_bounds_solution_probability(self):
        rng = np.random.default_rng(43)
        for _ in range(15):
            system, p = certified_instance(rng, n_max=10, integer_beta=True)
            result = smoothed_expectation(system, p, 1e-4)
            prob = direct_solution_probability(system, p)
            assert result.value * (1.0 + 1e-4) >= prob

    def test_monotone_in_gamma(self):
        rng = np.random.default_rng(44)
        for _ in range(10):
            system, p = certified_instance(rng, n_max=10)
            bigger = with_gamma(system, tuple(2.0 * g for g in system.gamma))
            low = direct_expectation(system, p)
            high = direct_expectation(bigger, p)
            assert high <= low * (1.0 + 1e-12)
            # the evaluator tracks the oracle on the certified instance
            result = smoothed_expectation(system, p, 1e-4)
            assert result.value == pytest.approx(low, rel=1e-4)

    def test_epsilon_validation(self):
        with pytest.raises(InputError):
            smoothed_expectation(zero_matrix(2), [0.3, 0.3], 0.0)


class TestConditionalExpectation:
    def test_all_variables_fixed_is_exact(self):
        rng = np.random.default_rng(45)
        system = random_system(rng, n_min=5, n_max=5)
        p = ProbabilityVector.uniform(0.3, 5)
        for x in itertools.product((0, 1), repeat=5):
            fixing = {j: x[j] for j in range(5)}
            result = conditional_expectation(system, p, fixing, 1e-6)
            assert result.value == pytest.approx(
                math.exp(-penalty(system, x)), rel=1e-12)

    def test_empty_assignment_is_identity(self):
        rng = np.random.default_rng(46)
        system, p = certified_instance(rng, n_max=9)
        base = smoothed_expectation(system, p, 1e-4)
        cond = conditional_expectation(system, p, {}, 1e-4)
        assert cond.log_value == base.log_value

    def test_law_of_total_expectation(self):
        rng = np.random.default_rng(47)
        checked = 0
        while checked < 10:
            system, p = certified_instance(rng, n_max=10)
            eps = 1e-5
            try:
                e1 = conditional_expectation(system, p, {0: 1}, eps)
                e0 = conditional_expectation(system, p, {0: 0}, eps)
            except CertificationError:
                continue  # restriction can lose the certificate for signed systems
            total = p.p[0] * e1.value + (1.0 - p.p[0]) * e0.value
            expected = direct_expectation(system, p)
            assert total == pytest.approx(expected, rel=3 * eps)
            checked += 1


class TestGeometricExpectation:
    def test_reference_value(self):
        result = smoothed_expectation_geometric(
            single(1.0, 1.0, 1.0), [0.5], 1e-4, force=True)
        assert result.value == pytest.approx(0.481073, abs=1e-4)
        assert result.value == pytest.approx(0.4810732364775457, rel=1e-9)
        assert result.assumption == "series-radii"

    def test_zero_matrix_normalization(self):
        result = smoothed_expectation_geometric(zero_matrix(3), [0.3, 0.2, 0.4], 1e-6)
        assert result.certified
        assert result.value == pytest.approx(1.0, rel=1e-6)

    def test_small_instances_match_direct_summation(self):
        rng = np.random.default_rng(48)
        checked = 0
        while checked < 6:
            system = random_system(rng, n_min=2, n_max=2, m_max=3, gamma_scale=0.05)
            p = ProbabilityVector(tuple(float(v) for v in rng.uniform(0.1, 0.35, 2)))
            eps = 1e-5
            try:
                result = smoothed_expectation_geometric(system, p, eps)
            except CertificationError:
                continue
            expected = direct_geometric_expectation(system, p)
            assert result.value == pytest.approx(expected, rel=eps)
            checked += 1

    def test_uncertified_raises_without_force(self):
        with pytest.raises(CertificationError):
            smoothed_expectation_geometric(single(1.0, 1.0, 1.0), [0.5], 1e-4)
