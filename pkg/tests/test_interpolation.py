import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import smoothcount._kernels as kernels
from smoothcount.errors import CertificationError, InputError, WorkLimitError
from smoothcount.interpolation import (CoefficientSeries, composition_cost,
                                       evaluate_g1, exp_series, log_taylor,
                                       required_degree, required_degree_series,
                                       subset_cost, tail_bound,
                                       taylor_coefficients,
                                       taylor_coefficients_geometric)
from smoothcount.model import ProbabilityVector, SparseSystem
from smoothcount.oracle import brute_force_P, brute_force_expectation
from smoothcount.zerofree import max_delta

from genutil import certified_instance, direct_penalty, random_system


def single(alpha, beta, gamma):
    return SparseSystem.from_entries(1, 1, [(0, 0, alpha)], [beta], [gamma])


def zero_matrix(n):
    return SparseSystem.from_entries(0, n, [], [], [])


class TestRequiredDegree:
    def test_reference_case(self):
        # smallest N with 10 * 0.5^(N+1) / ((N+1) * 0.5) <= 0.05, found by scan
        target = 0.1 / 2
        scan = next(N for N in range(100)
                    if 10 * 0.5 ** (N + 1) / ((N + 1) * 0.5) <= target)
        assert scan == 6
        assert required_degree(10, 0.5, 0.1) == 6

    def test_never_exceeds_n(self):
        assert required_degree(1, 0.9, 0.5) <= 1
        assert required_degree(4, 1e-6, 1e-6) == 4

    def test_halving_epsilon_increment_bound(self):
        for delta in (0.2, 0.5, 0.8):
            step = math.ceil(math.log(2) / -math.log(1.0 - delta))
            for eps in (0.5, 0.1, 0.01):
                n1 = required_degree_series(30, delta, eps)
                n2 = required_degree_series(30, delta, eps / 2)
                assert n1 <= n2 <= n1 + step

    def test_uncapped_matches_formula(self):
        degree = required_degree_series(10, 0.5, 0.1)
        assert degree == 6
        assert tail_bound(10, 0.5, 6) <= 0.05 < tail_bound(10, 0.5, 5)

    def test_validation(self):
        with pytest.raises(InputError):
            required_degree(5, 0.0, 0.1)
        with pytest.raises(InputError):
            required_degree(5, 0.5, 1.5)


class TestTaylorCoefficients:
    def test_two_term_polynomial(self):
        for t in (0.25, 1.0, 3.0):
            series = taylor_coefficients(single(1.0, 1.0, 1.0), (t,), 1)
            assert series.log_a0 == pytest.approx(-1.0, abs=1e-15)
            assert series.normalized[0] == pytest.approx(t * math.e, rel=1e-14)

    def test_zero_matrix_binomials(self):
        n = 9
        series = taylor_coefficients(zero_matrix(n), (1.0,) * n, n)
        for k in range(1, n + 1):
            assert series.normalized[k - 1] == pytest.approx(math.comb(n, k), rel=1e-13)

    def test_matches_polynomial_oracle_via_horner(self):
        rng = np.random.default_rng(31)
        for _ in range(8):
            system = random_system(rng, n_min=3, n_max=10)
            n = system.n_cols
            x = tuple(float(v) for v in rng.uniform(0.2, 1.5, n))
            series = taylor_coefficients(system, x, n)
            coeffs = (1.0,) + series.normalized
            a0 = math.exp(series.log_a0)
            for _ in range(10):
                z = complex(float(rng.uniform(-0.9, 0.9)),
                            float(rng.uniform(-0.9, 0.9)))
                horner = 0.0 + 0.0j
                for c in reversed(coeffs):
                    horner = horner * z + c
                expected = brute_force_P(system, [z * xj for xj in x])
                assert a0 * horner == pytest.approx(expected, rel=1e-10)

    def test_rejects_degree_above_n(self):
        with pytest.raises(InputError):
            taylor_coefficients(zero_matrix(3), (1.0,) * 3, 4)

    def test_work_limit(self):
        with pytest.raises(WorkLimitError):
            taylor_coefficients(zero_matrix(30), (1.0,) * 30, 15, work_limit=1000)
        assert subset_cost(30, 15) > 1000

    def test_parallel_matches_sequential(self):
        rng = np.random.default_rng(32)
        system = random_system(rng, n_min=12, n_max=12)
        x = tuple(float(v) for v in rng.uniform(0.1, 0.9, 12))
        seq = taylor_coefficients(system, x, 12, threads=1, chunk=64)
        par = taylor_coefficients(system, x, 12, threads=4, chunk=64)
        assert seq.normalized == par.normalized  # identical chunking, identical result
        coarse = taylor_coefficients(system, x, 12, threads=1)
        for a, b in zip(seq.normalized, coarse.normalized):
            assert a == pytest.approx(b, rel=1e-12)


class TestGeometricCoefficients:
    def test_single_variable_closed_form(self):
        series = taylor_coefficients_geometric(single(1.0, 1.0, 1.0), (0.5,), 6)
        for k in range(1, 7):
            expected = 0.5 ** k * math.exp(1.0 - (k - 1) ** 2)
            assert series.normalized[k - 1] == pytest.approx(expected, rel=1e-13)
        assert series.normalized[0] == pytest.approx(math.e / 2, rel=1e-13)

    def test_zero_matrix_geometric_product(self):
        # coefficients of prod_j 1/(1 - x_j z), built up independently
        x = (0.3, 0.5, 0.2)
        degree = 7
        ref = [1.0] + [0.0] * degree
        for xj in x:
            ref = [sum(ref[k - i] * xj ** i for i in range(k + 1))
                   for k in range(degree + 1)]
        series = taylor_coefficients_geometric(zero_matrix(3), x, degree)
        for k in range(1, degree + 1):
            assert series.normalized[k - 1] == pytest.approx(ref[k], rel=1e-12)

    def test_matches_exhaustive_composition_sum(self):
        rng = np.random.default_rng(33)
        system = random_system(rng, n_min=2, n_max=2, m_max=3)
        x = (0.35, 0.55)
        degree = 9
        series = taylor_coefficients_geometric(system, x, degree)
        pen0 = direct_penalty(system, (0, 0))
        for k in range(1, degree + 1):
            total = 0.0
            for e0 in range(k + 1):
                e1 = k - e0
                sums = [0.0] * system.n_rows
                for j, count in ((0, e0), (1, e1)):
                    for i, a in system.columns[j]:
                        sums[i] += a * count
                pen = sum(g * (s - b) ** 2 for g, s, b in
                          zip(system.gamma, sums, system.beta))
                total += x[0] ** e0 * x[1] ** e1 * math.exp(pen0 - pen)
            assert series.normalized[k - 1] == pytest.approx(total, rel=1e-12)

    def test_requires_open_unit_interval(self):
        with pytest.raises(InputError):
            taylor_coefficients_geometric(zero_matrix(2), (0.5, 1.0), 3)


class TestLogTaylor:
    def test_exponential_truncation(self):
        series = CoefficientSeries(log_a0=0.0, normalized=(1.0, 0.5), degree=2)
        assert log_taylor(series) == pytest.approx((1.0, 0.0), abs=1e-15)

    def test_single_factor_series(self):
        x = 0.7
        n = 8
        normalized = tuple(x ** k if k == 1 else 0.0 for k in range(1, n + 1))
        series = CoefficientSeries(log_a0=0.0, normalized=(x,) + (0.0,) * (n - 1),
                                   degree=n)
        b = log_taylor(series)
        for k in range(1, n + 1):
            assert b[k - 1] == pytest.approx((-1) ** (k + 1) * x ** k / k, rel=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(0.01, 3.0), min_size=1, max_size=10))
    def test_round_trip(self, values):
        series = CoefficientSeries(log_a0=0.0, normalized=tuple(values),
                                   degree=len(values))
        back = exp_series(log_taylor(series))
        for a, b in zip(values, back):
            assert b == pytest.approx(a, rel=1e-12, abs=1e-12)


class TestEvaluateG1:
    def test_two_term_exact(self):
        for x in (0.3, 1.0, 2.5):
            log_value, degree, tail = evaluate_g1(
                single(1.0, 1.0, 1.0), (x,), 0.5, 1e-3, force=True)
            assert degree == 1
            assert tail == 0.0
            assert log_value == pytest.approx(math.log(math.exp(-1.0) + x), rel=1e-14)

    def test_zero_matrix_power_of_two(self):
        n = 8
        log_value, _, _ = evaluate_g1(
            zero_matrix(n), (1.0,) * n, 0.5, 1e-3, force=True)
        assert log_value == pytest.approx(n * math.log(2.0), rel=1e-12)

    def test_refuses_uncertified_without_force(self):
        with pytest.raises(CertificationError):
            evaluate_g1(single(1.0, 1.0, 1.0), (1.0,), 0.5, 1e-3)

    def test_certified_instances_match_oracle(self):
        rng = np.random.default_rng(34)
        for _ in range(20):
            system, p = certified_instance(rng, n_max=12)
            x = p.evaluation_points
            delta = max_delta(system, x) - 1e-6
            eps = 1e-3
            log_value, _, _ = evaluate_g1(system, x, delta, eps)
            expected = brute_force_expectation(system, p) / math.prod(
                 1.0 - v for v in p.p)
            assert math.exp(log_value) == pytest.approx(expected, rel=eps)


class TestEnumerationAudit:
    def test_subsets_match_itertools_in_colex_order(self):
        for n in range(1, 9):
            for k in range(n + 1):
                expected = sorted(itertools.combinations(range(n), k),
                                  key=lambda c: c[::-1])
                got = list(kernels.iter_ksubsets(n, k))
                assert got == expected
                assert len(got) == math.comb(n, k)

    def test_multisets_match_itertools(self):
        for n in range(1, 7):
            for k in range(5):
                expected = sorted(
                    itertools.combinations_with_replacement(range(n), k),
                    key=lambda c: c[::-1])
                got = list(kernels.iter_multisets(n, k))
                assert got == expected
                assert len(got) == math.comb(n + k - 1, k)

    def test_unrank_agrees_with_iteration_order(self):
        n, k = 9, 4
        subsets = list(kernels.iter_ksubsets(n, k))
        for rank in (0, 1, 17, len(subsets) - 1):
            assert tuple(kernels.colex_unrank(rank, k, n)) == subsets[rank]

    def test_costs_are_exact_binomials(self):
        assert subset_cost(12, 5) == sum(math.comb(12, k) for k in range(1, 6))
        assert composition_cost(4, 3) == sum(math.comb(4 + k - 1, k) for k in range(1, 4))


class TestGeometricReference:
    def test_series_summation_reference(self):
        # direct summation of the one-variable series, independent of the
        # package: expectation = (1-p) * sum_k p^k exp(-(k-1)^2)
        p = 0.5
        reference = (1.0 - p) * sum(
            p ** k * math.exp(-((k - 1) ** 2)) for k in range(200))
        assert reference == pytest.approx(0.481073, abs=1e-6)
        system = single(1.0, 1.0, 1.0)
        series = taylor_coefficients_geometric(system, (p,), 12)
        total = math.exp(series.log_a0) * (1.0 + math.fsum(series.normalized))
        assert (1.0 - p) * total == pytest.approx(reference, rel=1e-12)
