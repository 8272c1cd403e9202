import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smoothcount.errors import InputError
from smoothcount.hypergraph import fano_plane, matching_instance
from smoothcount.model import ProbabilityVector, SparseSystem
from smoothcount.oracle import brute_force_P
from smoothcount.zerofree import (Certificate, PolydiscFailure, check_polydisc,
                                  max_delta, max_gamma_matching,
                                  max_gamma_uniform, suggest_gamma_sparse)

from genutil import certified_instance, random_system, with_gamma


def single(alpha, beta, gamma):
    return SparseSystem.from_entries(1, 1, [(0, 0, alpha)], [beta], [gamma])


class TestCheckPolydisc:
    def test_boundary_pass_with_zero_margin(self):
        cert = check_polydisc(single(1.0, 0.0, 0.25), [0.5])
        assert isinstance(cert, Certificate)
        assert cert.lam == (0.5,)
        assert cert.margin == pytest.approx(0.0, abs=1e-15)

    def test_row_violation_reported(self):
        report = check_polydisc(single(1.0, 0.0, 0.25), [0.6])
        assert isinstance(report, PolydiscFailure)
        (violation,) = report.violations
        assert violation.kind == "row"
        assert violation.value == pytest.approx(0.75)
        assert violation.bound == pytest.approx(0.5)

    def test_lambda_formula_with_nonzero_beta(self):
        report = check_polydisc(single(1.0, 1.0, 1.0), [0.2])
        assert report.lam[0] == pytest.approx(0.2 * math.e, rel=1e-15)

    def test_every_violation_listed(self):
        s = SparseSystem.from_entries(
            1, 2, [(0, 0, 1.0), (0, 1, 1.0)], [2.0], [2.0])
        report = check_polydisc(s, [1.0, 0.1])
        assert not report.passed
        kinds = {(v.kind, v.index) for v in report.violations}
        assert ("lambda", 0) in kinds  # 1.0 * e^4 is far above 1
        assert ("lambda", 1) in kinds  # 0.1 * e^4 is still above 1

    def test_invalid_rho(self):
        with pytest.raises(InputError):
            check_polydisc(single(1.0, 0.0, 1.0), [-0.5])
        with pytest.raises(InputError):
            check_polydisc(single(1.0, 0.0, 1.0), [0.5, 0.5])


class TestMaxDelta:
    def test_zero_matrix_closed_form(self):
        s = SparseSystem.from_entries(0, 3, [], [], [])
        x = (0.3, 0.7, 0.5)
        d = max_delta(s, x)
        assert d == pytest.approx(1.0 - 0.7, abs=1e-6)

    def test_scalar_closed_form(self):
        d = max_delta(single(1.0, 0.0, 0.25), [0.25])
        assert d == pytest.approx(0.5, abs=1e-6)

    def test_none_when_hopeless(self):
        # lambda = rho * e >= e > 1 already at delta -> 0
        assert max_delta(single(1.0, 1.0, 1.0), [1.0]) is None

    def test_bisection_self_consistency(self):
        rng = np.random.default_rng(21)
        for _ in range(10):
            system, p = certified_instance(rng, n_max=8)
            x = p.evaluation_points
            d = max_delta(system, x)
            assert d is not None
            assert check_polydisc(system, tuple(v / (1.0 - d) for v in x)).passed
            if d < 1.0 - 1e-6:
                worse = d + 1e-6
                assert not check_polydisc(
                    system, tuple(v / (1.0 - worse) for v in x)).passed

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1), st.floats(0.05, 0.95))
    def test_monotone_in_rho(self, seed, shrink):
        rng = np.random.default_rng(seed)
        system, p = certified_instance(rng, n_max=6)
        x = p.evaluation_points
        d = max_delta(system, x)
        rho = tuple(v / (1.0 - d) for v in x)
        assert check_polydisc(system, rho).passed
        smaller = tuple(r * shrink for r in rho)
        assert check_polydisc(system, smaller).passed


def uniform_condition(t, degree, delta):
    # direct evaluation of the admissibility inequality, kept independent of
    # the bisection under test
    if degree == math.inf:
        return math.exp(t) * 2.0 * math.sqrt(t) <= 1.0 - delta
    return math.exp(t) * (1.0 + 2.0 * degree * math.sqrt(t)) <= (1.0 - delta) * (degree - 1)


class TestMaxGammaUniform:
    def test_degree_three_constant(self):
        gamma = max_gamma_uniform(1, 1e-6, 3)
        assert 0.025 <= gamma < 0.026
        # direct grid check of the inequality at delta = 0 boundary values
        assert uniform_condition(0.025, 3, 0.0)
        assert not uniform_condition(0.026, 3, 0.0)

    def test_unbounded_degree_constant(self):
        gamma = max_gamma_uniform(1, 1e-6, math.inf)
        assert 0.17 <= gamma < 0.18

    def test_scales_inversely_with_k(self):
        t = max_gamma_uniform(1, 1e-3, 3)
        assert max_gamma_uniform(5, 1e-3, 3) == pytest.approx(t / 5, rel=1e-12)

    def test_monotone_in_degree_and_delta(self):
        values = [max_gamma_uniform(1, 1e-3, d) for d in (3, 5, 9, 17)]
        assert values == sorted(values)
        assert max_gamma_uniform(1, 1e-3, math.inf) >= values[-1]
        assert max_gamma_uniform(1, 0.2, 3) <= max_gamma_uniform(1, 1e-3, 3)

    def test_returned_value_is_maximal(self):
        for degree in (3, 7, math.inf):
            t = max_gamma_uniform(1, 1e-3, degree)
            assert uniform_condition(t, degree, 1e-3)
            assert not uniform_condition(t + 1e-6, degree, 1e-3)

    def test_validation(self):
        with pytest.raises(InputError):
            max_gamma_uniform(0, 1e-3, 3)
        with pytest.raises(InputError):
            max_gamma_uniform(1, 1e-3, 2)
        with pytest.raises(InputError):
            max_gamma_uniform(1, 1.5, 3)


def matching_condition(t, degree, omega, delta):
    lam = omega * math.exp(t) / ((1.0 - delta) * (degree - 1))
    if lam >= 1.0:
        return False
    if t == 0.0:
        return True
    return lam / (1.0 - lam) <= 1.0 / (2.0 * degree * math.sqrt(t))


class TestMaxGammaMatching:
    def test_omega_one_target_trivially_admissible(self):
        report = max_gamma_matching(3, 3, 1.0, 0.01)
        assert report.target_gamma == 0.0
        assert report.target_admissible

    def test_gamma_grows_as_omega_shrinks(self):
        # the admissible weight diverges as omega -> 0, but stays below the
        # ln(1/omega)/k target: the second condition caps it strictly
        gammas = []
        for omega in (1e-2, 1e-3, 1e-4):
            report = max_gamma_matching(3, 3, omega, 0.01)
            assert report.gamma > 0.0
            assert report.gamma < report.target_gamma
            assert not report.target_admissible
            assert matching_condition(report.gamma * 3, 3, omega, 0.01)
            assert not matching_condition(report.gamma * 3 + 1e-6, 3, omega, 0.01)
            gammas.append(report.gamma)
        assert gammas == sorted(gammas)

    def test_target_admissible_near_one(self):
        # for omega close to 1 the target weight is tiny and passes
        assert max_gamma_matching(3, 3, 0.9999, 0.01).target_admissible
        assert not max_gamma_matching(3, 3, 0.5, 0.01).target_admissible

    def test_cross_module_certificate(self):
        # the bisection weight certifies the actual 3-uniform 3-regular instance
        report = max_gamma_matching(3, 3, 1e-3, 0.01)
        assert report.gamma > 0.0
        inst = matching_instance(fano_plane(), 1e-3, report.gamma, delta=0.01)
        x = inst.p.evaluation_points
        rho = tuple(v / (1.0 - 0.01) for v in x)
        assert check_polydisc(inst.system, rho).passed


class TestSuggestGammaSparse:
    def test_identity_like(self):
        s = SparseSystem.from_entries(
            3, 3, [(0, 0, 1.0), (1, 1, 1.0), (2, 2, 1.0)],
            [1.0] * 3, [1.0] * 3)
        result = suggest_gamma_sparse(s)
        assert result.gamma == (1.0, 1.0, 1.0)
        assert result.column_sums == (0.0, 0.0, 0.0)
        assert result.condition_ok

    def test_two_in_a_row(self):
        s = SparseSystem.from_entries(
            1, 2, [(0, 0, 1.0), (0, 1, 1.0)], [1.0], [1.0])
        result = suggest_gamma_sparse(s)
        assert result.gamma == (0.5,)
        assert result.column_sums == pytest.approx((0.25, 0.25))
        assert result.condition_ok

    def test_random_sign_matrices_always_pass(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            n = int(rng.integers(3, 10))
            m = int(rng.integers(2, 8))
            entries = []
            for j in range(n):
                nnz = int(rng.integers(1, min(3, m) + 1))
                for i in sorted(int(v) for v in rng.choice(m, nnz, replace=False)):
                    entries.append((i, j, float(rng.choice((-1.0, 1.0)))))
            s = SparseSystem.from_entries(
                m, n, entries, [0.0] * m, [1.0] * m)
            # keep rows within the sparsity the rule assumes
            if max(s.row_nonzeros) == 0:
                continue
            result = suggest_gamma_sparse(s)
            assert result.condition_ok
            assert all(v <= 0.5 + 1e-9 for v in result.column_sums)

    def test_rejects_large_entries(self):
        s = SparseSystem.from_entries(1, 1, [(0, 0, 1.5)], [0.0], [1.0])
        with pytest.raises(InputError):
            suggest_gamma_sparse(s)


class TestNonvanishingSpot:
    def test_certified_polydisc_has_no_zeros(self):
        # small version of the acceptance property: random points strictly
        # inside a certified polydisc never hit a zero
        rng = np.random.default_rng(24)
        for _ in range(5):
            system, p = certified_instance(rng, n_max=8)
            x = p.evaluation_points
            d = max_delta(system, x)
            rho = tuple(v / (1.0 - d) for v in x)
            for _ in range(100):
                radii = rng.uniform(0.0, 1.0, system.n_cols) * np.asarray(rho)
                phases = rng.uniform(0.0, 2.0 * math.pi, system.n_cols)
                z = radii * np.exp(1j * phases)
                assert abs(brute_force_P(system, z)) > 0.0
