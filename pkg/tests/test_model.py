import itertools
import math

import numpy as np
import pytest

from smoothcount.errors import InputError
from smoothcount.hypergraph import complete_graph, fano_plane, incidence_system
from smoothcount.model import (PartialAssignment, ProbabilityVector,
                               SparseSystem, column_max_nonzeros, penalty,
                               restrict)

from genutil import direct_penalty, random_system


def simple(entries, beta, gamma, m=None, n=None):
    m = m if m is not None else (max((i for i, _, _ in entries), default=-1) + 1)
    n = n if n is not None else (max((j for _, j, _ in entries), default=-1) + 1)
    return SparseSystem.from_entries(m, n, entries, beta, gamma)


class TestConstruction:
    def test_zero_coefficients_dropped_by_builder(self):
        s = simple([(0, 0, 1.0), (0, 1, 0.0)], [1.0], [1.0], m=1, n=2)
        assert s.column_nonzeros == (1, 0)

    def test_direct_constructor_rejects_stored_zero(self):
        with pytest.raises(InputError):
            SparseSystem(1, 1, (((0, 0.0),),), (1.0,), (1.0,))

    def test_rows_strictly_increasing(self):
        with pytest.raises(InputError):
            SparseSystem(2, 1, (((1, 1.0), (0, 1.0)),), (1.0, 1.0), (1.0, 1.0))

    def test_gamma_must_be_positive(self):
        with pytest.raises(InputError):
            simple([(0, 0, 1.0)], [1.0], [0.0])
        with pytest.raises(InputError):
            simple([(0, 0, 1.0)], [1.0], [-2.0])

    def test_duplicate_entries_rejected(self):
        with pytest.raises(InputError):
            simple([(0, 0, 1.0), (0, 0, 2.0)], [1.0], [1.0])

    def test_out_of_range_entry(self):
        with pytest.raises(InputError):
            SparseSystem.from_entries(1, 1, [(0, 3, 1.0)], [1.0], [1.0])

    def test_probability_vector_open_interval(self):
        with pytest.raises(InputError):
            ProbabilityVector((0.0,))
        with pytest.raises(InputError):
            ProbabilityVector((1.0,))
        pv = ProbabilityVector((0.25,))
        assert pv.evaluation_points == (0.25 / 0.75,)

    def test_partial_assignment_validation(self):
        with pytest.raises(InputError):
            PartialAssignment.of({0: 2})
        with pytest.raises(InputError):
            PartialAssignment(((0, 1), (0, 0)))
        assert PartialAssignment.of({2: 1, 0: 0}).fixed == ((0, 0), (2, 1))


class TestColumnMaxNonzeros:
    def test_single_row(self):
        s = simple([(0, 0, 1.0), (0, 1, 1.0)], [1.0], [1.0], m=1, n=2)
        assert column_max_nonzeros(s) == 1

    def test_three_uniform_incidence(self):
        s = incidence_system(fano_plane(), 1.0)
        assert column_max_nonzeros(s) == 3

    def test_empty_matrix(self):
        s = SparseSystem.from_entries(0, 4, [], [], [])
        assert column_max_nonzeros(s) == 0


class TestPenalty:
    def test_hand_value(self):
        s = simple([(0, 0, 1.0), (0, 1, 1.0)], [1.0], [2.0], m=1, n=2)
        assert penalty(s, (1, 1)) == pytest.approx(2.0, abs=0.0)

    def test_zero_on_solutions(self):
        s = simple([(0, 0, 1.0), (0, 1, 1.0)], [1.0], [3.0], m=1, n=2)
        assert penalty(s, (1, 0)) == 0.0
        assert penalty(s, (0, 1)) == 0.0
        assert penalty(s, (0, 0)) > 0.0

    def test_perfect_matching_has_zero_penalty(self):
        s = incidence_system(complete_graph(4), 1.0)
        # edges (0,1) and (2,3) are the 0th and 5th in lexicographic order
        assert penalty(s, (1, 0, 0, 0, 0, 1)) == 0.0

    def test_dimension_mismatch(self):
        s = simple([(0, 0, 1.0)], [1.0], [1.0])
        with pytest.raises(InputError):
            penalty(s, (1, 0))
        with pytest.raises(InputError):
            penalty(s, (2,))


class TestRestrict:
    def test_fix_to_one_subtracts(self):
        s = simple([(0, 0, 1.0), (0, 1, 1.0)], [1.0], [1.0], m=1, n=2)
        r = restrict(s, {1: 1})
        assert r.n_cols == 1
        assert r.beta == (0.0,)
        assert r.to_dense().tolist() == [[1.0]]

    def test_fix_to_zero_keeps_beta(self):
        s = simple([(0, 0, 1.0), (0, 1, 1.0)], [1.0], [1.0], m=1, n=2)
        assert restrict(s, {1: 0}).beta == (1.0,)

    def test_index_out_of_range(self):
        s = simple([(0, 0, 1.0)], [1.0], [1.0])
        with pytest.raises(InputError):
            restrict(s, {5: 1})

    def test_zero_rows_are_kept(self):
        s = simple([(0, 0, 1.0)], [1.0], [1.0])
        r = restrict(s, {0: 1})
        assert r.n_rows == 1 and r.n_cols == 0
        assert r.beta == (0.0,)

    def test_incidence_beta_never_grows(self):
        s = incidence_system(complete_graph(4), 1.0)
        for j in range(s.n_cols):
            for bit in (0, 1):
                r = restrict(s, {j: bit})
                assert all(rb <= b for rb, b in zip(r.beta, s.beta))

    def test_commutes_exhaustively(self):
        rng = np.random.default_rng(11)
        s = random_system(rng, n_min=6, n_max=6, m_max=4)
        for j1, j2 in itertools.permutations(range(6), 2):
            for b1, b2 in itertools.product((0, 1), repeat=2):
                stepwise = restrict(restrict(s, {j1: b1}), {_shift(j2, j1): b2})
                joint = restrict(s, {j1: b1, j2: b2})
                assert stepwise.columns == joint.columns
                assert stepwise.gamma == joint.gamma
                # beta subtractions happen in a different order, so allow ulps
                assert stepwise.beta == pytest.approx(joint.beta, rel=1e-14, abs=1e-14)

    def test_penalty_consistent_with_restriction(self):
        rng = np.random.default_rng(12)
        s = random_system(rng, n_min=6, n_max=6, m_max=4)
        for x in itertools.product((0, 1), repeat=6):
            full = penalty(s, x)
            for j in range(6):
                reduced = restrict(s, {j: x[j]})
                rest = x[:j] + x[j + 1:]
                assert penalty(reduced, rest) == pytest.approx(full, rel=1e-12, abs=1e-12)


def _shift(j2, j1):
    # column index of j2 after column j1 was removed
    return j2 - 1 if j2 > j1 else j2


class TestDirectPenaltyAgreement:
    def test_matches_reference(self):
        rng = np.random.default_rng(13)
        for _ in range(5):
            s = random_system(rng, n_max=8)
            for _ in range(10):
                x = tuple(int(b) for b in rng.integers(0, 2, s.n_cols))
                assert penalty(s, x) == pytest.approx(direct_penalty(s, x), rel=1e-13)
