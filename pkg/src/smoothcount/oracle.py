"""Exhaustive ground-truth computations for testing and verification.

Everything here is intentionally naive: full 2^n or 2^m enumeration with
deterministic chunked accumulation.  These are the references the fast paths
are validated against, so they must stay independent of them.
"""
from __future__ import annotations

import math

import numpy as np

from . import _kernels
from .errors import InputError, WorkLimitError
from .model import ProbabilityVector, SparseSystem

DEFAULT_VARIABLE_CAP = 24
DEFAULT_SIGN_CAP = 20


def _check_cap(bits, cap, what):
    if bits > cap:
        raise WorkLimitError(
            f"{what} needs 2^{bits} terms, over the cap 2^{cap}",
            required=1 << bits, limit=1 << cap,
        )


def brute_force_P(system: SparseSystem, z, *, cap=DEFAULT_VARIABLE_CAP,
                  threads=1, chunk=_kernels.DEFAULT_CHUNK, impl=None) -> complex:
    """Exact value of sum_xi z^xi exp(-penalty(xi)) over all 0-1 vectors."""
    n = system.n_cols
    _check_cap(n, cap, "polynomial evaluation")
    z = np.asarray(z, dtype=np.complex128)
    if z.shape != (n,):
        raise InputError(f"z has shape {z.shape}, expected ({n},)")
    return _kernels.polynomial_value(system.csc, z, n, threads=threads,
                                     chunk=chunk, impl=impl)


def brute_force_expectation(system: SparseSystem, p, *, cap=DEFAULT_VARIABLE_CAP,
                            threads=1, chunk=_kernels.DEFAULT_CHUNK, impl=None) -> float:
    """Exact Bernoulli expectation of exp(-penalty), term by term.

    Summed directly over all 2^n outcomes, not through the polynomial
    identity, so the two routes check each other.
    """
    n = system.n_cols
    _check_cap(n, cap, "expectation")
    p = ProbabilityVector.of(p)
    if len(p) != n:
        raise InputError(f"p has length {len(p)}, expected {n}")
    return _kernels.expectation_value(system.csc, p.p, n, threads=threads,
                                      chunk=chunk, impl=impl)


def count_solutions(system: SparseSystem, tolerance: float = 1e-9, *,
                    cap=DEFAULT_VARIABLE_CAP, threads=1,
                    chunk=_kernels.DEFAULT_CHUNK, impl=None) -> int:
    """Number of 0-1 vectors satisfying every equation within tolerance."""
    n = system.n_cols
    _check_cap(n, cap, "solution count")
    if tolerance < 0.0:
        raise InputError("tolerance must be nonnegative")
    return _kernels.solution_count(system.csc, tolerance, n, threads=threads,
                                   chunk=chunk, impl=impl)


def phase_product_sum(system: SparseSystem, z, *, cap=DEFAULT_SIGN_CAP,
                      threads=1, chunk=_kernels.DEFAULT_CHUNK, impl=None) -> complex:
    """Sum over sign vectors sigma of prod_j (1 + z_j e^{i <alpha_j, sigma>}).

    Only the coefficient matrix of ``system`` enters; beta and gamma are
    ignored.  This is the trigonometric dual whose nonvanishing underlies the
    zero-free certificate, exercised directly as a property check.
    """
    m, n = system.n_rows, system.n_cols
    _check_cap(m, cap, "sign-vector sum")
    z = np.asarray(z, dtype=np.complex128)
    if z.shape != (n,):
        raise InputError(f"z has shape {z.shape}, expected ({n},)")
    return _kernels.phase_sum(system.csc, z, n, m, threads=threads,
                              chunk=chunk, impl=impl)


def solution_probability(system: SparseSystem, p, tolerance: float = 1e-9, *,
                         cap=DEFAULT_VARIABLE_CAP) -> float:
    """Probability that a Bernoulli(p) draw solves the system exactly."""
    n = system.n_cols
    _check_cap(n, cap, "solution probability")
    p = ProbabilityVector.of(p)
    total = 0.0
    for mask in range(1 << n):
        x = [(mask >> j) & 1 for j in range(n)]
        sums = [0.0] * system.n_rows
        for j, col in enumerate(system.columns):
            if x[j]:
                for i, a in col:
                    sums[i] += a
        if all(abs(s - b) <= tolerance for s, b in zip(sums, system.beta)):
            w = 1.0
            for j in range(n):
                w *= p.p[j] if x[j] else 1.0 - p.p[j]
            total += w
    return total
