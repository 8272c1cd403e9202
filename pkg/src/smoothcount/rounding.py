"""Derandomized rounding by the method of conditional expectations.

Variables are fixed one at a time toward the branch with the larger
conditional smoothed expectation.  Each branch value is computed within
relative error epsilon / n^2, which keeps the final witness within a (1 -
epsilon) factor of the unconditioned expectation: per step the kept branch is
at least exp(-epsilon/n^2) times the best one, and there are n steps.
"""
from __future__ import annotations

import math
from typing import NamedTuple

from .errors import CertificationError, InputError
from .evaluator import conditional_expectation, smoothed_expectation
from .model import PartialAssignment, ProbabilityVector, SparseSystem, penalty


class RoundingResult(NamedTuple):
    x0: tuple[int, ...]
    achieved: float
    reference: float
    log_achieved: float
    log_reference: float


def tail_bound(gamma_min: float, epsilon: float, rho: float) -> float:
    """Bound exp(-gamma rho) / (1 - epsilon) on beating the witness by rho.

    If the witness satisfies exp(-gamma f(x0)) >= (1-eps) E exp(-gamma f),
    then a random draw outperforms f(x0) by more than rho with probability at
    most this value.
    """
    if rho <= 0.0:
        raise InputError(f"rho must be positive, got {rho!r}")
    if not (0.0 < epsilon < 1.0):
        raise InputError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    if gamma_min <= 0.0:
        raise InputError(f"gamma must be positive, got {gamma_min!r}")
    return math.exp(-gamma_min * rho) / (1.0 - epsilon)


def derandomize(system: SparseSystem, p, epsilon: float, *, order=None,
                **eval_kwargs) -> RoundingResult:
    """Greedy witness x0 with exp(-penalty(x0)) >= (1-epsilon) E exp(-penalty).

    Variables are processed in ascending index order unless ``order`` gives a
    permutation.  Certification is re-established by every conditional
    evaluation; when it fails mid-run the error carries the partial
    assignment reached.  Ties within the combined error budget go to 0 for
    determinism.
    """
    if not (0.0 < epsilon < 1.0):
        raise InputError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    p = ProbabilityVector.of(p)
    n = system.n_cols
    if order is None:
        order = range(n)
    order = [int(j) for j in order]
    if sorted(order) != list(range(n)):
        raise InputError("order must be a permutation of all column indices")

    reference = smoothed_expectation(system, p, epsilon, **eval_kwargs)
    step_eps = epsilon / max(n * n, 1)
    fixed: dict[int, int] = {}
    for j in order:
        branches = {}
        for bit in (0, 1):
            try:
                branches[bit] = conditional_expectation(
                    system, p, {**fixed, j: bit}, step_eps, **eval_kwargs,
                )
            except CertificationError as err:
                err.partial_assignment = PartialAssignment.of({**fixed, j: bit})
                raise
        gap = branches[1].log_value - branches[0].log_value
        fixed[j] = 1 if gap > step_eps else 0

    x0 = tuple(fixed[j] for j in range(n))
    log_achieved = -penalty(system, x0)
    return RoundingResult(
        x0=x0,
        achieved=math.exp(log_achieved),
        reference=reference.value,
        log_achieved=log_achieved,
        log_reference=reference.log_value,
    )
