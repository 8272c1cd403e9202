"""Smoothed expectations for Bernoulli and geometric variable models.

The expectation E exp(-penalty) factors as prod_j (1 - p_j) times the
counting polynomial evaluated at x_j = p_j / (1 - p_j); the geometric
extension evaluates the corresponding series at x_j = p_j directly.  Results
are kept in log space throughout; the linear value may underflow to 0 when
exponentiated, the log never does.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from . import _kernels, interpolation
from .errors import CertificationError, InputError
from .interpolation import DEFAULT_WORK_LIMIT
from .model import (PartialAssignment, ProbabilityVector, SparseSystem,
                    free_indices, restrict)
from .zerofree import check_polydisc, max_delta

# Margin subtracted from the bisection optimum so the certificate is re-verified
# strictly inside the feasible interval.
DELTA_SAFETY = 1e-6
# Fallback margin parameter for forced, uncertified evaluations.
FORCED_DELTA = 0.5


@dataclass(frozen=True)
class EvaluationResult:
    """A computed smoothed expectation with its accuracy metadata.

    ``certified`` means the zero-free certificate held, so exp(log_value)
    approximates the true expectation within relative ``epsilon``.
    ``assumption`` names any analytic assumption the certificate leans on
    (the geometric series reuses the 0-1 polydisc radii).
    """

    log_value: float
    epsilon: float
    delta: float
    degree: int
    tail_bound: float
    certified: bool
    assumption: str | None = None

    @property
    def value(self) -> float:
        try:
            return math.exp(self.log_value)
        except OverflowError:
            return math.inf


def _resolve_delta(system, x, delta, force, cap=None):
    """Pick the margin parameter and whether the result counts as certified."""
    if delta is not None:
        if not (0.0 < delta < 1.0):
            raise InputError(f"delta must lie in (0, 1), got {delta!r}")
        cert = check_polydisc(system, tuple(v / (1.0 - delta) for v in x), delta=delta)
        if not cert.passed and not force:
            raise CertificationError(
                f"zero-free certificate failed at delta={delta}: {cert.describe()}",
                report=cert,
            )
        return delta, cert.passed
    best = max_delta(system, x)
    if best is not None and cap is not None:
        best = min(best, cap)
    if best is None or best <= DELTA_SAFETY:
        if not force:
            probe = check_polydisc(system, x, delta=0.0)
            detail = probe.describe() if not probe.passed else "margin below safety"
            raise CertificationError(
                f"no admissible delta: {detail}", report=probe if not probe.passed else None,
            )
        return FORCED_DELTA if cap is None else min(FORCED_DELTA, cap), False
    return best - DELTA_SAFETY, True


def smoothed_expectation(system: SparseSystem, p, epsilon: float, *,
                         delta: float | None = None, force: bool = False,
                         threads: int = 1, chunk: int = _kernels.DEFAULT_CHUNK,
                         work_limit: int = DEFAULT_WORK_LIMIT,
                         impl=None) -> EvaluationResult:
    """E exp(-penalty) for independent Bernoulli variables with parameters p.

    The margin parameter delta is auto-selected as the bisection optimum
    minus a small safety margin unless given explicitly.  Raises
    :class:`CertificationError` with the binding constraint when the
    zero-free condition fails, unless ``force`` is set, in which case the
    truncated series is computed anyway and flagged uncertified.
    """
    if not (0.0 < epsilon < 1.0):
        raise InputError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    p = ProbabilityVector.of(p)
    n = system.n_cols
    if len(p) != n:
        raise InputError(f"p has length {len(p)}, expected {n}")
    if n == 0:
        return EvaluationResult(
            log_value=-interpolation.base_penalty(system), epsilon=epsilon,
            delta=1.0 - DELTA_SAFETY, degree=0, tail_bound=0.0, certified=True,
        )
    x = p.evaluation_points
    use_delta, certified = _resolve_delta(system, x, delta, force)
    log_g1, degree, tail = interpolation.evaluate_g1(
        system, x, use_delta, epsilon, force=True,
        threads=threads, chunk=chunk, work_limit=work_limit, impl=impl,
    )
    log_value = math.fsum(math.log1p(-v) for v in p.p) + log_g1
    return EvaluationResult(
        log_value=log_value, epsilon=epsilon, delta=use_delta, degree=degree,
        tail_bound=tail, certified=certified,
    )


def conditional_expectation(system: SparseSystem, p, assignment, epsilon: float,
                            **kwargs) -> EvaluationResult:
    """E[exp(-penalty) | fixed coordinates], not scaled by their probability.

    Fixing variables reduces to a plain smoothed expectation on the
    restricted system with the free probabilities.
    """
    assignment = PartialAssignment.of(assignment)
    p = ProbabilityVector.of(p)
    if len(p) != system.n_cols:
        raise InputError(f"p has length {len(p)}, expected {system.n_cols}")
    reduced = restrict(system, assignment)
    p_free = p.subset(free_indices(system.n_cols, assignment))
    return smoothed_expectation(reduced, p_free, epsilon, **kwargs)


def smoothed_expectation_geometric(system: SparseSystem, p, epsilon: float, *,
                                   delta: float | None = None, force: bool = False,
                                   threads: int = 1,
                                   chunk: int = _kernels.DEFAULT_CHUNK,
                                   work_limit: int = DEFAULT_WORK_LIMIT,
                                   impl=None) -> EvaluationResult:
    """E exp(-penalty) for independent geometric variables, P(xi_j = k) ~ p_j^k.

    The series evaluation point is p itself and the radii must additionally
    stay below 1 so the series converges.  Certified evaluations follow the
    log-series route whose truncation the reported tail bound describes; the
    bound reuses the 0-1 formula, which is flagged as an assumption in the
    result.  Forced, uncertified evaluations sum the nonnegative coefficient
    series directly instead (the log series need not converge without the
    certificate) and extend the degree until the last band is negligible.
    """
    if not (0.0 < epsilon < 1.0):
        raise InputError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    p = ProbabilityVector.of(p)
    n = system.n_cols
    if len(p) != n:
        raise InputError(f"p has length {len(p)}, expected {n}")
    if n == 0:
        return EvaluationResult(
            log_value=-interpolation.base_penalty(system), epsilon=epsilon,
            delta=1.0 - DELTA_SAFETY, degree=0, tail_bound=0.0, certified=True,
            assumption="series-radii",
        )
    x = p.p
    # rho_j = x_j / (1 - delta) must stay below 1: cap delta at 1 - max x
    cap = 1.0 - max(x) - 1e-12
    if cap <= 0.0:
        cap = None
    use_delta, certified = _resolve_delta(system, x, delta, force, cap=cap)
    degree = interpolation.required_degree_series(n, use_delta, epsilon)
    kwargs = dict(threads=threads, chunk=chunk, work_limit=work_limit, impl=impl)
    if certified:
        series = interpolation.taylor_coefficients_geometric(system, x, degree, **kwargs)
        log_g1 = series.log_a0 + math.fsum(interpolation.log_taylor(series))
    else:
        degree = max(degree, 8)
        series = interpolation.taylor_coefficients_geometric(system, x, degree, **kwargs)
        partial = math.fsum((1.0,) + series.normalized)
        while series.normalized[-1] > 0.25 * epsilon * partial:
            degree += 4
            series = interpolation.taylor_coefficients_geometric(system, x, degree, **kwargs)
            partial = math.fsum((1.0,) + series.normalized)
        log_g1 = series.log_a0 + interpolation.log_sum_series(series)
    log_value = math.fsum(math.log1p(-v) for v in p.p) + log_g1
    return EvaluationResult(
        log_value=log_value, epsilon=epsilon, delta=use_delta, degree=degree,
        tail_bound=interpolation.tail_bound(n, use_delta, degree),
        certified=certified, assumption="series-radii",
    )
