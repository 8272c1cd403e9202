"""Maximum-entropy Bernoulli marginals on the solution polytope.

Maximizing the coordinate-wise entropy H(x) over Ax = b, 0 <= x <= 1 has the
smooth convex dual

    Phi(y) = sum_j softplus((A^T y)_j) - <b, y>,

whose stationary points give p_j = logistic((A^T y)_j) with Ap = b.  A damped
Newton iteration with Armijo backtracking drives the residual below the
requested tolerance.  Since every 0-1 point of the polytope has probability
exp(-H(p)) under p, the count of such points is at most exp(H(p)), and
multiplying by the smoothed expectation sharpens the bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, SolverError
from .evaluator import smoothed_expectation
from .model import ProbabilityVector, SparseSystem

MAX_ITER = 500
RIDGE = 1e-12
ARMIJO_SLOPE = 1e-4
# Marginals this close to {0, 1} (relative to the tolerance) indicate the
# polytope has no relative interior in that coordinate.
BOUNDARY_FACTOR = 10.0


@dataclass(frozen=True)
class MaxEntSolution:
    """Converged maximum-entropy marginals with their dual certificate.

    ``objective_trace`` records the dual objective before each Newton step;
    with backtracking it is nonincreasing.
    """

    p: ProbabilityVector
    dual: tuple[float, ...]
    entropy: float
    residual: float
    objective_trace: tuple[float, ...] = ()


def entropy(x) -> float:
    """Coordinate-wise Bernoulli entropy, with 0 log(1/0) taken as 0."""
    total = 0.0
    for v in x:
        if not (0.0 <= v <= 1.0):
            raise InputError(f"entropy needs coordinates in [0, 1], got {v!r}")
        if 0.0 < v < 1.0:
            total += -v * math.log(v) - (1.0 - v) * math.log(1.0 - v)
    return total


def _softplus(t: np.ndarray) -> np.ndarray:
    return np.logaddexp(0.0, t)


def _logistic(t: np.ndarray) -> np.ndarray:
    out = np.empty_like(t)
    pos = t >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-t[pos]))
    e = np.exp(t[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def solve_maxent(system: SparseSystem, tolerance: float = 1e-8, *,
                 max_iter: int = MAX_ITER) -> MaxEntSolution:
    """Maximize entropy over the solution polytope via the smooth dual.

    ``gamma`` plays no role here; only A and beta do.  Raises
    :class:`SolverError` when the iteration cap is hit without reaching the
    tolerance or when the solution concentrates on the boundary, which is the
    observable signature of a polytope with no relative interior.
    """
    if tolerance <= 0.0:
        raise InputError("tolerance must be positive")
    a = system.to_dense()
    b = np.asarray(system.beta, dtype=np.float64)
    m, n = a.shape

    y = np.zeros(m)
    objective_trace = []

    def phi(yv):
        return float(np.sum(_softplus(a.T @ yv)) - b @ yv)

    pvec = _logistic(a.T @ y)
    for _ in range(max_iter):
        grad = a @ pvec - b
        residual = float(np.abs(grad).max()) if m else 0.0
        if residual <= tolerance:
            break
        w = pvec * (1.0 - pvec)
        hess = (a * w) @ a.T + RIDGE * np.eye(m)
        try:
            step = np.linalg.solve(hess, -grad)
        except np.linalg.LinAlgError:
            step = -grad
        base = phi(y)
        objective_trace.append(base)
        slope = float(grad @ step)
        t = 1.0
        while t > 2.0 ** -60:
            if phi(y + t * step) <= base + ARMIJO_SLOPE * t * slope:
                break
            t *= 0.5
        else:
            raise SolverError(
                "no interior point detected or ill-conditioned (line search stalled)",
                best_p=tuple(np.clip(pvec, 0.0, 1.0)), residual=residual,
            )
        y = y + t * step
        pvec = _logistic(a.T @ y)
    else:
        raise SolverError(
            "no interior point detected or ill-conditioned (iteration cap)",
            best_p=tuple(np.clip(pvec, 0.0, 1.0)), residual=float(np.abs(a @ pvec - b).max()),
        )

    residual = float(np.abs(a @ pvec - b).max()) if m else 0.0
    margin = pvec * (1.0 - pvec)
    if n and float(margin.min()) <= BOUNDARY_FACTOR * tolerance:
        raise SolverError(
            "no interior point detected or ill-conditioned (boundary marginal)",
            best_p=tuple(np.clip(pvec, 0.0, 1.0)), residual=residual,
        )
    p = ProbabilityVector(tuple(float(v) for v in pvec))
    return MaxEntSolution(
        p=p, dual=tuple(float(v) for v in y),
        entropy=entropy(p.p), residual=residual,
        objective_trace=tuple(objective_trace) + (phi(y),),
    )


def count_bound(system: SparseSystem, solution: MaxEntSolution) -> float:
    """exp(H(p)): an upper bound on the number of 0-1 points of the polytope."""
    del system  # the bound depends on the solution only; kept for symmetry
    return math.exp(solution.entropy)


def smoothed_count_bound(system: SparseSystem, solution: MaxEntSolution,
                         epsilon: float, **eval_kwargs) -> float:
    """exp(H(p)) * E exp(-penalty) * (1 + epsilon), a certified count bound.

    The (1 + epsilon) factor absorbs the one-sided estimation error: the
    computed expectation is within exp(epsilon/2) of the truth and
    1 + epsilon >= exp(epsilon/2) on (0, 1).
    """
    result = smoothed_expectation(system, solution.p, epsilon, **eval_kwargs)
    return math.exp(solution.entropy + result.log_value + math.log1p(epsilon))
