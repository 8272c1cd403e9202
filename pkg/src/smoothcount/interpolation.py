"""Truncated series evaluation of the counting polynomial.

For g(z) = P(z x_1, ..., z x_n) the coefficients a_k / a_0 are accumulated by
direct enumeration (k-subsets for 0-1 variables, weak compositions for the
geometric extension), converted to the series of ln g when needed, and summed
at z = 1.  When g is zero-free in |z| < 1/(1-delta) the truncation error of
the log series after N terms is at most

    tail(N) = n (1-delta)^(N+1) / ((N+1) delta),

so choosing the smallest N with tail(N) <= epsilon/2 makes exp(result) a
relative-epsilon approximation (ln(1+eps) >= eps/2 on (0,1)).  Since g has
degree n, N never needs to exceed n: with all n coefficients known the value
is summed directly and the truncation error is zero.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import CertificationError, InputError, WorkLimitError
from .model import SparseSystem
from .zerofree import check_polydisc

DEFAULT_WORK_LIMIT = 1_000_000_000


@dataclass(frozen=True)
class CoefficientSeries:
    """Leading Taylor data of g at 0: ln a_0 and a_k / a_0 for k = 1..degree."""

    log_a0: float
    normalized: tuple[float, ...]
    degree: int

    def __post_init__(self):
        if not math.isfinite(self.log_a0):
            raise InputError("log a0 must be finite")
        if len(self.normalized) != self.degree:
            raise InputError("normalized length must equal degree")
        for v in self.normalized:
            if not (math.isfinite(v) and v >= 0.0):
                raise InputError(f"normalized coefficients must be finite and >= 0, got {v!r}")


def base_penalty(system: SparseSystem) -> float:
    """Penalty of the all-zero vector, sum_i gamma_i beta_i^2."""
    return sum(g * b * b for g, b in zip(system.gamma, system.beta))


def tail_bound(n: int, delta: float, degree: int) -> float:
    """A-priori bound on the dropped log-series tail beyond ``degree``."""
    return n * (1.0 - delta) ** (degree + 1) / ((degree + 1) * delta)


def _validate_degree_args(n, delta, epsilon):
    if n < 0:
        raise InputError("n must be nonnegative")
    if not (0.0 < delta < 1.0):
        raise InputError(f"delta must lie in (0, 1), got {delta!r}")
    if not (0.0 < epsilon < 1.0):
        raise InputError(f"epsilon must lie in (0, 1), got {epsilon!r}")


def _uncapped_degree(n, delta, epsilon):
    target = epsilon / 2.0
    if n == 0 or tail_bound(n, delta, 0) <= target:
        return 0
    hi = 1
    while tail_bound(n, delta, hi) > target:
        hi *= 2
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if tail_bound(n, delta, mid) > target:
            lo = mid
        else:
            hi = mid
    return hi


def required_degree(n: int, delta: float, epsilon: float) -> int:
    """Smallest truncation degree with tail <= epsilon/2, capped at n."""
    _validate_degree_args(n, delta, epsilon)
    return min(_uncapped_degree(n, delta, epsilon), n)


def required_degree_series(n: int, delta: float, epsilon: float) -> int:
    """Uncapped variant for the geometric extension (g is not a polynomial)."""
    _validate_degree_args(n, delta, epsilon)
    return _uncapped_degree(n, delta, epsilon)


def subset_cost(n: int, degree: int) -> int:
    """Exact number of enumerated 0-1 terms for coefficients 1..degree."""
    return sum(math.comb(n, k) for k in range(1, degree + 1))


def composition_cost(n: int, degree: int) -> int:
    """Exact number of enumerated composition terms for coefficients 1..degree."""
    return sum(math.comb(n + k - 1, k) for k in range(1, degree + 1))


def _coefficient(mx, s):
    if mx == float("-inf"):
        return 0.0
    try:
        value = math.exp(mx) * s
    except OverflowError:
        value = math.inf
    if not math.isfinite(value):
        raise InputError(
            "coefficient overflowed double precision; rescale gamma or p"
        )
    return value


def taylor_coefficients(system: SparseSystem, x, N: int, *, threads=1,
                        chunk=_kernels.DEFAULT_CHUNK,
                        work_limit=DEFAULT_WORK_LIMIT, impl=None) -> CoefficientSeries:
    """Coefficients of g(z) = P(z x) by colex enumeration of k-subsets.

    Terms are accumulated in log space with a running maximum per
    coefficient, so exp(-penalty) factors far below double-precision range
    cannot silently vanish.
    """
    n = system.n_cols
    x = tuple(float(v) for v in x)
    if len(x) != n:
        raise InputError(f"x has length {len(x)}, expected {n}")
    for v in x:
        if not (math.isfinite(v) and v > 0.0):
            raise InputError(f"x entries must be positive and finite, got {v!r}")
    if N > n:
        raise InputError(f"N={N} exceeds the number of variables n={n}")
    cost = subset_cost(n, N)
    if cost > work_limit:
        raise WorkLimitError(
            f"enumeration needs {cost} terms, over the work limit {work_limit}",
            required=cost, limit=work_limit,
        )
    pen0 = base_penalty(system)
    logx = np.log(np.asarray(x, dtype=np.float64)) if n else np.zeros(0)
    out = []
    for k in range(1, N + 1):
        mx, s = _kernels.subset_band(system.csc, logx, pen0, k, n,
                                     threads=threads, chunk=chunk, impl=impl)
        out.append(_coefficient(mx, s))
    return CoefficientSeries(log_a0=-pen0, normalized=tuple(out), degree=N)


def taylor_coefficients_geometric(system: SparseSystem, x, N: int, *, threads=1,
                                  chunk=_kernels.DEFAULT_CHUNK,
                                  work_limit=DEFAULT_WORK_LIMIT,
                                  impl=None) -> CoefficientSeries:
    """Like :func:`taylor_coefficients` with nonnegative-integer exponents.

    The exponent vectors of total degree k are the weak compositions of k
    into n parts, enumerated as size-k multisets of column indices.
    Requires 0 < x_j < 1 so the underlying series converges.
    """
    n = system.n_cols
    x = tuple(float(v) for v in x)
    if len(x) != n:
        raise InputError(f"x has length {len(x)}, expected {n}")
    for v in x:
        if not (0.0 < v < 1.0):
            raise InputError(f"geometric evaluation needs 0 < x < 1, got {v!r}")
    cost = composition_cost(n, N)
    if cost > work_limit:
        raise WorkLimitError(
            f"enumeration needs {cost} terms, over the work limit {work_limit}",
            required=cost, limit=work_limit,
        )
    pen0 = base_penalty(system)
    logx = np.log(np.asarray(x, dtype=np.float64)) if n else np.zeros(0)
    out = []
    for k in range(1, N + 1):
        if n == 0:
            out.append(0.0)
            continue
        mx, s = _kernels.composition_band(system.csc, logx, pen0, k, n,
                                          threads=threads, chunk=chunk, impl=impl)
        out.append(_coefficient(mx, s))
    return CoefficientSeries(log_a0=-pen0, normalized=tuple(out), degree=N)


def log_taylor(series: CoefficientSeries) -> tuple[float, ...]:
    """Coefficients b_1..b_N of ln g(z) - ln g(0) from the normalized series.

    Uses the convolution identity k c_k = sum_{j<=k} j b_j c_{k-j} with
    c_0 = 1, solved for b_k in increasing k.
    """
    c = (1.0,) + series.normalized
    b: list[float] = []
    for k in range(1, series.degree + 1):
        acc = 0.0
        for j in range(1, k):
            acc += j * b[j - 1] * c[k - j]
        b.append(c[k] - acc / k)
    return tuple(b)


def exp_series(b) -> tuple[float, ...]:
    """Inverse of :func:`log_taylor`: normalized coefficients of exp(sum b_k z^k)."""
    b = tuple(b)
    c = [1.0]
    for k in range(1, len(b) + 1):
        acc = 0.0
        for j in range(1, k + 1):
            acc += j * b[j - 1] * c[k - j]
        c.append(acc / k)
    return tuple(c[1:])


def log_sum_series(series: CoefficientSeries) -> float:
    """ln(sum_{k=0..N} c_k) over the nonnegative normalized coefficients."""
    values = (1.0,) + series.normalized
    mx = max(values)
    return math.log(mx) + math.log(math.fsum(v / mx for v in values))


def evaluate_g1(system: SparseSystem, x, delta: float, epsilon: float, *,
                force=False, threads=1, chunk=_kernels.DEFAULT_CHUNK,
                work_limit=DEFAULT_WORK_LIMIT, impl=None):
    """Approximate ln P(x) through the series of g(z) = P(z x) at z = 1.

    Verifies the polydisc certificate at rho = x / (1 - delta) first and
    refuses to proceed on failure unless ``force`` is set.  Returns
    (log_value, degree, tail) where tail bounds |log_value - ln P(x)|
    whenever the certificate held; tail is 0 when all n coefficients were
    enumerated, because the sum is then exact.
    """
    n = system.n_cols
    _validate_degree_args(n, delta, epsilon)
    x = tuple(float(v) for v in x)
    cert = check_polydisc(system, tuple(v / (1.0 - delta) for v in x), delta=delta) \
        if n else None
    if n and not cert.passed and not force:
        raise CertificationError(
            f"zero-free certificate failed at delta={delta}: {cert.describe()}",
            report=cert,
        )
    N = required_degree(n, delta, epsilon)
    series = taylor_coefficients(system, x, N, threads=threads, chunk=chunk,
                                 work_limit=work_limit, impl=impl)
    if N == n:
        return series.log_a0 + log_sum_series(series), N, 0.0
    log_value = series.log_a0 + math.fsum(log_taylor(series))
    return log_value, N, tail_bound(n, delta, N)
