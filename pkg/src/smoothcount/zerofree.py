"""Zero-free polydisc certificates and weight maximization.

A certificate proves that the counting polynomial of a system has no zeros in
the open polydisc |z_j| < rho_j.  The sufficient condition checked here is

    lambda_j = rho_j * exp(sum_i gamma_i beta_i alpha_ij) < 1   for all j,
    sqrt(gamma_i) * sum_j |alpha_ij| lambda_j / (1 - lambda_j)
        <= 1 / (2 sqrt(c))                                      for all i,

where c is the maximum number of nonzeros per column.  Weak inequalities are
accepted (margin 0 passes); callers that need strict slack can inspect the
reported margin.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import InputError
from .model import SparseSystem, column_max_nonzeros

BISECT_TOL = 1e-9
BISECT_MAX_ITER = 200


@dataclass(frozen=True)
class PolydiscViolation:
    kind: str  # "lambda" or "row"
    index: int
    value: float
    bound: float

    def describe(self) -> str:
        if self.kind == "lambda":
            return f"lambda[{self.index}] = {self.value:.6g} >= 1"
        return f"row {self.index}: {self.value:.6g} > bound {self.bound:.6g}"


@dataclass(frozen=True)
class Certificate:
    """A validated zero-free polydisc for a specific system."""

    rho: tuple[float, ...]
    lam: tuple[float, ...]
    delta: float | None
    margin: float
    c: int

    @property
    def passed(self) -> bool:
        return True


@dataclass(frozen=True)
class PolydiscFailure:
    """Every violated constraint of a failed polydisc check."""

    violations: tuple[PolydiscViolation, ...]
    lam: tuple[float, ...]
    c: int

    @property
    def passed(self) -> bool:
        return False

    def describe(self) -> str:
        return "; ".join(v.describe() for v in self.violations)


def _lambda_vector(system: SparseSystem, rho) -> list[float]:
    lam = []
    for j, col in enumerate(system.columns):
        expo = 0.0
        for i, a in col:
            expo += system.gamma[i] * system.beta[i] * a
        lam.append(rho[j] * math.exp(expo) if expo < 700.0 else math.inf)
    return lam


def check_polydisc(system: SparseSystem, rho, delta=None):
    """Check the polydisc condition at radii rho.

    Returns a :class:`Certificate` on success and a :class:`PolydiscFailure`
    listing every violated constraint otherwise.  The optional ``delta``
    records the margin parameter the radii were derived from.
    """
    rho = tuple(float(r) for r in rho)
    if len(rho) != system.n_cols:
        raise InputError(f"rho has length {len(rho)}, expected {system.n_cols}")
    for r in rho:
        if not (math.isfinite(r) and r > 0.0):
            raise InputError(f"rho entries must be positive and finite, got {r!r}")

    c = column_max_nonzeros(system)
    bound = 1.0 / (2.0 * math.sqrt(max(c, 1)))
    lam = _lambda_vector(system, rho)

    violations = [
        PolydiscViolation("lambda", j, lj, 1.0) for j, lj in enumerate(lam) if lj >= 1.0
    ]
    margin = math.inf
    if not violations:
        row_val = [0.0] * system.n_rows
        for j, col in enumerate(system.columns):
            factor = lam[j] / (1.0 - lam[j])
            for i, a in col:
                row_val[i] += factor * abs(a)
        for i in range(system.n_rows):
            value = math.sqrt(system.gamma[i]) * row_val[i]
            if value > bound:
                violations.append(PolydiscViolation("row", i, value, bound))
            else:
                margin = min(margin, bound - value)
        for lj in lam:
            margin = min(margin, 1.0 - lj)

    if violations:
        return PolydiscFailure(tuple(violations), tuple(lam), c)
    return Certificate(rho, tuple(lam), delta, margin, c)


def max_delta(system: SparseSystem, x, *, tol=BISECT_TOL, max_iter=BISECT_MAX_ITER):
    """Largest margin delta such that rho_j = x_j / (1 - delta) is certified.

    Returns None when the check fails even in the limit delta -> 0.  The
    returned value always passed the check itself; the pass region is an
    interval (0, delta*] because every constraint is monotone in delta.
    """
    x = tuple(float(v) for v in x)
    if len(x) != system.n_cols:
        raise InputError(f"x has length {len(x)}, expected {system.n_cols}")
    for v in x:
        if not (math.isfinite(v) and v > 0.0):
            raise InputError(f"x entries must be positive and finite, got {v!r}")
    if system.n_cols == 0:
        return 1.0 - tol

    def passes(d):
        return check_polydisc(system, tuple(v / (1.0 - d) for v in x), delta=d).passed

    if not passes(0.0):
        return None
    hi = 1.0 - 1e-15
    if passes(hi):
        return hi
    lo = 0.0
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if passes(mid):
            lo = mid
        else:
            hi = mid
    return lo


class MatchingGamma(NamedTuple):
    gamma: float
    target_gamma: float
    target_admissible: bool


class SparseGamma(NamedTuple):
    gamma: tuple[float, ...]
    column_sums: tuple[float, ...]
    condition_ok: bool


def _bisect_largest(ok, *, tol=BISECT_TOL, max_iter=BISECT_MAX_ITER):
    """Largest t >= 0 with ok(t), for ok true on an interval [0, t*]."""
    if not ok(0.0):
        return 0.0
    hi = 1.0
    while ok(hi):
        hi *= 2.0
        if hi > 1e6:
            return hi
    lo = 0.0
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def max_gamma_uniform(k, delta, degree) -> float:
    """Largest admissible uniform weight for k-uniform degree-regular systems.

    Works on t = gamma * k and returns gamma = t* / k, where t* is the largest
    t with exp(t) * (1 + 2 * degree * sqrt(t)) <= (1 - delta) * (degree - 1);
    for infinite degree the limiting form exp(t) * 2 sqrt(t) <= 1 - delta is
    used.  Returns 0.0 when no positive weight is admissible.
    """
    if not isinstance(k, int) or k < 1:
        raise InputError(f"k must be a positive integer, got {k!r}")
    if not (0.0 < delta < 1.0):
        raise InputError(f"delta must lie in (0, 1), got {delta!r}")
    if degree != math.inf and (not isinstance(degree, int) or degree < 3):
        raise InputError(f"degree must be an integer >= 3 or infinity, got {degree!r}")

    if degree == math.inf:
        def ok(t):
            return math.exp(t) * 2.0 * math.sqrt(t) <= 1.0 - delta
    else:
        rhs = (1.0 - delta) * (degree - 1)

        def ok(t):
            return math.exp(t) * (1.0 + 2.0 * degree * math.sqrt(t)) <= rhs

    return _bisect_largest(ok) / k


def max_gamma_matching(k, degree, omega, delta) -> MatchingGamma:
    """Largest admissible weight for the reduced-probability matching regime.

    The constraint pair is lambda = omega * exp(gamma k) / ((1-delta)(degree-1)) < 1
    and lambda / (1 - lambda) <= 1 / (2 * degree * sqrt(gamma k)).  Also reports
    whether the natural target gamma = ln(1/omega) / k satisfies both.
    """
    if not isinstance(k, int) or k < 1:
        raise InputError(f"k must be a positive integer, got {k!r}")
    if not isinstance(degree, int) or degree < 3:
        raise InputError(f"degree must be an integer >= 3, got {degree!r}")
    if not (0.0 < omega <= 1.0):
        raise InputError(f"omega must lie in (0, 1], got {omega!r}")
    if not (0.0 < delta < 1.0):
        raise InputError(f"delta must lie in (0, 1), got {delta!r}")

    denom = (1.0 - delta) * (degree - 1)

    def ok(t):
        lam = omega * math.exp(t) / denom
        if lam >= 1.0:
            return False
        if t == 0.0:
            return True
        return lam / (1.0 - lam) <= 1.0 / (2.0 * degree * math.sqrt(t))

    t_star = _bisect_largest(ok)
    t_target = -math.log(omega)
    return MatchingGamma(
        gamma=t_star / k,
        target_gamma=t_target / k,
        target_admissible=ok(t_target),
    )


def suggest_gamma_sparse(system: SparseSystem) -> SparseGamma:
    """Per-row weights 1 / (c * r_i) for matrices with entries in [-1, 1].

    Also evaluates the induced pairwise-interaction column sums
    sum_{k != j} |g_jk| and reports whether they all stay within 1/2, which
    the weight choice guarantees mathematically; the check is a numerical
    confirmation on the concrete instance.
    """
    for j, col in enumerate(system.columns):
        for _i, a in col:
            if abs(a) > 1.0:
                raise InputError(f"|alpha| must be <= 1 for this rule (column {j} has {a})")
    c = max(column_max_nonzeros(system), 1)
    gamma = tuple(
        1.0 / (c * r) if r > 0 else 1.0 for r in system.row_nonzeros
    )

    n = system.n_cols
    sums = [0.0] * n
    # accumulate |g_jk| = |(1/2) sum_i gamma_i a_ik a_ij| via dense pair loop
    rows: list[list[tuple[int, float]]] = [[] for _ in range(system.n_rows)]
    for j, col in enumerate(system.columns):
        for i, a in col:
            rows[i].append((j, a))
    pair: dict[tuple[int, int], float] = {}
    for i, row in enumerate(rows):
        for jj in range(len(row)):
            for kk in range(jj + 1, len(row)):
                j1, a1 = row[jj]
                j2, a2 = row[kk]
                pair[(j1, j2)] = pair.get((j1, j2), 0.0) + 0.5 * gamma[i] * a1 * a2
    for (j1, j2), g in pair.items():
        sums[j1] += abs(g)
        sums[j2] += abs(g)
    ok = all(s <= 0.5 + 1e-9 for s in sums)
    return SparseGamma(gamma=gamma, column_sums=tuple(sums), condition_ok=ok)
