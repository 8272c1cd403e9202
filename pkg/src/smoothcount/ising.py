"""Two-way dictionary between smoothed counting and spin systems.

Substituting xi_j = (eta_j + 1)/2 turns the Bernoulli expectation of
exp(-penalty) into a +-1 spin partition function with pairwise interactions

    g_kj = -(1/2) sum_i gamma_i alpha_ik alpha_ij        (k != j)

an external field f, and an explicit constant factor.  The reverse direction
factorizes a given interaction matrix through its largest eigenvalue.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import FactorizationError, InputError, WorkLimitError
from .model import ProbabilityVector, SparseSystem

DEFAULT_SPIN_CAP = 24
JACOBI_TOL = 1e-12
EIGENVALUE_CLAMP = 1e-12


@dataclass(frozen=True)
class IsingModel:
    """Symmetric zero-diagonal interactions g plus external field f."""

    g: tuple[tuple[float, ...], ...]
    f: tuple[float, ...]

    def __post_init__(self):
        n = len(self.f)
        if len(self.g) != n:
            raise InputError(f"g is {len(self.g)} rows for field of length {n}")
        for k, row in enumerate(self.g):
            if len(row) != n:
                raise InputError("g must be square")
            if row[k] != 0.0:
                raise InputError(f"g must have zero diagonal, g[{k}][{k}] = {row[k]!r}")
            for j, v in enumerate(row):
                if not math.isfinite(v):
                    raise InputError("g entries must be finite")
                if self.g[j][k] != v:
                    raise InputError(f"g must be symmetric, mismatch at ({k}, {j})")
        for v in self.f:
            if not math.isfinite(v):
                raise InputError("f entries must be finite")

    @property
    def n(self) -> int:
        return len(self.f)

    @classmethod
    def of(cls, g, f=None) -> "IsingModel":
        g = [list(row) for row in g]
        n = len(g)
        if f is None:
            f = [0.0] * n
        return cls(tuple(tuple(float(v) for v in row) for row in g),
                   tuple(float(v) for v in f))

    @classmethod
    def from_entries(cls, n, g_entries, f=None) -> "IsingModel":
        """Build from sparse (k, j, value) triples, symmetrized automatically."""
        mat = [[0.0] * n for _ in range(n)]
        for triple in g_entries:
            if len(triple) != 3:
                raise InputError(f"g entry must be [k, j, value], got {triple!r}")
            k, j, v = triple
            if not (0 <= k < n and 0 <= j < n):
                raise InputError(f"g entry ({k}, {j}) out of range")
            if k == j:
                raise InputError("diagonal g entries are not allowed")
            v = float(v)
            for a, b in ((k, j), (j, k)):
                if mat[a][b] not in (0.0, v):
                    raise InputError(f"conflicting g entries at ({a}, {b})")
                mat[a][b] = v
        return cls.of(mat, f)

    @cached_property
    def matrix(self) -> np.ndarray:
        return np.array(self.g, dtype=np.float64).reshape(self.n, self.n)


class IsingConversion(NamedTuple):
    model: IsingModel
    log_constant: float


class IsingPartition(NamedTuple):
    log_value: float
    value: float


class LipschitzReport(NamedTuple):
    passed: bool
    delta: float
    column_sums: tuple[float, ...]


class IsingFactorization(NamedTuple):
    system: SparseSystem
    top_eigenvalue: float
    residual: float


def to_ising(system: SparseSystem, p) -> IsingConversion:
    """Interactions, field, and log constant equal to the Bernoulli expectation.

    The identity is E exp(-penalty) = exp(log_constant) * partition(model).
    """
    p = ProbabilityVector.of(p)
    n = system.n_cols
    if len(p) != n:
        raise InputError(f"p has length {len(p)}, expected {n}")
    a = system.to_dense()
    gamma = np.asarray(system.gamma)
    beta = np.asarray(system.beta)
    pv = np.asarray(p.p)

    inter = -0.5 * (a.T * gamma) @ a
    np.fill_diagonal(inter, 0.0)
    shift = -beta + 0.5 * a.sum(axis=1)  # per-row -beta_i + (1/2) sum_j alpha_ij
    field = 0.5 * np.log(pv / (1.0 - pv)) - a.T @ (gamma * shift)
    log_constant = (
        0.5 * float(np.sum(np.log(pv * (1.0 - pv))))
        - float(gamma @ (shift * shift))
        - 0.25 * float(gamma @ (a * a).sum(axis=1))
    )
    return IsingConversion(IsingModel.of(inter.tolist(), field.tolist()), log_constant)


def partition_bruteforce(model: IsingModel, *, cap=DEFAULT_SPIN_CAP, threads=1,
                         chunk=_kernels.DEFAULT_CHUNK, impl=None) -> IsingPartition:
    """Exact spin sum over all 2^n configurations, log-sum-exp accumulated."""
    n = model.n
    if n > cap:
        raise WorkLimitError(
            f"spin sum needs 2^{n} terms, over the cap 2^{cap}",
            required=1 << n, limit=1 << cap,
        )
    mx, s = _kernels.spin_partition(model.matrix, model.f, n, threads=threads,
                                    chunk=chunk, impl=impl)
    log_value = mx + math.log(s)
    try:
        value = math.exp(log_value)
    except OverflowError:
        value = math.inf
    return IsingPartition(log_value, value)


def lipschitz_condition(model: IsingModel, delta: float) -> LipschitzReport:
    """Check every column satisfies sum_{j != k} |g_jk| <= 1 - delta."""
    if not (0.0 < delta < 1.0):
        raise InputError(f"delta must lie in (0, 1), got {delta!r}")
    sums = tuple(float(v) for v in np.abs(model.matrix).sum(axis=0))
    return LipschitzReport(all(s <= 1.0 - delta for s in sums), delta, sums)


def jacobi_eigh(matrix, *, tol=JACOBI_TOL, max_sweeps=100):
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Returns (eigenvalues, eigenvectors) with columns of the second factor the
    eigenvectors, like the numpy convention.  Sweeps stop when the
    off-diagonal Frobenius norm falls below tol (relative to the input norm).
    """
    a = np.array(matrix, dtype=np.float64)
    n = a.shape[0]
    if a.shape != (n, n) or not np.allclose(a, a.T, atol=0.0):
        raise InputError("jacobi_eigh needs an exactly symmetric square matrix")
    v = np.eye(n)
    target = tol * max(1.0, float(np.linalg.norm(a)))
    for _ in range(max_sweeps):
        off = math.sqrt(max(0.0, float((a * a).sum() - (np.diag(a) ** 2).sum())))
        if off <= target:
            break
        for p_ in range(n - 1):
            for q in range(p_ + 1, n):
                apq = a[p_, q]
                if apq == 0.0:
                    continue
                theta = 0.5 * (a[q, q] - a[p_, p_]) / apq
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(1.0, theta))
                c = 1.0 / math.hypot(1.0, t)
                s = t * c
                rot = np.eye(n)
                rot[p_, p_] = c
                rot[q, q] = c
                rot[p_, q] = s
                rot[q, p_] = -s
                a = rot.T @ a @ rot
                a[p_, q] = a[q, p_] = 0.0
                v = v @ rot
    return np.diag(a).copy(), v


def from_ising(g_matrix, *, tolerance=1e-8) -> IsingFactorization:
    """Coefficient matrix A with -(1/2) (A^T A)_kj = g_kj off the diagonal.

    Takes the largest eigenvalue lam of G, factorizes the positive
    semidefinite 2 (lam I - G) as A^T A, and returns the n x n system with
    unit weights and zero right-hand sides.  The off-diagonal reconstruction
    residual must stay within ``tolerance``.
    """
    model_matrix = np.array(g_matrix, dtype=np.float64)
    n = model_matrix.shape[0]
    if model_matrix.shape != (n, n):
        raise InputError("g must be square")
    if not np.allclose(model_matrix, model_matrix.T, atol=0.0):
        raise InputError("g must be exactly symmetric")
    if any(model_matrix[i, i] != 0.0 for i in range(n)):
        raise InputError("g must have zero diagonal")

    if n == 0:
        system = SparseSystem.from_entries(0, 0, [], [], [])
        return IsingFactorization(system, 0.0, 0.0)

    eigvals, eigvecs = jacobi_eigh(model_matrix)
    lam = float(eigvals.max())
    weights = 2.0 * (lam - eigvals)
    weights[np.abs(weights) <= EIGENVALUE_CLAMP] = 0.0
    if weights.min() < 0.0:
        raise FactorizationError(
            f"factor weights came out negative ({weights.min():.3e})",
            residual=float(-weights.min()),
        )
    a = np.sqrt(weights)[:, None] * eigvecs.T
    gram = a.T @ a
    recon = -0.5 * gram
    np.fill_diagonal(recon, 0.0)
    residual = float(np.abs(recon - model_matrix).max())
    if residual > tolerance:
        raise FactorizationError(
            f"off-diagonal reconstruction residual {residual:.3e} exceeds {tolerance:g}",
            residual=residual,
        )
    entries = [
        (i, j, float(a[i, j])) for i in range(n) for j in range(n) if a[i, j] != 0.0
    ]
    system = SparseSystem.from_entries(n, n, entries, (0.0,) * n, (1.0,) * n)
    return IsingFactorization(system, lam, residual)


def field_thresholds(g_matrix, rho) -> tuple[float, ...]:
    """Per-spin real-part bounds (1/2) ln rho_j + sum_k g_kj.

    For fields with real parts strictly below these values the partition
    function of the factorized system stays nonzero; reported as a formula,
    verified only by small brute-force spot checks.
    """
    g = np.array(g_matrix, dtype=np.float64)
    n = g.shape[0]
    rho = tuple(float(r) for r in rho)
    if len(rho) != n:
        raise InputError(f"rho has length {len(rho)}, expected {n}")
    for r in rho:
        if not (0.0 < r < 1.0):
            raise InputError("rho entries must lie in (0, 1)")
    col_sums = g.sum(axis=0)
    return tuple(0.5 * math.log(rho[j]) + float(col_sums[j]) for j in range(n))
