"""Weighted linear systems over 0-1 variables.

The central object is a sparse m x n matrix A stored column-major together
with right-hand sides beta and positive equation weights gamma.  A 0-1 vector
x is scored by the penalty sum_i gamma_i * (l_i(x) - beta_i)^2 where
l_i(x) = sum_j alpha_ij x_j; exact solutions have penalty 0 and near-solutions
are damped exponentially when the penalty is exponentiated.

All types are immutable after construction and all operations are pure
functions, so values can be shared freely across threads.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InputError

Entry = tuple[int, float]


def _as_float(value, what):
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise InputError(f"{what} is not a number: {value!r}") from None
    if not math.isfinite(out):
        raise InputError(f"{what} must be finite, got {out!r}")
    return out


@dataclass(frozen=True)
class SparseSystem:
    """Sparse column-major system (A, beta, gamma).

    ``columns[j]`` lists the nonzero entries of column j as (row, coefficient)
    pairs with strictly increasing row indices.  Stored coefficients are never
    zero, so structural sparsity (the per-column nonzero count) is exact.
    """

    n_rows: int
    n_cols: int
    columns: tuple[tuple[Entry, ...], ...]
    beta: tuple[float, ...]
    gamma: tuple[float, ...]

    def __post_init__(self):
        if self.n_rows < 0 or self.n_cols < 0:
            raise InputError("matrix dimensions must be nonnegative")
        if len(self.columns) != self.n_cols:
            raise InputError(f"expected {self.n_cols} columns, got {len(self.columns)}")
        if len(self.beta) != self.n_rows:
            raise InputError(f"beta has length {len(self.beta)}, expected {self.n_rows}")
        if len(self.gamma) != self.n_rows:
            raise InputError(f"gamma has length {len(self.gamma)}, expected {self.n_rows}")
        for b in self.beta:
            if not math.isfinite(b):
                raise InputError("beta entries must be finite")
        for g in self.gamma:
            if not (math.isfinite(g) and g > 0.0):
                raise InputError(f"every gamma must be positive and finite, got {g!r}")
        for j, col in enumerate(self.columns):
            prev = -1
            for i, a in col:
                if not (0 <= i < self.n_rows):
                    raise InputError(f"row index {i} out of range in column {j}")
                if i <= prev:
                    raise InputError(f"row indices must be strictly increasing in column {j}")
                if a == 0.0 or not math.isfinite(a):
                    raise InputError(f"stored coefficients must be finite and nonzero (column {j})")
                prev = i

    @classmethod
    def from_entries(cls, n_rows, n_cols, entries, beta, gamma):
        """Build from (row, col, coefficient) triples; exact zeros are dropped."""
        cols: list[list[Entry]] = [[] for _ in range(n_cols)]
        seen = set()
        for triple in entries:
            if len(triple) != 3:
                raise InputError(f"entry must be [row, col, coefficient], got {triple!r}")
            i, j, a = triple
            if not (isinstance(i, int) and isinstance(j, int)):
                raise InputError(f"entry indices must be integers, got {triple!r}")
            if not (0 <= i < n_rows) or not (0 <= j < n_cols):
                raise InputError(f"entry ({i}, {j}) out of range for {n_rows}x{n_cols} matrix")
            if (i, j) in seen:
                raise InputError(f"duplicate entry at ({i}, {j})")
            seen.add((i, j))
            a = _as_float(a, f"coefficient at ({i}, {j})")
            if a != 0.0:
                cols[j].append((i, a))
        for col in cols:
            col.sort()
        return cls(
            n_rows=n_rows,
            n_cols=n_cols,
            columns=tuple(tuple(col) for col in cols),
            beta=tuple(_as_float(b, "beta entry") for b in beta),
            gamma=tuple(_as_float(g, "gamma entry") for g in gamma),
        )

    @classmethod
    def from_dense(cls, rows, beta, gamma):
        """Build from a dense row-major matrix (nested sequences)."""
        rows = [list(r) for r in rows]
        m = len(rows)
        n = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != n:
                raise InputError("ragged dense matrix")
        entries = [
            (i, j, float(rows[i][j]))
            for i in range(m)
            for j in range(n)
            if float(rows[i][j]) != 0.0
        ]
        return cls.from_entries(m, n, entries, beta, gamma)

    @cached_property
    def column_nonzeros(self) -> tuple[int, ...]:
        return tuple(len(col) for col in self.columns)

    @cached_property
    def row_nonzeros(self) -> tuple[int, ...]:
        counts = [0] * self.n_rows
        for col in self.columns:
            for i, _ in col:
                counts[i] += 1
        return tuple(counts)

    @cached_property
    def csc(self):
        """Flat CSC arrays (col_ptr, row_idx, coeff, beta, gamma) for kernels."""
        nnz = sum(len(col) for col in self.columns)
        col_ptr = np.zeros(self.n_cols + 1, dtype=np.int64)
        row_idx = np.zeros(nnz, dtype=np.int64)
        coeff = np.zeros(nnz, dtype=np.float64)
        pos = 0
        for j, col in enumerate(self.columns):
            for i, a in col:
                row_idx[pos] = i
                coeff[pos] = a
                pos += 1
            col_ptr[j + 1] = pos
        beta = np.asarray(self.beta, dtype=np.float64)
        gamma = np.asarray(self.gamma, dtype=np.float64)
        return col_ptr, row_idx, coeff, beta, gamma

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.n_rows, self.n_cols))
        for j, col in enumerate(self.columns):
            for i, a in col:
                out[i, j] = a
        return out

    def entry_list(self) -> list[tuple[int, int, float]]:
        return [(i, j, a) for j, col in enumerate(self.columns) for i, a in col]


@dataclass(frozen=True)
class ProbabilityVector:
    """Independent Bernoulli parameters, strictly inside (0, 1)."""

    p: tuple[float, ...]

    def __post_init__(self):
        for v in self.p:
            if not (math.isfinite(v) and 0.0 < v < 1.0):
                raise InputError(f"probabilities must lie strictly in (0, 1), got {v!r}")

    def __len__(self):
        return len(self.p)

    @classmethod
    def of(cls, values) -> "ProbabilityVector":
        if isinstance(values, ProbabilityVector):
            return values
        return cls(tuple(float(v) for v in values))

    @classmethod
    def uniform(cls, value, n) -> "ProbabilityVector":
        return cls((float(value),) * n)

    @cached_property
    def evaluation_points(self) -> tuple[float, ...]:
        """Points x_j = p_j / (1 - p_j), always finite and positive."""
        return tuple(v / (1.0 - v) for v in self.p)

    def subset(self, indices) -> "ProbabilityVector":
        return ProbabilityVector(tuple(self.p[j] for j in indices))


@dataclass(frozen=True)
class PartialAssignment:
    """A set of fixings xi_j = 0 or xi_j = 1, keyed by column index."""

    fixed: tuple[tuple[int, int], ...]

    def __post_init__(self):
        seen = set()
        for j, bit in self.fixed:
            if not isinstance(j, int) or j < 0:
                raise InputError(f"assignment index must be a nonnegative integer, got {j!r}")
            if bit not in (0, 1):
                raise InputError(f"assignment value must be 0 or 1, got {bit!r}")
            if j in seen:
                raise InputError(f"duplicate assignment for index {j}")
            seen.add(j)

    @classmethod
    def of(cls, fixings) -> "PartialAssignment":
        if isinstance(fixings, PartialAssignment):
            return fixings
        if isinstance(fixings, Mapping):
            items = fixings.items()
        else:
            items = fixings
        return cls(tuple(sorted((int(j), int(b)) for j, b in items)))

    def as_dict(self) -> dict[int, int]:
        return dict(self.fixed)

    def __len__(self):
        return len(self.fixed)


def column_max_nonzeros(system: SparseSystem) -> int:
    """Maximum number of nonzero rows over all columns (0 for an empty matrix)."""
    return max(system.column_nonzeros, default=0)


def penalty(system: SparseSystem, x: Sequence[int]) -> float:
    """Weighted squared violation sum of a 0-1 vector; 0 exactly on solutions."""
    if len(x) != system.n_cols:
        raise InputError(f"x has length {len(x)}, expected {system.n_cols}")
    for v in x:
        if v not in (0, 1):
            raise InputError(f"x entries must be 0 or 1, got {v!r}")
    sums = [0.0] * system.n_rows
    for j, col in enumerate(system.columns):
        if x[j]:
            for i, a in col:
                sums[i] += a
    return sum(g * (s - b) ** 2 for g, s, b in zip(system.gamma, sums, system.beta))


def free_indices(n_cols: int, assignment: PartialAssignment) -> list[int]:
    fixed = assignment.as_dict()
    return [j for j in range(n_cols) if j not in fixed]


def restrict(system: SparseSystem, assignment) -> SparseSystem:
    """Fix a subset of variables and eliminate their columns.

    Fixing xi_j = 1 subtracts column j from beta; fixing xi_j = 0 leaves beta
    unchanged.  Remaining columns keep their original relative order, and rows
    are kept even when they become all-zero (they still contribute the
    constant factor exp(-gamma_i * beta_i^2) to the smoothed expectation).
    """
    assignment = PartialAssignment.of(assignment)
    fixed = assignment.as_dict()
    for j in fixed:
        if j >= system.n_cols:
            raise InputError(f"assignment index {j} out of range for n={system.n_cols}")
    beta = list(system.beta)
    for j, bit in fixed.items():
        if bit:
            for i, a in system.columns[j]:
                beta[i] -= a
    kept = [system.columns[j] for j in range(system.n_cols) if j not in fixed]
    return SparseSystem(
        n_rows=system.n_rows,
        n_cols=len(kept),
        columns=tuple(kept),
        beta=tuple(beta),
        gamma=system.gamma,
    )
