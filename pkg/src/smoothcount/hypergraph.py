"""Hypergraph front-ends for smoothed matching counts.

The incidence system has one equation per vertex requiring its covering
count to equal 1, so 0-1 solutions are exactly the perfect matchings.  For
k-uniform degree-regular hypergraphs the natural edge probability is
1/degree (expected cover count 1 per vertex) and the admissible uniform
weight comes from the zerofree module.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import InputError
from .model import ProbabilityVector, SparseSystem
from .zerofree import MatchingGamma, max_gamma_matching, max_gamma_uniform

# Margin parameter used when deriving automatic weights; reported in results.
DEFAULT_AUTO_DELTA = 1e-3


@dataclass(frozen=True)
class Hypergraph:
    """Vertex count plus edges given as tuples of vertex indices."""

    n_vertices: int
    edges: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n_vertices < 0:
            raise InputError("vertex count must be nonnegative")
        for idx, edge in enumerate(self.edges):
            if len(edge) == 0:
                raise InputError(f"edge {idx} is empty")
            if len(set(edge)) != len(edge):
                raise InputError(f"edge {idx} repeats a vertex")
            for v in edge:
                if not (isinstance(v, int) and 0 <= v < self.n_vertices):
                    raise InputError(f"edge {idx} has out-of-range vertex {v!r}")

    @classmethod
    def of(cls, n_vertices, edges) -> "Hypergraph":
        return cls(int(n_vertices), tuple(tuple(int(v) for v in e) for e in edges))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def vertex_degrees(self) -> tuple[int, ...]:
        deg = [0] * self.n_vertices
        for edge in self.edges:
            for v in edge:
                deg[v] += 1
        return tuple(deg)


@dataclass(frozen=True)
class UniformityReport:
    """Outcome of the k-uniform degree-regular check."""

    ok: bool
    k: int | None
    degree: int | None
    violation: str | None

    def __iter__(self):
        # allow "k, degree = validate_uniform_regular(H)" on success
        yield self.k
        yield self.degree


def validate_uniform_regular(hypergraph: Hypergraph) -> UniformityReport:
    """Check all edges share one size k and all vertices one degree."""
    if hypergraph.n_edges == 0:
        return UniformityReport(False, None, None, "hypergraph has no edges")
    k = len(hypergraph.edges[0])
    for idx, edge in enumerate(hypergraph.edges):
        if len(edge) != k:
            return UniformityReport(
                False, None, None, f"edge {idx} has size {len(edge)}, expected {k}")
    degrees = hypergraph.vertex_degrees()
    degree = degrees[0] if degrees else 0
    for v, d in enumerate(degrees):
        if d != degree:
            return UniformityReport(
                False, None, None, f"vertex {v} has degree {d}, expected {degree}")
    return UniformityReport(True, k, degree, None)


def incidence_system(hypergraph: Hypergraph, gamma) -> SparseSystem:
    """The vertex-cover-once system: alpha[v, e] = 1 iff v in edge e, beta = 1.

    ``gamma`` may be a scalar (applied to every vertex) or a per-vertex
    sequence.  No regularity is required here.
    """
    m = hypergraph.n_vertices
    n = hypergraph.n_edges
    if isinstance(gamma, (int, float)):
        gamma = (float(gamma),) * m
    entries = [
        (v, e, 1.0) for e, edge in enumerate(hypergraph.edges) for v in edge
    ]
    return SparseSystem.from_entries(m, n, entries, (1.0,) * m, tuple(gamma))


class PerfectMatchingInstance(NamedTuple):
    system: SparseSystem
    p: ProbabilityVector
    k: int
    degree: int
    gamma: float
    delta: float


class MatchingInstance(NamedTuple):
    system: SparseSystem
    p: ProbabilityVector
    k: int
    degree: int
    gamma: float
    delta: float
    omega: float
    target_gamma: float
    target_admissible: bool


def _require_uniform_regular(hypergraph):
    report = validate_uniform_regular(hypergraph)
    if not report.ok:
        raise InputError(f"hypergraph is not uniform and regular: {report.violation}")
    if report.degree < 3:
        raise InputError(f"vertex degree must be >= 3, got {report.degree}")
    return report.k, report.degree


def perfect_matching_instance(hypergraph: Hypergraph, gamma: float | None = None,
                              *, delta: float = DEFAULT_AUTO_DELTA) -> PerfectMatchingInstance:
    """Smoothed perfect-matching instance with edge probability 1/degree.

    When ``gamma`` is omitted the largest weight admissible at margin
    ``delta`` for this (k, degree) pair is used.
    """
    k, degree = _require_uniform_regular(hypergraph)
    if gamma is None:
        gamma = max_gamma_uniform(k, delta, degree)
    if gamma <= 0.0:
        raise InputError(f"gamma must be positive, got {gamma!r}")
    system = incidence_system(hypergraph, gamma)
    p = ProbabilityVector.uniform(1.0 / degree, hypergraph.n_edges)
    return PerfectMatchingInstance(system, p, k, degree, float(gamma), delta)


def matching_instance(hypergraph: Hypergraph, omega: float,
                      gamma: float | None = None, *,
                      delta: float = DEFAULT_AUTO_DELTA) -> MatchingInstance:
    """Matching-regime instance with reduced edge probability omega/degree.

    With ``gamma`` omitted, uses the smaller of the natural target
    ln(1/omega)/k and the largest weight the admissibility conditions allow;
    the result reports whether the target itself was admissible.
    """
    if not (0.0 < omega <= 1.0):
        raise InputError(f"omega must lie in (0, 1], got {omega!r}")
    k, degree = _require_uniform_regular(hypergraph)
    report: MatchingGamma = max_gamma_matching(k, degree, omega, delta)
    if gamma is None:
        gamma = report.gamma if report.target_gamma == 0.0 else min(
            report.target_gamma, report.gamma)
        if gamma <= 0.0:
            raise InputError(
                f"no positive admissible gamma for omega={omega}, degree={degree}")
    system = incidence_system(hypergraph, gamma)
    p = ProbabilityVector.uniform(omega / degree, hypergraph.n_edges)
    return MatchingInstance(system, p, k, degree, float(gamma), delta, float(omega),
                            report.target_gamma, report.target_admissible)


def coverage_penalty(hypergraph: Hypergraph, selected) -> int:
    """sum_v (cover_count(v) - 1)^2 for an edge subset; 0 iff perfect matching."""
    selected = list(selected)
    for e in selected:
        if not (isinstance(e, int) and 0 <= e < hypergraph.n_edges):
            raise InputError(f"edge index {e!r} out of range")
    if len(set(selected)) != len(selected):
        raise InputError("edge subset repeats an index")
    cover = [0] * hypergraph.n_vertices
    for e in selected:
        for v in hypergraph.edges[e]:
            cover[v] += 1
    return sum((c - 1) ** 2 for c in cover)


def complete_graph(n: int) -> Hypergraph:
    """All 2-element subsets of n vertices, in lexicographic order."""
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)]
    return Hypergraph.of(n, edges)


def fano_plane() -> Hypergraph:
    """The 7-point, 7-line triple system; 3-uniform and 3-regular."""
    lines = [
        (0, 1, 2), (0, 3, 4), (0, 5, 6),
        (1, 3, 5), (1, 4, 6), (2, 3, 6), (2, 4, 5),
    ]
    return Hypergraph.of(7, lines)
