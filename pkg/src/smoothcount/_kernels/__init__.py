"""Kernel dispatch and deterministic chunked reduction.

The compiled extension is preferred when it imported cleanly; otherwise the
pure-Python mirror is used.  Work is split into fixed-size chunks whose
boundaries depend only on the chunk size, and per-chunk results are combined
in chunk order, so values are identical for any thread count.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _pykernels as pure

try:
    from . import _ckernels as compiled  # type: ignore[attr-defined]
except ImportError:
    compiled = None

DEFAULT_CHUNK = 1 << 14

_NEG_INF = float("-inf")


def active():
    """The backend module used by default."""
    return compiled if compiled is not None else pure


def backends() -> dict:
    out = {"pure": pure}
    if compiled is not None:
        out["compiled"] = compiled
    return out


def colex_unrank(rank: int, k: int, n: int) -> list[int]:
    """Subset of size k at the given colexicographic rank, ascending."""
    out = [0] * k
    r = rank
    for t in range(k, 0, -1):
        v = t - 1
        while v + 1 <= n and math.comb(v + 1, t) <= r:
            v += 1
        out[t - 1] = v
        r -= math.comb(v, t)
    return out


def multiset_unrank(rank: int, k: int, n: int) -> list[int]:
    """Size-k multiset over n symbols at the given colex rank, non-decreasing."""
    c = colex_unrank(rank, k, n + k - 1)
    return [c[t] - t for t in range(k)]


def iter_ksubsets(n: int, k: int, lo: int = 0, hi: int | None = None):
    """Yield k-subsets in colex order for ranks [lo, hi); test and audit aid."""
    if hi is None:
        hi = math.comb(n, k)
    if hi <= lo:
        return
    c = colex_unrank(lo, k, n)
    for _ in range(hi - lo):
        yield tuple(c)
        t = 0
        while True:
            limit = c[t + 1] if t + 1 < k else n
            if t >= k or c[t] + 1 < limit:
                break
            t += 1
        if t >= k:
            return
        c[t] += 1
        for u in range(t):
            c[u] = u


def iter_multisets(n: int, k: int, lo: int = 0, hi: int | None = None):
    """Yield size-k multisets (non-decreasing tuples) in colex rank order."""
    if hi is None:
        hi = math.comb(n + k - 1, k)
    if hi <= lo:
        return
    e = multiset_unrank(lo, k, n)
    for _ in range(hi - lo):
        yield tuple(e)
        t = 0
        while True:
            limit = e[t + 1] if t + 1 < k else n - 1
            if t >= k or e[t] + 1 <= limit:
                break
            t += 1
        if t >= k:
            return
        e[t] += 1
        for u in range(t):
            e[u] = 0


def _chunk_ranges(total: int, chunk: int):
    lo = 0
    while lo < total:
        hi = min(lo + chunk, total)
        yield lo, hi
        lo = hi


def _map_ordered(fn, jobs, threads):
    if threads and threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(fn, jobs))
    return [fn(job) for job in jobs]


def lse_combine(parts):
    """Fold (max, scaled-sum) pairs in order; sum = exp(M) * S."""
    mx, s = _NEG_INF, 0.0
    for m2, s2 in parts:
        if m2 == _NEG_INF:
            continue
        if m2 > mx:
            s = s * math.exp(mx - m2) + s2
            mx = m2
        else:
            s += s2 * math.exp(m2 - mx)
    return mx, s


def pairwise_combine(values, zero=0.0):
    """Fixed-shape pairwise fold, independent of thread count."""
    items = list(values)
    if not items:
        return zero
    while len(items) > 1:
        items = [
            items[i] + items[i + 1] if i + 1 < len(items) else items[i]
            for i in range(0, len(items), 2)
        ]
    return items[0]


def _as_f64(values):
    return np.ascontiguousarray(values, dtype=np.float64)


def subset_band(csc, logx, pen0, k, n, *, threads=1, chunk=DEFAULT_CHUNK, impl=None):
    """(M, S) accumulation of the degree-k coefficient terms, a0-relative."""
    impl = impl or active()
    col_ptr, row_idx, coeff, beta, gamma = csc
    logx = _as_f64(logx)
    total = math.comb(n, k)
    jobs = [
        (np.asarray(colex_unrank(lo, k, n), dtype=np.int64), hi - lo)
        for lo, hi in _chunk_ranges(total, chunk)
    ]

    def run(job):
        start, count = job
        return impl.subset_chunk(col_ptr, row_idx, coeff, beta, gamma,
                                 logx, pen0, start, count, n)

    return lse_combine(_map_ordered(run, jobs, threads))


def composition_band(csc, logx, pen0, k, n, *, threads=1, chunk=DEFAULT_CHUNK, impl=None):
    """(M, S) accumulation over weak compositions of k into n parts."""
    impl = impl or active()
    col_ptr, row_idx, coeff, beta, gamma = csc
    logx = _as_f64(logx)
    total = math.comb(n + k - 1, k) if n > 0 else (1 if k == 0 else 0)
    jobs = [
        (np.asarray(multiset_unrank(lo, k, n), dtype=np.int64), hi - lo)
        for lo, hi in _chunk_ranges(total, chunk)
    ]

    def run(job):
        start, count = job
        return impl.composition_chunk(col_ptr, row_idx, coeff, beta, gamma,
                                      logx, pen0, start, count, n)

    return lse_combine(_map_ordered(run, jobs, threads))


def polynomial_value(csc, z, n, *, threads=1, chunk=DEFAULT_CHUNK, impl=None) -> complex:
    """Full 2^n sum of z^xi * exp(-penalty), pairwise in fixed chunk order."""
    impl = impl or active()
    col_ptr, row_idx, coeff, beta, gamma = csc
    z = np.asarray(z, dtype=np.complex128)
    z_re = _as_f64(z.real)
    z_im = _as_f64(z.imag)
    jobs = list(_chunk_ranges(1 << n, chunk))

    def run(job):
        lo, hi = job
        re, im = impl.brute_p_chunk(col_ptr, row_idx, coeff, beta, gamma,
                                    z_re, z_im, lo, hi, n)
        return complex(re, im)

    return pairwise_combine(_map_ordered(run, jobs, threads), zero=complex(0.0))


def expectation_value(csc, p, n, *, threads=1, chunk=DEFAULT_CHUNK, impl=None) -> float:
    impl = impl or active()
    col_ptr, row_idx, coeff, beta, gamma = csc
    p = _as_f64(p)
    jobs = list(_chunk_ranges(1 << n, chunk))

    def run(job):
        lo, hi = job
        return impl.brute_e_chunk(col_ptr, row_idx, coeff, beta, gamma, p, lo, hi, n)

    return pairwise_combine(_map_ordered(run, jobs, threads))


def solution_count(csc, tol, n, *, threads=1, chunk=DEFAULT_CHUNK, impl=None) -> int:
    impl = impl or active()
    col_ptr, row_idx, coeff, beta, _gamma = csc
    jobs = list(_chunk_ranges(1 << n, chunk))

    def run(job):
        lo, hi = job
        return impl.count_chunk(col_ptr, row_idx, coeff, beta, tol, lo, hi, n)

    return sum(_map_ordered(run, jobs, threads))


def spin_partition(g_matrix, f, n, *, threads=1, chunk=DEFAULT_CHUNK, impl=None):
    """(M, S) accumulation of the 2^n spin sum; sum = exp(M) * S."""
    impl = impl or active()
    g_flat = _as_f64(np.asarray(g_matrix, dtype=np.float64).reshape(-1))
    f = _as_f64(f)
    jobs = list(_chunk_ranges(1 << n, chunk))

    def run(job):
        lo, hi = job
        return impl.spin_chunk(g_flat, f, lo, hi, n)

    return lse_combine(_map_ordered(run, jobs, threads))


def phase_sum(csc, z, n, m, *, threads=1, chunk=DEFAULT_CHUNK, impl=None) -> complex:
    """Sum over sign vectors of prod_j (1 + z_j e^{i <alpha_j, sigma>})."""
    impl = impl or active()
    col_ptr, row_idx, coeff, _beta, _gamma = csc
    z = np.asarray(z, dtype=np.complex128)
    z_re = _as_f64(z.real)
    z_im = _as_f64(z.imag)
    jobs = list(_chunk_ranges(1 << m, chunk))

    def run(job):
        lo, hi = job
        re, im = impl.phase_chunk(col_ptr, row_idx, coeff, z_re, z_im, lo, hi, n, m)
        return complex(re, im)

    return pairwise_combine(_map_ordered(run, jobs, threads), zero=complex(0.0))
