"""Pure-Python fallback kernels.

Each function mirrors a routine in ``_ckernels.pyx`` operation for operation:
the same enumeration order, the same incremental updates, the same
accumulation scheme.  Chunk state is rebuilt from scratch at every chunk
start, so rounding drift from incremental updates is bounded by the chunk
length and results depend only on chunk boundaries, never on thread count.
"""
from __future__ import annotations

import math

_NEG_INF = float("-inf")

AVAILABLE = True
NAME = "pure"


def _col_lists(col_ptr, row_idx, coeff):
    col_ptr = [int(v) for v in col_ptr]
    row_idx = [int(v) for v in row_idx]
    coeff = [float(v) for v in coeff]
    return col_ptr, row_idx, coeff


def _lse_push(mx, s, term):
    # running-max log-sum-exp accumulation of one term
    if term > mx:
        return term, s * math.exp(mx - term) + 1.0
    return mx, s + math.exp(term - mx)


def subset_chunk(col_ptr, row_idx, coeff, beta, gamma, logx, pen0, start, count, n):
    """Accumulate exp-weights over ``count`` k-subsets in colex order.

    ``start`` is the first subset (ascending element list).  Returns the
    running-max pair (M, S) with sum = exp(M) * S.
    """
    cp, ri, cf = _col_lists(col_ptr, row_idx, coeff)
    beta = [float(v) for v in beta]
    gamma = [float(v) for v in gamma]
    logx = [float(v) for v in logx]
    c = [int(v) for v in start]
    k = len(c)
    m = len(beta)

    sums = [0.0] * m
    pen = sum(g * b * b for g, b in zip(gamma, beta))
    logw = 0.0

    def add(j, sign):
        nonlocal pen, logw
        for e in range(cp[j], cp[j + 1]):
            i = ri[e]
            a = cf[e] if sign > 0 else -cf[e]
            d = sums[i] - beta[i]
            pen += gamma[i] * ((d + a) * (d + a) - d * d)
            sums[i] += a
        logw += logx[j] if sign > 0 else -logx[j]

    for j in c:
        add(j, +1)

    mx, s = _NEG_INF, 0.0
    left = int(count)
    while True:
        mx, s = _lse_push(mx, s, logw + pen0 - pen)
        left -= 1
        if left == 0:
            break
        # colex successor: bump the lowest element with headroom, reset below
        t = 0
        while True:
            limit = c[t + 1] if t + 1 < k else n
            if c[t] + 1 < limit:
                break
            t += 1
        for u in range(t + 1):
            add(c[u], -1)
        c[t] += 1
        for u in range(t):
            c[u] = u
        for u in range(t + 1):
            add(c[u], +1)
    return mx, s


def composition_chunk(col_ptr, row_idx, coeff, beta, gamma, logx, pen0, start, count, n):
    """Like ``subset_chunk`` but over size-k multisets (weak compositions)."""
    cp, ri, cf = _col_lists(col_ptr, row_idx, coeff)
    beta = [float(v) for v in beta]
    gamma = [float(v) for v in gamma]
    logx = [float(v) for v in logx]
    e_ = [int(v) for v in start]
    k = len(e_)
    m = len(beta)

    sums = [0.0] * m
    pen = sum(g * b * b for g, b in zip(gamma, beta))
    logw = 0.0

    def add(j, sign):
        nonlocal pen, logw
        for e in range(cp[j], cp[j + 1]):
            i = ri[e]
            a = cf[e] if sign > 0 else -cf[e]
            d = sums[i] - beta[i]
            pen += gamma[i] * ((d + a) * (d + a) - d * d)
            sums[i] += a
        logw += logx[j] if sign > 0 else -logx[j]

    for j in e_:
        add(j, +1)

    mx, s = _NEG_INF, 0.0
    left = int(count)
    while True:
        mx, s = _lse_push(mx, s, logw + pen0 - pen)
        left -= 1
        if left == 0:
            break
        # multiset successor: elements are non-decreasing, repeats allowed
        t = 0
        while True:
            limit = e_[t + 1] if t + 1 < k else n - 1
            if e_[t] + 1 <= limit:
                break
            t += 1
        for u in range(t + 1):
            add(e_[u], -1)
        e_[t] += 1
        for u in range(t):
            e_[u] = 0
        for u in range(t + 1):
            add(e_[u], +1)
    return mx, s


def _penalty_of_mask(mask, n, cp, ri, cf, beta, gamma, sums):
    for i in range(len(beta)):
        sums[i] = 0.0
    for j in range(n):
        if (mask >> j) & 1:
            for e in range(cp[j], cp[j + 1]):
                sums[ri[e]] += cf[e]
    pen = 0.0
    for i in range(len(beta)):
        d = sums[i] - beta[i]
        pen += gamma[i] * d * d
    return pen


def brute_p_chunk(col_ptr, row_idx, coeff, beta, gamma, z_re, z_im, lo, hi, n):
    """Pairwise-sum z^xi * exp(-penalty(xi)) over bitmask range [lo, hi)."""
    cp, ri, cf = _col_lists(col_ptr, row_idx, coeff)
    beta = [float(v) for v in beta]
    gamma = [float(v) for v in gamma]
    z_re = [float(v) for v in z_re]
    z_im = [float(v) for v in z_im]
    sums = [0.0] * len(beta)

    def term(mask):
        pr, pi = 1.0, 0.0
        for j in range(n):
            if (mask >> j) & 1:
                pr, pi = pr * z_re[j] - pi * z_im[j], pr * z_im[j] + pi * z_re[j]
        w = math.exp(-_penalty_of_mask(mask, n, cp, ri, cf, beta, gamma, sums))
        return pr * w, pi * w

    def pair(a, b):
        if b - a <= 128:
            re = im = 0.0
            for mask in range(a, b):
                tr, ti = term(mask)
                re += tr
                im += ti
            return re, im
        mid = (a + b) // 2
        r1, i1 = pair(a, mid)
        r2, i2 = pair(mid, b)
        return r1 + r2, i1 + i2

    return pair(int(lo), int(hi))


def brute_e_chunk(col_ptr, row_idx, coeff, beta, gamma, p, lo, hi, n):
    """Pairwise-sum Bernoulli(mask) * exp(-penalty(mask)) over [lo, hi)."""
    cp, ri, cf = _col_lists(col_ptr, row_idx, coeff)
    beta = [float(v) for v in beta]
    gamma = [float(v) for v in gamma]
    p = [float(v) for v in p]
    sums = [0.0] * len(beta)

    def term(mask):
        w = 1.0
        for j in range(n):
            w *= p[j] if (mask >> j) & 1 else 1.0 - p[j]
        return w * math.exp(-_penalty_of_mask(mask, n, cp, ri, cf, beta, gamma, sums))

    def pair(a, b):
        if b - a <= 128:
            return sum(term(mask) for mask in range(a, b))
        mid = (a + b) // 2
        return pair(a, mid) + pair(mid, b)

    return pair(int(lo), int(hi))


def count_chunk(col_ptr, row_idx, coeff, beta, tol, lo, hi, n):
    """Count masks whose row sums all match beta within tol."""
    cp, ri, cf = _col_lists(col_ptr, row_idx, coeff)
    beta = [float(v) for v in beta]
    m = len(beta)
    sums = [0.0] * m
    tol = float(tol)
    cnt = 0
    for mask in range(int(lo), int(hi)):
        for i in range(m):
            sums[i] = 0.0
        for j in range(n):
            if (mask >> j) & 1:
                for e in range(cp[j], cp[j + 1]):
                    sums[ri[e]] += cf[e]
        ok = True
        for i in range(m):
            if abs(sums[i] - beta[i]) > tol:
                ok = False
                break
        if ok:
            cnt += 1
    return cnt


def spin_chunk(g_flat, f, lo, hi, n):
    """Log-sum-exp over spin configurations indexed by Gray code rank.

    ``g_flat`` is the dense n*n interaction matrix in row-major order.
    Configuration r has spins eta_j = +1 where bit j of gray(r) is set.
    """
    g = [float(v) for v in g_flat]
    f = [float(v) for v in f]
    lo, hi = int(lo), int(hi)

    mask = lo ^ (lo >> 1)
    eta = [1.0 if (mask >> j) & 1 else -1.0 for j in range(n)]
    sums = [0.0] * n
    for j in range(n):
        acc = 0.0
        for kk in range(n):
            if kk != j:
                acc += g[j * n + kk] * eta[kk]
        sums[j] = acc
    energy = 0.0
    for j in range(n):
        energy += 0.5 * eta[j] * sums[j] + f[j] * eta[j]

    mx, s = _NEG_INF, 0.0
    for r in range(lo, hi):
        mx, s = _lse_push(mx, s, energy)
        nxt = r + 1
        if nxt == hi:
            break
        # gray(r) and gray(r+1) differ in the lowest set bit of r+1
        b = (nxt & -nxt).bit_length() - 1
        energy -= 2.0 * eta[b] * (sums[b] + f[b])
        for kk in range(n):
            if kk != b:
                sums[kk] -= 2.0 * g[kk * n + b] * eta[b]
        eta[b] = -eta[b]
    return mx, s


def phase_chunk(col_ptr, row_idx, coeff, z_re, z_im, lo, hi, n, m):
    """Pairwise-sum prod_j (1 + z_j * e^{i <alpha_j, sigma>}) over sign vectors."""
    cp, ri, cf = _col_lists(col_ptr, row_idx, coeff)
    z_re = [float(v) for v in z_re]
    z_im = [float(v) for v in z_im]

    def term(mask):
        pr, pi = 1.0, 0.0
        for j in range(n):
            phase = 0.0
            for e in range(cp[j], cp[j + 1]):
                i = ri[e]
                phase += cf[e] if (mask >> i) & 1 else -cf[e]
            fr = 1.0 + z_re[j] * math.cos(phase) - z_im[j] * math.sin(phase)
            fi = z_re[j] * math.sin(phase) + z_im[j] * math.cos(phase)
            pr, pi = pr * fr - pi * fi, pr * fi + pi * fr
        return pr, pi

    def pair(a, b):
        if b - a <= 128:
            re = im = 0.0
            for mask in range(a, b):
                tr, ti = term(mask)
                re += tr
                im += ti
            return re, im
        mid = (a + b) // 2
        r1, i1 = pair(a, mid)
        r2, i2 = pair(mid, b)
        return r1 + r2, i1 + i2

    return pair(int(lo), int(hi))
