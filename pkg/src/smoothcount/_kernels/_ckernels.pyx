# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels.

Operation-for-operation mirror of ``_pykernels``: identical enumeration
order, identical incremental updates, identical accumulation.  Keep the two
files in sync; the equivalence tests compare them term by term.
"""
from libc.math cimport exp, cos, sin, fabs
from libc.stdlib cimport malloc, free

cimport numpy as cnp

AVAILABLE = True
NAME = "compiled"

cdef double NEG_INF = float("-inf")


cdef inline void _lse(double* mx, double* s, double term) nogil:
    if term > mx[0]:
        s[0] = s[0] * exp(mx[0] - term) + 1.0
        mx[0] = term
    else:
        s[0] += exp(term - mx[0])


cdef inline void _touch_col(Py_ssize_t j, double sign,
                            const cnp.int64_t* cp, const cnp.int64_t* ri,
                            const double* cf, const double* beta,
                            const double* gamma, const double* logx,
                            double* sums, double* pen, double* logw) nogil:
    cdef Py_ssize_t e, i
    cdef double a, d
    for e in range(cp[j], cp[j + 1]):
        i = ri[e]
        a = sign * cf[e]
        d = sums[i] - beta[i]
        pen[0] += gamma[i] * ((d + a) * (d + a) - d * d)
        sums[i] += a
    logw[0] += sign * logx[j]


def subset_chunk(const cnp.int64_t[::1] col_ptr, const cnp.int64_t[::1] row_idx,
                 const double[::1] coeff, const double[::1] beta,
                 const double[::1] gamma, const double[::1] logx,
                 double pen0, const cnp.int64_t[::1] start,
                 long long count, long long n):
    cdef Py_ssize_t k = start.shape[0]
    cdef Py_ssize_t m = beta.shape[0]
    cdef cnp.int64_t* c = <cnp.int64_t*> malloc((k if k else 1) * sizeof(cnp.int64_t))
    cdef double* sums = <double*> malloc((m if m else 1) * sizeof(double))
    if c == NULL or sums == NULL:
        free(c); free(sums)
        raise MemoryError()
    cdef const cnp.int64_t* cp = &col_ptr[0] if col_ptr.shape[0] else NULL
    cdef const cnp.int64_t* ri = &row_idx[0] if row_idx.shape[0] else cp
    cdef const double* cf = &coeff[0] if coeff.shape[0] else NULL
    cdef const double* bt = &beta[0] if m else NULL
    cdef const double* gm = &gamma[0] if m else NULL
    cdef const double* lx = &logx[0] if logx.shape[0] else NULL
    cdef double pen = 0.0, logw = 0.0, mx = NEG_INF, s = 0.0
    cdef long long left = count
    cdef Py_ssize_t i, t, u
    cdef cnp.int64_t limit
    with nogil:
        for i in range(m):
            sums[i] = 0.0
            pen += gm[i] * bt[i] * bt[i]
        for i in range(k):
            c[i] = start[i]
        for i in range(k):
            _touch_col(c[i], 1.0, cp, ri, cf, bt, gm, lx, sums, &pen, &logw)
        while True:
            _lse(&mx, &s, logw + pen0 - pen)
            left -= 1
            if left == 0:
                break
            t = 0
            while True:
                limit = c[t + 1] if t + 1 < k else n
                if c[t] + 1 < limit:
                    break
                t += 1
            for u in range(t + 1):
                _touch_col(c[u], -1.0, cp, ri, cf, bt, gm, lx, sums, &pen, &logw)
            c[t] += 1
            for u in range(t):
                c[u] = u
            for u in range(t + 1):
                _touch_col(c[u], 1.0, cp, ri, cf, bt, gm, lx, sums, &pen, &logw)
    free(c)
    free(sums)
    return mx, s


def composition_chunk(const cnp.int64_t[::1] col_ptr, const cnp.int64_t[::1] row_idx,
                      const double[::1] coeff, const double[::1] beta,
                      const double[::1] gamma, const double[::1] logx,
                      double pen0, const cnp.int64_t[::1] start,
                      long long count, long long n):
    cdef Py_ssize_t k = start.shape[0]
    cdef Py_ssize_t m = beta.shape[0]
    cdef cnp.int64_t* e_ = <cnp.int64_t*> malloc((k if k else 1) * sizeof(cnp.int64_t))
    cdef double* sums = <double*> malloc((m if m else 1) * sizeof(double))
    if e_ == NULL or sums == NULL:
        free(e_); free(sums)
        raise MemoryError()
    cdef const cnp.int64_t* cp = &col_ptr[0] if col_ptr.shape[0] else NULL
    cdef const cnp.int64_t* ri = &row_idx[0] if row_idx.shape[0] else cp
    cdef const double* cf = &coeff[0] if coeff.shape[0] else NULL
    cdef const double* bt = &beta[0] if m else NULL
    cdef const double* gm = &gamma[0] if m else NULL
    cdef const double* lx = &logx[0] if logx.shape[0] else NULL
    cdef double pen = 0.0, logw = 0.0, mx = NEG_INF, s = 0.0
    cdef long long left = count
    cdef Py_ssize_t i, t, u
    cdef cnp.int64_t limit
    with nogil:
        for i in range(m):
            sums[i] = 0.0
            pen += gm[i] * bt[i] * bt[i]
        for i in range(k):
            e_[i] = start[i]
        for i in range(k):
            _touch_col(e_[i], 1.0, cp, ri, cf, bt, gm, lx, sums, &pen, &logw)
        while True:
            _lse(&mx, &s, logw + pen0 - pen)
            left -= 1
            if left == 0:
                break
            t = 0
            while True:
                limit = e_[t + 1] if t + 1 < k else n - 1
                if e_[t] + 1 <= limit:
                    break
                t += 1
            for u in range(t + 1):
                _touch_col(e_[u], -1.0, cp, ri, cf, bt, gm, lx, sums, &pen, &logw)
            e_[t] += 1
            for u in range(t):
                e_[u] = 0
            for u in range(t + 1):
                _touch_col(e_[u], 1.0, cp, ri, cf, bt, gm, lx, sums, &pen, &logw)
    free(e_)
    free(sums)
    return mx, s


cdef double _penalty_of_mask(long long mask, Py_ssize_t n, Py_ssize_t m,
                             const cnp.int64_t* cp, const cnp.int64_t* ri,
                             const double* cf, const double* beta,
                             const double* gamma, double* sums) nogil:
    cdef Py_ssize_t i, j, e
    cdef double pen = 0.0, d
    for i in range(m):
        sums[i] = 0.0
    for j in range(n):
        if (mask >> j) & 1:
            for e in range(cp[j], cp[j + 1]):
                sums[ri[e]] += cf[e]
    for i in range(m):
        d = sums[i] - beta[i]
        pen += gamma[i] * d * d
    return pen


cdef void _pair_p(long long a, long long b, Py_ssize_t n, Py_ssize_t m,
                  const cnp.int64_t* cp, const cnp.int64_t* ri, const double* cf,
                  const double* beta, const double* gamma,
                  const double* zre, const double* zim,
                  double* sums, double* out_re, double* out_im) nogil:
    cdef long long mask, mid
    cdef Py_ssize_t j
    cdef double re = 0.0, im = 0.0, pr, pi, npr, w
    cdef double r1, i1, r2, i2
    if b - a <= 128:
        for mask in range(a, b):
            pr = 1.0
            pi = 0.0
            for j in range(n):
                if (mask >> j) & 1:
                    npr = pr * zre[j] - pi * zim[j]
                    pi = pr * zim[j] + pi * zre[j]
                    pr = npr
            w = exp(-_penalty_of_mask(mask, n, m, cp, ri, cf, beta, gamma, sums))
            re += pr * w
            im += pi * w
        out_re[0] = re
        out_im[0] = im
        return
    mid = (a + b) // 2
    _pair_p(a, mid, n, m, cp, ri, cf, beta, gamma, zre, zim, sums, &r1, &i1)
    _pair_p(mid, b, n, m, cp, ri, cf, beta, gamma, zre, zim, sums, &r2, &i2)
    out_re[0] = r1 + r2
    out_im[0] = i1 + i2


def brute_p_chunk(const cnp.int64_t[::1] col_ptr, const cnp.int64_t[::1] row_idx,
                  const double[::1] coeff, const double[::1] beta,
                  const double[::1] gamma, const double[::1] z_re,
                  const double[::1] z_im, long long lo, long long hi, long long n):
    cdef Py_ssize_t m = beta.shape[0]
    cdef double* sums = <double*> malloc((m if m else 1) * sizeof(double))
    if sums == NULL:
        raise MemoryError()
    cdef const cnp.int64_t* cp = &col_ptr[0] if col_ptr.shape[0] else NULL
    cdef const cnp.int64_t* ri = &row_idx[0] if row_idx.shape[0] else cp
    cdef const double* cf = &coeff[0] if coeff.shape[0] else NULL
    cdef const double* bt = &beta[0] if m else NULL
    cdef const double* gm = &gamma[0] if m else NULL
    cdef const double* zr = &z_re[0] if z_re.shape[0] else NULL
    cdef const double* zi = &z_im[0] if z_im.shape[0] else NULL
    cdef double re = 0.0, im = 0.0
    with nogil:
        _pair_p(lo, hi, n, m, cp, ri, cf, bt, gm, zr, zi, sums, &re, &im)
    free(sums)
    return re, im


cdef double _pair_e(long long a, long long b, Py_ssize_t n, Py_ssize_t m,
                    const cnp.int64_t* cp, const cnp.int64_t* ri, const double* cf,
                    const double* beta, const double* gamma, const double* p,
                    double* sums) nogil:
    cdef long long mask, mid
    cdef Py_ssize_t j
    cdef double acc = 0.0, w
    if b - a <= 128:
        for mask in range(a, b):
            w = 1.0
            for j in range(n):
                if (mask >> j) & 1:
                    w *= p[j]
                else:
                    w *= 1.0 - p[j]
            acc += w * exp(-_penalty_of_mask(mask, n, m, cp, ri, cf, beta, gamma, sums))
        return acc
    mid = (a + b) // 2
    return (_pair_e(a, mid, n, m, cp, ri, cf, beta, gamma, p, sums)
            + _pair_e(mid, b, n, m, cp, ri, cf, beta, gamma, p, sums))


def brute_e_chunk(const cnp.int64_t[::1] col_ptr, const cnp.int64_t[::1] row_idx,
                  const double[::1] coeff, const double[::1] beta,
                  const double[::1] gamma, const double[::1] p,
                  long long lo, long long hi, long long n):
    cdef Py_ssize_t m = beta.shape[0]
    cdef double* sums = <double*> malloc((m if m else 1) * sizeof(double))
    if sums == NULL:
        raise MemoryError()
    cdef const cnp.int64_t* cp = &col_ptr[0] if col_ptr.shape[0] else NULL
    cdef const cnp.int64_t* ri = &row_idx[0] if row_idx.shape[0] else cp
    cdef const double* cf = &coeff[0] if coeff.shape[0] else NULL
    cdef const double* bt = &beta[0] if m else NULL
    cdef const double* gm = &gamma[0] if m else NULL
    cdef const double* pp = &p[0] if p.shape[0] else NULL
    cdef double acc
    with nogil:
        acc = _pair_e(lo, hi, n, m, cp, ri, cf, bt, gm, pp, sums)
    free(sums)
    return acc


def count_chunk(const cnp.int64_t[::1] col_ptr, const cnp.int64_t[::1] row_idx,
                const double[::1] coeff, const double[::1] beta,
                double tol, long long lo, long long hi, long long n):
    cdef Py_ssize_t m = beta.shape[0]
    cdef double* sums = <double*> malloc((m if m else 1) * sizeof(double))
    if sums == NULL:
        raise MemoryError()
    cdef const cnp.int64_t* cp = &col_ptr[0] if col_ptr.shape[0] else NULL
    cdef const cnp.int64_t* ri = &row_idx[0] if row_idx.shape[0] else cp
    cdef const double* cf = &coeff[0] if coeff.shape[0] else NULL
    cdef const double* bt = &beta[0] if m else NULL
    cdef long long mask, cnt = 0
    cdef Py_ssize_t i, j, e
    cdef bint ok
    with nogil:
        for mask in range(lo, hi):
            for i in range(m):
                sums[i] = 0.0
            for j in range(n):
                if (mask >> j) & 1:
                    for e in range(cp[j], cp[j + 1]):
                        sums[ri[e]] += cf[e]
            ok = True
            for i in range(m):
                if fabs(sums[i] - bt[i]) > tol:
                    ok = False
                    break
            if ok:
                cnt += 1
    free(sums)
    return cnt


def spin_chunk(const double[::1] g_flat, const double[::1] f,
               long long lo, long long hi, long long n):
    cdef double* eta = <double*> malloc((n if n else 1) * sizeof(double))
    cdef double* sums = <double*> malloc((n if n else 1) * sizeof(double))
    if eta == NULL or sums == NULL:
        free(eta); free(sums)
        raise MemoryError()
    cdef const double* g = &g_flat[0] if g_flat.shape[0] else NULL
    cdef const double* ff = &f[0] if f.shape[0] else NULL
    cdef long long mask = lo ^ (lo >> 1), r, nxt
    cdef Py_ssize_t j, kk, b
    cdef double acc, energy = 0.0, mx = NEG_INF, s = 0.0
    with nogil:
        for j in range(n):
            eta[j] = 1.0 if (mask >> j) & 1 else -1.0
        for j in range(n):
            acc = 0.0
            for kk in range(n):
                if kk != j:
                    acc += g[j * n + kk] * eta[kk]
            sums[j] = acc
        for j in range(n):
            energy += 0.5 * eta[j] * sums[j] + ff[j] * eta[j]
        for r in range(lo, hi):
            _lse(&mx, &s, energy)
            nxt = r + 1
            if nxt == hi:
                break
            b = 0
            while not (nxt >> b) & 1:
                b += 1
            energy -= 2.0 * eta[b] * (sums[b] + ff[b])
            for kk in range(n):
                if kk != b:
                    sums[kk] -= 2.0 * g[kk * n + b] * eta[b]
            eta[b] = -eta[b]
    free(eta)
    free(sums)
    return mx, s


cdef void _pair_phase(long long a, long long b, Py_ssize_t n, Py_ssize_t m,
                      const cnp.int64_t* cp, const cnp.int64_t* ri, const double* cf,
                      const double* zre, const double* zim,
                      double* out_re, double* out_im) nogil:
    cdef long long mask, mid
    cdef Py_ssize_t j, e, i
    cdef double re = 0.0, im = 0.0, pr, pi, fr, fi, npr, phase, cp_, sp_
    cdef double r1, i1, r2, i2
    if b - a <= 128:
        for mask in range(a, b):
            pr = 1.0
            pi = 0.0
            for j in range(n):
                phase = 0.0
                for e in range(cp[j], cp[j + 1]):
                    i = ri[e]
                    if (mask >> i) & 1:
                        phase += cf[e]
                    else:
                        phase -= cf[e]
                cp_ = cos(phase)
                sp_ = sin(phase)
                fr = 1.0 + zre[j] * cp_ - zim[j] * sp_
                fi = zre[j] * sp_ + zim[j] * cp_
                npr = pr * fr - pi * fi
                pi = pr * fi + pi * fr
                pr = npr
            re += pr
            im += pi
        out_re[0] = re
        out_im[0] = im
        return
    mid = (a + b) // 2
    _pair_phase(a, mid, n, m, cp, ri, cf, zre, zim, &r1, &i1)
    _pair_phase(mid, b, n, m, cp, ri, cf, zre, zim, &r2, &i2)
    out_re[0] = r1 + r2
    out_im[0] = i1 + i2


def phase_chunk(const cnp.int64_t[::1] col_ptr, const cnp.int64_t[::1] row_idx,
                const double[::1] coeff, const double[::1] z_re,
                const double[::1] z_im, long long lo, long long hi,
                long long n, long long m):
    cdef const cnp.int64_t* cp = &col_ptr[0] if col_ptr.shape[0] else NULL
    cdef const cnp.int64_t* ri = &row_idx[0] if row_idx.shape[0] else cp
    cdef const double* cf = &coeff[0] if coeff.shape[0] else NULL
    cdef const double* zr = &z_re[0] if z_re.shape[0] else NULL
    cdef const double* zi = &z_im[0] if z_im.shape[0] else NULL
    cdef double re = 0.0, im = 0.0
    with nogil:
        _pair_phase(lo, hi, n, m, cp, ri, cf, zr, zi, &re, &im)
    return re, im
