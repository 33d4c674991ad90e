# cython: language_level=3
"""Compiled hot kernels: FIR scan, compensated accumulation, M2 sweep."""

from libc.float cimport DBL_MAX
from libc.stdlib cimport free, malloc, qsort

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "c"


def fir_filter(coefs, z):
    cdef const double[::1] c = np.ascontiguousarray(coefs, dtype=np.float64)
    cdef const double[::1] zz = np.ascontiguousarray(z, dtype=np.float64)
    cdef Py_ssize_t lags = c.shape[0] - 1
    cdef Py_ssize_t n = zz.shape[0] - lags
    if n < 1:
        raise ValueError("innovation window shorter than the coefficient vector")
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef double acc
    for i in range(n):
        acc = c[0] * zz[lags + i]
        for j in range(1, lags + 1):
            acc += c[j] * zz[lags + i - j]
        out[i] = acc
    return out_arr


def cumsum_plain(x):
    cdef const double[::1] xx = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = xx.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double s = 0.0
    cdef Py_ssize_t i
    for i in range(n):
        s += xx[i]
        out[i] = s
    return out_arr


def cumsum_sq_compensated(x):
    """Kahan-compensated cumulative sum of squares."""
    cdef const double[::1] xx = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = xx.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double s = 0.0, comp = 0.0, term, y, t
    cdef Py_ssize_t i
    for i in range(n):
        term = xx[i] * xx[i]
        y = term - comp
        t = s + y
        comp = (t - s) - y
        s = t
        out[i] = s
    return out_arr


def batch_partial_stats(z2d, coefs2d, idx):
    cdef const double[:, ::1] z = np.ascontiguousarray(z2d, dtype=np.float64)
    cdef const double[:, ::1] c = np.ascontiguousarray(coefs2d, dtype=np.float64)
    cdef const cnp.int64_t[::1] ix = np.ascontiguousarray(idx, dtype=np.int64)
    cdef Py_ssize_t b = z.shape[0]
    cdef Py_ssize_t lags = c.shape[1] - 1
    cdef Py_ssize_t n = z.shape[1] - lags
    cdef Py_ssize_t k = ix.shape[0]
    if c.shape[0] != b:
        raise ValueError("z2d and coefs2d row counts differ")
    sums_arr = np.empty((b, k), dtype=np.float64)
    sq_arr = np.empty((b, k), dtype=np.float64)
    cdef double[:, ::1] sums = sums_arr
    cdef double[:, ::1] sq = sq_arr
    cdef Py_ssize_t row, i, j, pos
    cdef double acc, s, ssum, comp, term, y, t
    for row in range(b):
        s = 0.0
        ssum = 0.0
        comp = 0.0
        pos = 0
        for i in range(n):
            acc = c[row, 0] * z[row, lags + i]
            for j in range(1, lags + 1):
                acc += c[row, j] * z[row, lags + i - j]
            s += acc
            term = acc * acc
            y = term - comp
            t = ssum + y
            comp = (t - ssum) - y
            ssum = t
            while pos < k and ix[pos] == i + 1:
                sums[row, pos] = s
                sq[row, pos] = ssum
                pos += 1
        if pos != k:
            raise ValueError("idx entries must be sorted and lie in 1..n")
    return sums_arr, sq_arr


# -- M2 one-sided sup-inf ------------------------------------------------------
#
# Along one segment of graph A (parameter tau), the max-norm distance to a
# segment of graph B is a flat-bottomed cone h + dist(tau, [lo, hi]).  The
# sup of the pointwise cone minimum is attained at a cone breakpoint or
# where a rising flank crosses a falling flank inside a breakpoint gap;
# both candidate families are enumerated exactly.

cdef int _dbl_cmp(const void* a, const void* b) noexcept nogil:
    cdef double x = (<const double*> a)[0]
    cdef double y = (<const double*> b)[0]
    if x < y:
        return -1
    if x > y:
        return 1
    return 0


cdef inline void _heap_push(double* hp, Py_ssize_t* size, double h, double hi) noexcept:
    cdef Py_ssize_t i = size[0]
    cdef Py_ssize_t parent
    cdef double th, thi
    hp[2 * i] = h
    hp[2 * i + 1] = hi
    size[0] += 1
    while i > 0:
        parent = (i - 1) >> 1
        if hp[2 * parent] <= hp[2 * i]:
            break
        th = hp[2 * parent]; thi = hp[2 * parent + 1]
        hp[2 * parent] = hp[2 * i]; hp[2 * parent + 1] = hp[2 * i + 1]
        hp[2 * i] = th; hp[2 * i + 1] = thi
        i = parent


cdef inline void _heap_pop(double* hp, Py_ssize_t* size) noexcept:
    cdef Py_ssize_t i = 0, child
    cdef double th, thi
    size[0] -= 1
    hp[0] = hp[2 * size[0]]
    hp[1] = hp[2 * size[0] + 1]
    while True:
        child = 2 * i + 1
        if child >= size[0]:
            break
        if child + 1 < size[0] and hp[2 * (child + 1)] < hp[2 * child]:
            child += 1
        if hp[2 * i] <= hp[2 * child]:
            break
        th = hp[2 * i]; thi = hp[2 * i + 1]
        hp[2 * i] = hp[2 * child]; hp[2 * i + 1] = hp[2 * child + 1]
        hp[2 * child] = th; hp[2 * child + 1] = thi
        i = child


def graph_supinf(segs_a, segs_b):
    """sup over graph A of the min max-norm distance to graph B.

    Returns (value, a_index, tau); tau locates the attaining point along
    segment a_index of A.
    """
    cdef const double[:, ::1] sa = np.ascontiguousarray(segs_a, dtype=np.float64)
    cdef const double[:, ::1] sb = np.ascontiguousarray(segs_b, dtype=np.float64)
    cdef Py_ssize_t ka = sa.shape[0]
    cdef Py_ssize_t m = sb.shape[0]
    cdef Py_ssize_t cap = 2 * m + 2

    cdef double* h_arr = <double*> malloc(m * sizeof(double))
    cdef double* lo_arr = <double*> malloc(m * sizeof(double))
    cdef double* hi_arr = <double*> malloc(m * sizeof(double))
    cdef double* cand = <double*> malloc(cap * sizeof(double))
    cdef double* by_hi = <double*> malloc(2 * m * sizeof(double))   # (hi, h-hi)
    cdef double* by_lo = <double*> malloc(3 * m * sizeof(double))   # (lo, h, hi)
    cdef double* heap = <double*> malloc(2 * m * sizeof(double))    # (h, hi)
    cdef double* g_plus = <double*> malloc(cap * sizeof(double))
    cdef double* g_minus = <double*> malloc(cap * sizeof(double))
    cdef double* g_zero = <double*> malloc(cap * sizeof(double))
    cdef double* g_open = <double*> malloc(cap * sizeof(double))
    if (h_arr == NULL or lo_arr == NULL or hi_arr == NULL or cand == NULL
            or by_hi == NULL or by_lo == NULL or heap == NULL or g_plus == NULL
            or g_minus == NULL or g_zero == NULL or g_open == NULL):
        free(h_arr); free(lo_arr); free(hi_arr); free(cand); free(by_hi)
        free(by_lo); free(heap); free(g_plus); free(g_minus); free(g_zero)
        free(g_open)
        raise MemoryError

    cdef double best = -1.0, best_tau = 0.0
    cdef Py_ssize_t best_a = 0
    cdef Py_ssize_t ei, si, nc, i, j, ptr, hsize
    cdef double t0, v0, t1, v1, c0, w0, c1, w1, wlo, whi, h, ta, tb
    cdef double base, tau, g, u0, d1, gap, delta, val
    cdef bint horiz

    try:
        for ei in range(ka):
            t0 = sa[ei, 0]; v0 = sa[ei, 1]; t1 = sa[ei, 2]; v1 = sa[ei, 3]
            horiz = t1 > t0
            if horiz:
                ta = t0; tb = t1
            else:
                ta = v0 if v0 < v1 else v1
                tb = v1 if v1 > v0 else v0
            for si in range(m):
                c0 = sb[si, 0]; w0 = sb[si, 1]; c1 = sb[si, 2]; w1 = sb[si, 3]
                wlo = w0 if w0 < w1 else w1
                whi = w1 if w1 > w0 else w0
                if horiz:
                    h = wlo - v0
                    if v0 - whi > h:
                        h = v0 - whi
                    if h < 0.0:
                        h = 0.0
                    lo_arr[si] = c0 - h
                    hi_arr[si] = c1 + h
                else:
                    h = c0 - t0
                    if t0 - c1 > h:
                        h = t0 - c1
                    if h < 0.0:
                        h = 0.0
                    lo_arr[si] = wlo - h
                    hi_arr[si] = whi + h
                h_arr[si] = h
            # sorted unique candidate parameters
            nc = 0
            cand[nc] = ta; nc += 1
            cand[nc] = tb; nc += 1
            for si in range(m):
                tau = lo_arr[si]
                if ta < tau < tb:
                    cand[nc] = tau; nc += 1
                tau = hi_arr[si]
                if ta < tau < tb:
                    cand[nc] = tau; nc += 1
            qsort(cand, nc, sizeof(double), _dbl_cmp)
            j = 0
            for i in range(1, nc):
                if cand[i] != cand[j]:
                    j += 1
                    cand[j] = cand[i]
            nc = j + 1
            # rising flanks: min over cones with hi <= tau of (h - hi) + tau
            for si in range(m):
                by_hi[2 * si] = hi_arr[si]
                by_hi[2 * si + 1] = h_arr[si] - hi_arr[si]
            qsort(by_hi, m, 2 * sizeof(double), _dbl_cmp)
            ptr = 0
            base = DBL_MAX
            for i in range(nc):
                while ptr < m and by_hi[2 * ptr] <= cand[i]:
                    if by_hi[2 * ptr + 1] < base:
                        base = by_hi[2 * ptr + 1]
                    ptr += 1
                g_plus[i] = base + cand[i] if base < DBL_MAX else DBL_MAX
            # falling flanks: min over cones with lo >= tau of (h + lo) - tau
            for si in range(m):
                by_lo[3 * si] = lo_arr[si]
                by_lo[3 * si + 1] = h_arr[si]
                by_lo[3 * si + 2] = hi_arr[si]
            qsort(by_lo, m, 3 * sizeof(double), _dbl_cmp)
            ptr = m - 1
            base = DBL_MAX
            for i in range(nc - 1, -1, -1):
                while ptr >= 0 and by_lo[3 * ptr] >= cand[i]:
                    if by_lo[3 * ptr + 1] + by_lo[3 * ptr] < base:
                        base = by_lo[3 * ptr + 1] + by_lo[3 * ptr]
                    ptr -= 1
                g_minus[i] = base - cand[i] if base < DBL_MAX else DBL_MAX
            # flat bottoms via lo-ordered sweep with an (h, hi)-heap:
            # g_zero[i] covers cand[i], g_open[i] covers (cand[i], cand[i+1])
            ptr = 0
            hsize = 0
            for i in range(nc):
                while ptr < m and by_lo[3 * ptr] <= cand[i]:
                    _heap_push(heap, &hsize, by_lo[3 * ptr + 1], by_lo[3 * ptr + 2])
                    ptr += 1
                while hsize > 0 and heap[1] < cand[i]:
                    _heap_pop(heap, &hsize)
                g_zero[i] = heap[0] if hsize > 0 else DBL_MAX
                if i + 1 < nc:
                    while hsize > 0 and heap[1] < cand[i + 1]:
                        _heap_pop(heap, &hsize)
                    g_open[i] = heap[0] if hsize > 0 else DBL_MAX
            # evaluate at candidates
            for i in range(nc):
                g = g_zero[i]
                if g_plus[i] < g:
                    g = g_plus[i]
                if g_minus[i] < g:
                    g = g_minus[i]
                if g > best:
                    best = g
                    best_a = ei
                    best_tau = cand[i]
            # flank crossings inside the gaps
            for i in range(nc - 1):
                u0 = g_plus[i]
                d1 = g_minus[i + 1]
                if u0 == DBL_MAX or d1 == DBL_MAX:
                    continue
                gap = cand[i + 1] - cand[i]
                delta = 0.5 * ((d1 - u0) + gap)
                if delta <= 0.0 or delta >= gap:
                    continue
                val = u0 + delta
                if g_open[i] < val:
                    val = g_open[i]
                if val > best:
                    best = val
                    best_a = ei
                    best_tau = cand[i] + delta
    finally:
        free(h_arr); free(lo_arr); free(hi_arr); free(cand); free(by_hi)
        free(by_lo); free(heap); free(g_plus); free(g_minus); free(g_zero)
        free(g_open)

    return best, int(best_a), best_tau
