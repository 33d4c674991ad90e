"""Pure-numpy implementations of the hot kernels.

Mirrors ``_kernels`` (the compiled extension).  The FIR convolution uses
the same ascending-lag accumulation order, so its output is bit-identical
to the compiled version.  The compensated square-sum accumulators differ
in mechanism (block-compensated cumsum here, Kahan compensation in the
extension); agreement is at the few-ulp level, asserted in tests.
"""
from __future__ import annotations

import numpy as np

BACKEND = "python"


_CHUNK_ELEMS = 1_000_000  # keeps the accumulation temporaries cache-resident


def _fir_into(x: np.ndarray, coefs2d: np.ndarray, z2d: np.ndarray, lags: int):
    """Ascending-lag accumulation, column-chunked.

    Chunking changes nothing about the per-element operation order, so the
    output is bit-identical to the scalar ascending-lag loop (and to the
    compiled kernel).
    """
    b, n = x.shape
    chunk = max(256, _CHUNK_ELEMS // b)
    tmp = np.empty((b, min(chunk, n)))
    for k0 in range(0, n, chunk):
        k1 = min(n, k0 + chunk)
        xc = x[:, k0:k1]
        np.multiply(coefs2d[:, 0:1], z2d[:, lags + k0:lags + k1], out=xc)
        for j in range(1, lags + 1):
            t = tmp[:, :k1 - k0]
            np.multiply(coefs2d[:, j:j + 1], z2d[:, lags + k0 - j:lags + k1 - j],
                        out=t)
            xc += t
    return x


def fir_filter(coefs: np.ndarray, z: np.ndarray) -> np.ndarray:
    """X[i] = sum_j coefs[j] * z[J + i - j], ascending j; len(out) = len(z) - J."""
    coefs = np.asarray(coefs, dtype=float)
    z = np.asarray(z, dtype=float)
    lags = len(coefs) - 1
    n = len(z) - lags
    if n < 1:
        raise ValueError("innovation window shorter than the coefficient vector")
    return _fir_into(np.empty((1, n)), coefs[None, :], z[None, :], lags)[0]


def cumsum_plain(x: np.ndarray) -> np.ndarray:
    return np.cumsum(np.asarray(x, dtype=float))


_BLOCK = 4096


def _sq_cumsum_blocked(sq: np.ndarray) -> np.ndarray:
    """Row-wise cumulative sums with extended-precision carry across blocks.

    Plain float64 accumulation inside 4096-wide blocks, long-double
    accumulation of the block totals; drift over long horizons stays at
    the compensated level without scalar loops.
    """
    b, n = sq.shape
    nblk = -(-n // _BLOCK)
    padded = np.zeros((b, nblk * _BLOCK))
    padded[:, :n] = sq
    within = np.cumsum(padded.reshape(b, nblk, _BLOCK), axis=2)
    totals = within[:, :, -1].astype(np.longdouble)
    carry = np.zeros((b, nblk), dtype=np.longdouble)
    carry[:, 1:] = np.cumsum(totals[:, :-1], axis=1)
    out = within + carry[:, :, None].astype(float)
    return out.reshape(b, nblk * _BLOCK)[:, :n]


def cumsum_sq_compensated(x: np.ndarray) -> np.ndarray:
    """Cumulative sum of squares with block-compensated accumulation."""
    x = np.asarray(x, dtype=float)
    return _sq_cumsum_blocked((x * x)[None, :])[0]


def batch_partial_stats(z2d: np.ndarray, coefs2d: np.ndarray, idx: np.ndarray):
    """Partial sums and square-sums of the filtered series at given epochs.

    z2d : (B, n + lags) innovation windows, one replication per row.
    coefs2d : (B, lags + 1) per-replication coefficient vectors.
    idx : sorted 1-based epochs in 1..n.

    Returns (sums, sqsums), each (B, len(idx)):
    sums[b, k]   = sum_{i <= idx[k]} X_i,
    sqsums[b, k] = sum_{i <= idx[k]} X_i^2.
    """
    z2d = np.asarray(z2d, dtype=float)
    coefs2d = np.asarray(coefs2d, dtype=float)
    idx = np.asarray(idx, dtype=np.int64)
    b, width = z2d.shape
    lags = coefs2d.shape[1] - 1
    n = width - lags
    if idx.size and (idx.min() < 1 or idx.max() > n):
        raise ValueError("idx entries must be sorted and lie in 1..n")
    x = _fir_into(np.empty((b, n)), coefs2d, z2d, lags)
    cs = np.cumsum(x, axis=1)
    cq = _sq_cumsum_blocked(x * x)
    return cs[:, idx - 1], cq[:, idx - 1]


# -- one-sided sup-inf between completed graphs -------------------------------
#
# For a point moving along one axis-aligned segment e with parameter tau,
# the max-norm distance to any axis-aligned segment s is a flat-bottomed
# cone h + dist(tau, [lo, hi]).  The sup over e of the pointwise min of
# the cones is attained either at a cone breakpoint or where a rising
# cone flank crosses a falling one; both candidate sets are enumerated
# exactly, so the result is exact up to roundoff.


def _cones(e: np.ndarray, segs: np.ndarray):
    t0, v0, t1, v1 = e
    c, w0, d, w1 = segs[:, 0], segs[:, 1], segs[:, 2], segs[:, 3]
    wlo = np.minimum(w0, w1)
    whi = np.maximum(w0, w1)
    if t1 > t0:  # horizontal, tau is the time coordinate
        h = np.maximum(np.maximum(wlo - v0, v0 - whi), 0.0)
        return h, c - h, d + h, t0, t1
    # vertical, tau is the value coordinate
    h = np.maximum(np.maximum(c - t0, t0 - d), 0.0)
    lo = min(v0, v1)
    hi = max(v0, v1)
    return h, wlo - h, whi + h, lo, hi


def graph_supinf(segs_a: np.ndarray, segs_b: np.ndarray):
    """sup over points of graph A of the min distance to graph B.

    Returns (value, a_index, tau); tau locates the attaining point along
    segment ``a_index`` of A.
    """
    best = -1.0
    best_a = 0
    best_tau = 0.0
    for ei, e in enumerate(segs_a):
        h, lo, hi, ta, tb = _cones(e, segs_b)
        cand = np.unique(np.concatenate(
            ([ta, tb], np.clip(lo, ta, tb), np.clip(hi, ta, tb))))
        g = (h[:, None] + np.maximum(
            0.0, np.maximum(lo[:, None] - cand[None, :], cand[None, :] - hi[:, None]))
        ).min(axis=0)
        k = int(np.argmax(g))
        if g[k] > best:
            best, best_a, best_tau = float(g[k]), ei, float(cand[k])
        if len(cand) > 1:
            tl, tr = cand[:-1], cand[1:]
            u0 = np.where(hi[:, None] <= tl[None, :], (h - hi)[:, None], np.inf
                          ).min(axis=0) + tl
            d1 = np.where(lo[:, None] >= tr[None, :], (h + lo)[:, None], np.inf
                          ).min(axis=0) - tr
            cover = np.where((lo[:, None] <= tl[None, :]) & (hi[:, None] >= tr[None, :]),
                             h[:, None], np.inf).min(axis=0)
            with np.errstate(invalid="ignore"):
                delta = 0.5 * ((d1 - u0) + (tr - tl))
                ok = np.isfinite(u0) & np.isfinite(d1) & (delta > 0.0) & (delta < tr - tl)
                val = np.where(ok, np.minimum(cover, u0 + delta), -np.inf)
            k = int(np.argmax(val))
            if ok.any() and val[k] > best:
                best, best_a, best_tau = float(val[k]), ei, float(tl[k] + delta[k])
    return best, best_a, best_tau
