"""Moving averages of heavy-tailed innovations and their partial-sum paths.

``realize`` builds X_i = sum_j C_j Z_{i-j} for i = 1..n from a seeded
innovation stream that includes a warm-up window Z_{1-J}..Z_0, so the
realized stretch is exactly stationary.  The optional finite-order mode
collapses the coefficient tail into a single lag,
X_i(q) = sum_{j<q} C_j Z_{i-j} + (sum_{j>=q} C_j) Z_{i-q}, on the
identical innovation stream, which couples a process to its finite-order
approximations for truncation-error studies.

``paths`` turns a realization into the normalized partial-sum pair: jumps
of size X_i/a_n and X_i^2/a_n^2 at the epochs i/n.  ``self_normalized``
divides the raw partial sums by the root of the total sum of squares, so
the unknown normalization a_n cancels.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from .cadlag import CadlagStep
from .coefficients import CoefSeq, tail_sums
from .heavy_tail import TailModel, norm_seq, sample_from
from .seeds import DOMAIN_INNOVATIONS, rng_for

__all__ = ["ProcessRealization", "PathPair", "realize", "paths", "self_normalized"]


@dataclass(frozen=True)
class ProcessRealization:
    """X_1..X_n plus everything needed to reproduce it bit-for-bit."""

    x: np.ndarray
    innovations: np.ndarray  # Z_{1-J}..Z_n, warm-up window included
    n: int
    a_n: float
    tail: TailModel
    coefs: CoefSeq
    seed: int
    stream: int = 0
    order: int | None = None  # q of the finite-order mode, None = full

    def __post_init__(self):
        self.x.setflags(write=False)
        self.innovations.setflags(write=False)


@dataclass(frozen=True)
class PathPair:
    """Normalized partial-sum path and its nondecreasing square companion."""

    v: CadlagStep
    w: CadlagStep
    n: int
    a_n: float
    zeta_sq: float  # sum of X_i^2, same accumulation that produced w


def effective_coefs(coefs: CoefSeq, order: int | None) -> np.ndarray:
    """Coefficient vector actually applied: full, or head plus folded tail."""
    if order is None:
        return coefs.coefs
    q = order
    if q < 0 or q > coefs.j_max:
        raise ValueError("order must lie in 0..j_max")
    tail, _ = tail_sums(coefs, q)
    return np.concatenate((coefs.coefs[:q], [tail]))


def realize(tail: TailModel, coefs: CoefSeq, n: int, seed: int,
            stream: int = 0, order: int | None = None) -> ProcessRealization:
    """Simulate X_1..X_n; ``order=q`` gives the folded finite-order variant.

    The innovation window always spans Z_{1-j_max}..Z_n regardless of
    ``order``, so full and finite-order realizations under the same
    (seed, stream) share every innovation draw.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = rng_for(seed, DOMAIN_INNOVATIONS, stream)
    z = sample_from(tail, n + coefs.j_max, rng)
    c = effective_coefs(coefs, order)
    # the folded vector has q+1 lags; align its window inside z
    x = backend.fir_filter(c, z[coefs.j_max - (len(c) - 1):])
    return ProcessRealization(x=x, innovations=z, n=n, a_n=norm_seq(tail, n),
                              tail=tail, coefs=coefs, seed=seed, stream=stream,
                              order=order)


def paths(rz: ProcessRealization) -> PathPair:
    """Partial-sum pair (V, W) of a realization as step functions on [0, 1]."""
    n, a_n = rz.n, rz.a_n
    times = np.arange(1, n + 1) / n
    sums = backend.cumsum_plain(rz.x)
    sq = backend.cumsum_sq_compensated(rz.x)
    v = CadlagStep(times, sums / a_n, 0.0)
    w = CadlagStep(times, sq / (a_n * a_n), 0.0)
    return PathPair(v=v, w=w, n=n, a_n=a_n, zeta_sq=float(sq[-1]))


def self_normalized(rz: ProcessRealization) -> CadlagStep:
    """Partial sums divided by zeta_n = sqrt(sum X_i^2); scale-free."""
    sq = backend.cumsum_sq_compensated(rz.x)
    zeta = np.sqrt(sq[-1])
    if zeta == 0.0:
        raise ZeroDivisionError("degenerate normalization: all X_i are zero")
    sums = backend.cumsum_plain(rz.x)
    times = np.arange(1, rz.n + 1) / rz.n
    return CadlagStep(times, sums / zeta, 0.0)
