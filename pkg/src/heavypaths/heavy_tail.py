"""Two-sided Pareto innovation law: sampling, normalization, truncated moments.

The innovation Z is built from a Pareto magnitude, P(|Z0| > x) = x^(-alpha)
for x >= 1 with alpha in (0, 2), and an independent sign that is +1 with
probability p and -1 with probability r = 1 - p.  Depending on alpha the
law is then centered:

* alpha < 1      -- no centering,
* alpha = 1      -- symmetry is required (p = r = 1/2), no shift,
* alpha in (1,2) -- the exact mean m = (p - r) * alpha/(alpha - 1) is
  subtracted, so the sampled law has mean zero.

With the slowly varying part identically 1 every tail quantity below is
available in closed form: the normalizing sequence a_n solving
n * P(|Z| > a_n) = 1, truncated first and second moments at any threshold,
and the integrals of the limiting tail measure

    mu(dx) = (p 1_{x>0} + r 1_{x<0}) * alpha * |x|^(-alpha-1) dx.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .seeds import DOMAIN_INNOVATIONS, rng_for

__all__ = [
    "TailModel", "sample_innovations", "norm_seq", "truncated_moment",
    "karamata_limit", "mu_b", "mu_c", "mu_tail",
]

_U_FLOOR = 2.0 ** -53  # keeps the inverse-transform magnitude finite


@dataclass(frozen=True)
class TailModel:
    """Tail index alpha in (0, 2) and right-tail weight p (r = 1 - p)."""

    alpha: float
    p: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.alpha < 2.0:
            raise ValueError(f"alpha must lie in (0, 2), got {self.alpha}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if self.alpha == 1.0 and self.p != 0.5:
            raise ValueError("alpha = 1 requires the symmetric law p = r = 1/2")

    @property
    def r(self) -> float:
        return 1.0 - self.p

    @property
    def centering(self) -> str:
        if self.alpha < 1.0:
            return "none"
        return "symmetric" if self.alpha == 1.0 else "mean_zero"

    @property
    def mean_shift(self) -> float:
        """Mean of the uncentered law; subtracted when alpha in (1, 2)."""
        if self.alpha <= 1.0:
            return 0.0
        return (self.p - self.r) * self.alpha / (self.alpha - 1.0)

    def to_json(self) -> str:
        return json.dumps({"alpha": self.alpha, "p": self.p, "centering": self.centering})

    @classmethod
    def from_json(cls, s: str) -> "TailModel":
        d = json.loads(s)
        return cls(alpha=d["alpha"], p=d["p"])


# -- sampling ----------------------------------------------------------------

def sample_from(model: TailModel, n: int, rng: np.random.Generator) -> np.ndarray:
    """Inverse-transform draws from the (centered) law using ``rng``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    u = np.maximum(rng.random(n), _U_FLOOR)
    r = model.r
    z = np.empty(n)
    neg = u < r
    inv = -1.0 / model.alpha
    if neg.any():
        z[neg] = -np.exp(np.log(u[neg] / r) * inv)
    pos = ~neg
    if pos.any():
        z[pos] = np.exp(np.log(np.maximum(1.0 - u[pos], _U_FLOOR) / model.p) * inv)
    if model.alpha > 1.0:
        z -= model.mean_shift
    return z


def sample_innovations(model: TailModel, n: int, seed: int, stream: int = 0) -> np.ndarray:
    """Seeded i.i.d. innovations; (seed, stream) selects a disjoint Philox stream."""
    return sample_from(model, n, rng_for(seed, DOMAIN_INNOVATIONS, stream))


# -- exact tail and partial moments of the uncentered law --------------------

def _surv_above(model: TailModel, y: float) -> float:
    """P(Z0 > y) for the uncentered law."""
    a, p, r = model.alpha, model.p, model.r
    if y >= 1.0:
        return p * y ** -a
    if y >= -1.0:
        return p
    return p + r * (1.0 - (-y) ** -a)


def _cdf_below(model: TailModel, y: float) -> float:
    """P(Z0 < y) for the uncentered law."""
    a, p, r = model.alpha, model.p, model.r
    if y <= -1.0:
        return r * (-y) ** -a
    if y <= 1.0:
        return r
    return r + p * (1.0 - y ** -a)


def _pow_int(a: float, lo: float, hi: float, k: int) -> float:
    """integral of x^k * a * x^(-a-1) dx over [lo, hi], 1 <= lo <= hi."""
    if hi <= lo:
        return 0.0
    e = k - a
    if e == 0.0:
        return a * (np.log(hi) - np.log(lo))
    return a / e * (hi ** e - lo ** e)


def _part_moments(model: TailModel, lo: float, hi: float) -> tuple:
    """(P, M1, M2, M3, M4) of the uncentered law over the interval (lo, hi]."""
    a, p, r = model.alpha, model.p, model.r
    mom = [0.0] * 5
    plo, phi = max(lo, 1.0), hi  # positive support [1, inf)
    if phi > plo:
        for k in range(5):
            mom[k] += p * _pow_int(a, plo, phi, k)
    nlo, nhi = max(-hi, 1.0), -lo  # negative support (-inf, -1]
    if nhi > nlo:
        for k in range(5):
            mom[k] += r * (-1.0) ** k * _pow_int(a, nlo, nhi, k)
    return tuple(mom)


def tail_prob(model: TailModel, x: float) -> float:
    """P(|Z| > x) for the centered law, exact."""
    if x <= 0.0:
        return 1.0
    m = model.mean_shift
    return _surv_above(model, x + m) + _cdf_below(model, m - x)


# -- normalizing sequence ----------------------------------------------------

def norm_seq(model: TailModel, n: int) -> float:
    """a_n with n * P(|Z| > a_n) = 1, exact for the implemented law.

    For the mean-shifted law the equation is solved by bracketed
    root-finding on the exact piecewise tail.  At n = 1 the shifted
    magnitude law can have no positive solution (its support reaches 0);
    that degenerate corner is rejected.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if model.mean_shift == 0.0:
        return float(n) ** (1.0 / model.alpha)
    target = 1.0 / n
    hi = 2.0 * (float(n) ** (1.0 / model.alpha) + abs(model.mean_shift)) + 2.0
    while tail_prob(model, hi) > target:
        hi *= 2.0
    root = float(brentq(lambda x: tail_prob(model, x) - target, 0.0, hi,
                        xtol=1e-300, rtol=8.9e-16, maxiter=200))
    if root <= 0.0:
        raise ValueError(f"n={n} admits no positive normalizer for the "
                         f"shifted law (tail never reaches 1/n from below)")
    return root


# -- truncated moments -------------------------------------------------------

_KINDS = ("first_inside", "second_inside", "fourth_inside", "first_outside")


def truncated_moment(model: TailModel, n: int, u: float, kind: str) -> float:
    """Exact n * E[(Z/a_n)^k ; |Z| <=> u a_n] for the implemented law.

    ``first_inside``  : n * E[(Z/a_n)   1{|Z| <= u a_n}]
    ``second_inside`` : n * E[(Z/a_n)^2 1{|Z| <= u a_n}]
    ``fourth_inside`` : n * E[(Z/a_n)^4 1{|Z| <= u a_n}]
    ``first_outside`` : n * E[(Z/a_n)   1{|Z| >  u a_n}]; requires alpha > 1
                        (the outside first moment is not integrable otherwise).
    """
    if u <= 0.0:
        raise ValueError("u must be > 0")
    if kind not in _KINDS:
        raise ValueError(f"kind must be one of {_KINDS}")
    a_n = norm_seq(model, n)
    m = model.mean_shift
    cut = u * a_n
    prob, m1, m2, m3, m4 = _part_moments(model, m - cut, m + cut)
    inside1 = m1 - m * prob
    if kind == "first_inside":
        return n * inside1 / a_n
    if kind == "second_inside":
        return n * (m2 - 2.0 * m * m1 + m * m * prob) / a_n ** 2
    if kind == "fourth_inside":
        c = (m4 - 4.0 * m * m3 + 6.0 * m * m * m2
             - 4.0 * m ** 3 * m1 + m ** 4 * prob)
        return n * c / a_n ** 4
    if model.alpha <= 1.0:
        raise ValueError("first_outside requires alpha in (1, 2)")
    # centered law has mean zero, so outside = -inside
    return -n * inside1 / a_n


def karamata_limit(model: TailModel, kind: str) -> float:
    """n -> infinity limit of :func:`truncated_moment` at u = 1."""
    a, p, r = model.alpha, model.p, model.r
    if kind == "second_inside":
        return a / (2.0 - a)
    if kind == "first_inside":
        return 0.0 if a == 1.0 else (p - r) * a / (1.0 - a)
    if kind == "first_outside":
        if a <= 1.0:
            raise ValueError("first_outside requires alpha in (1, 2)")
        return (p - r) * a / (a - 1.0)
    raise ValueError(f"kind must be one of {_KINDS}")


# -- limiting measure mu -----------------------------------------------------

def mu_tail(model: TailModel, x: float) -> tuple[float, float]:
    """(mu((x, inf)), mu((-inf, -x))) for x > 0."""
    if x <= 0.0:
        raise ValueError("x must be > 0")
    return model.p * x ** -model.alpha, model.r * x ** -model.alpha


def mu_b(model: TailModel, u: float) -> float:
    """integral of x mu(dx) over u < |x| <= 1, for 0 < u <= 1."""
    if not 0.0 < u <= 1.0:
        raise ValueError("u must lie in (0, 1]")
    a = model.alpha
    if a == 1.0:
        return (model.p - model.r) * np.log(1.0 / u)
    return (model.p - model.r) * a / (1.0 - a) * (1.0 - u ** (1.0 - a))


def mu_c(model: TailModel, u: float) -> float:
    """integral of x^2 mu(dx) over u < |x| <= 1, for 0 < u <= 1."""
    if not 0.0 < u <= 1.0:
        raise ValueError("u must lie in (0, 1]")
    a = model.alpha
    return a / (2.0 - a) * (1.0 - u ** (2.0 - a))
