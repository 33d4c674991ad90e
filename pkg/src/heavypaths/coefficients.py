"""Random coefficient sequences, their aggregates, and condition validators.

Built-in coefficient models are restricted to families whose absolute
moments E|C_j|^s are available in closed form, so the moment-series
validators are analytic rather than sampled:

* ``deterministic_list``  -- a fixed finite vector,
* ``finite_iid_nonneg``   -- C_0..C_q i.i.d. Uniform[low, high], 0 <= low < high,
* ``geometric_random``    -- C_j = A * rho^j with A ~ U[a_low, a_high] and
  rho ~ U[rho_low, rho_high] drawn once per realization (degenerate ranges
  give fixed values),
* ``power_law``           -- C_j = (j+1)^(-power), the deterministic
  polynomial-decay family used to exercise the validators.

All kinds except ``deterministic_list`` are nonnegative, which makes every
partial sum of the coefficients fall between 0 and the total sum.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .seeds import DOMAIN_COEFFICIENTS, rng_for

__all__ = [
    "CoefModel", "CoefSeq", "SandwichReport", "MomentReport", "ConditionReport",
    "sample_coefs", "validate_sandwich", "validate_moments", "tail_sums",
    "default_jmax",
]

_KINDS = ("deterministic_list", "finite_iid_nonneg", "geometric_random", "power_law")


@dataclass(frozen=True)
class CoefModel:
    kind: str
    values: tuple = ()            # deterministic_list
    order: int = 0                # finite_iid_nonneg
    low: float = 0.0              # finite_iid_nonneg
    high: float = 1.0
    a_low: float = 1.0            # geometric_random
    a_high: float = 1.0
    rho_low: float = 0.5
    rho_high: float = 0.5
    power: float = 2.0            # power_law

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.kind == "deterministic_list" and len(self.values) == 0:
            raise ValueError("deterministic_list needs at least one value")
        if self.kind == "finite_iid_nonneg":
            if self.low < 0.0 or self.high <= self.low:
                raise ValueError("finite_iid_nonneg needs 0 <= low < high")
            if self.order < 0:
                raise ValueError("order must be >= 0")
        if self.kind == "geometric_random":
            if not (0.0 < self.a_low <= self.a_high):
                raise ValueError("geometric_random needs 0 < a_low <= a_high")
            if not (0.0 < self.rho_low <= self.rho_high < 1.0):
                raise ValueError("geometric_random needs 0 < rho_low <= rho_high < 1")
        if self.kind == "power_law" and self.power <= 0.0:
            raise ValueError("power must be > 0")

    # -- realization --------------------------------------------------------

    def sample(self, j_max: int, rng: np.random.Generator) -> np.ndarray:
        j = np.arange(j_max + 1, dtype=float)
        if self.kind == "deterministic_list":
            out = np.zeros(j_max + 1)
            vals = np.asarray(self.values, dtype=float)
            out[: min(len(vals), j_max + 1)] = vals[: j_max + 1]
            return out
        if self.kind == "finite_iid_nonneg":
            out = np.zeros(j_max + 1)
            k = min(self.order, j_max)
            out[: k + 1] = rng.uniform(self.low, self.high, k + 1)
            return out
        if self.kind == "geometric_random":
            a = rng.uniform(self.a_low, self.a_high)
            rho = rng.uniform(self.rho_low, self.rho_high)
            return a * rho ** j
        return (j + 1.0) ** -self.power

    # -- analytic absolute moments ------------------------------------------

    def abs_moment(self, j: int, s: float) -> float:
        """E|C_j|^s, exact for every built-in kind."""
        if self.kind == "deterministic_list":
            return abs(self.values[j]) ** s if j < len(self.values) else 0.0
        if self.kind == "finite_iid_nonneg":
            if j > self.order:
                return 0.0
            return _uniform_moment(self.low, self.high, s)
        if self.kind == "geometric_random":
            ea = _uniform_moment(self.a_low, self.a_high, s)
            return ea * _uniform_moment(self.rho_low, self.rho_high, s * j)
        return (j + 1.0) ** (-self.power * s)

    def moment_series(self, s: float, j_max: int) -> tuple[bool, float]:
        """(series converges, partial sum up to j_max) for sum_j E|C_j|^s."""
        partial = math.fsum(self.abs_moment(j, s) for j in range(j_max + 1))
        if self.kind in ("deterministic_list", "finite_iid_nonneg"):
            return True, partial
        if self.kind == "geometric_random":
            return True, partial  # ratio test: terms decay like rho_high^(s j)
        return self.power * s > 1.0, partial

    def sqrt_moment_series(self, r: float, j_max: int) -> tuple[bool, float]:
        """(converges, partial sum up to j_max) for sum_j sqrt(E|C_j|^{2r})."""
        partial = math.fsum(math.sqrt(self.abs_moment(j, 2.0 * r))
                            for j in range(j_max + 1))
        if self.kind in ("deterministic_list", "finite_iid_nonneg", "geometric_random"):
            return True, partial  # finite support or geometric-rate terms
        return self.power * r > 1.0, partial

    def claims_sandwich(self) -> bool:
        """Whether every realization keeps partial sums between 0 and the total."""
        if self.kind != "deterministic_list":
            return True
        c = np.asarray(self.values, dtype=float)
        tot = c.sum()
        if tot == 0.0:
            return False
        ratios = np.cumsum(c) / tot
        return bool(np.all((ratios >= 0.0) & (ratios <= 1.0)))

    # -- serialization -------------------------------------------------------

    def to_json(self) -> str:
        d = {"kind": self.kind}
        if self.kind == "deterministic_list":
            d["values"] = list(self.values)
        elif self.kind == "finite_iid_nonneg":
            d.update(order=self.order, low=self.low, high=self.high)
        elif self.kind == "geometric_random":
            d.update(a_low=self.a_low, a_high=self.a_high,
                     rho_low=self.rho_low, rho_high=self.rho_high)
        else:
            d["power"] = self.power
        return json.dumps(d)

    @classmethod
    def from_json(cls, s: str) -> "CoefModel":
        d = json.loads(s)
        if "values" in d:
            d["values"] = tuple(d["values"])
        return cls(**d)


def _uniform_moment(lo: float, hi: float, s: float) -> float:
    """E[X^s] for X ~ Uniform[lo, hi], 0 <= lo <= hi."""
    if s == 0.0:
        return 1.0
    if hi == lo:
        return hi ** s
    return (hi ** (s + 1.0) - lo ** (s + 1.0)) / ((s + 1.0) * (hi - lo))


@dataclass(frozen=True)
class CoefSeq:
    """One realized coefficient vector C_0..C_{j_max} with its aggregates."""

    coefs: np.ndarray
    model_id: str = "deterministic"

    def __post_init__(self):
        c = np.asarray(self.coefs, dtype=float)
        if c.ndim != 1 or len(c) == 0:
            raise ValueError("coefs must be a non-empty 1-d array")
        object.__setattr__(self, "coefs", c)
        self.coefs.setflags(write=False)

    @property
    def j_max(self) -> int:
        return len(self.coefs) - 1

    @property
    def total(self) -> float:
        """C = sum of the realized coefficients."""
        return float(np.sum(self.coefs))

    @property
    def square_total(self) -> float:
        """C^S = sum of squared realized coefficients."""
        return float(np.sum(self.coefs ** 2))


def sample_coefs(model: CoefModel, j_max: int, seed: int, stream: int = 0) -> CoefSeq:
    """Realize a coefficient sequence from its own seed domain.

    Coefficient streams are disjoint from innovation streams by
    construction, so the realized sequence is independent of (and
    unaffected by reseeding of) the innovation draws.
    """
    if j_max < 0:
        raise ValueError("j_max must be >= 0")
    rng = rng_for(seed, DOMAIN_COEFFICIENTS, stream)
    return CoefSeq(model.sample(j_max, rng), model_id=model.kind)


def default_jmax(model: CoefModel, alpha: float, tol: float = 1e-12) -> int:
    """Truncation order making the dropped coefficient mass invisible.

    Chooses the smallest J whose almost-sure bound on the dropped tail
    sum_{j>J} |C_j| falls below ``tol``, so truncation cannot move any
    simulated path by more than roundoff.  Finite-support kinds return
    their exact order.  ``alpha`` caps nothing here but is kept in the
    signature for kinds whose tail criterion may depend on it.
    """
    del alpha
    if model.kind == "deterministic_list":
        return len(model.values) - 1
    if model.kind == "finite_iid_nonneg":
        return model.order
    if model.kind == "geometric_random":
        # sup over the support: a_high * rho_high^(J+1) / (1 - rho_high)
        rho = model.rho_high
        j = 0
        while model.a_high * rho ** (j + 1) / (1.0 - rho) >= tol:
            j += 1
        return j
    if model.power <= 1.0:
        raise ValueError("power_law coefficient mass is not summable; "
                         "pass an explicit j_max")
    j = 1
    while (j + 1.0) ** (1.0 - model.power) / (model.power - 1.0) >= tol:
        j *= 2
    return j


# -- validators ---------------------------------------------------------------

@dataclass(frozen=True)
class SandwichReport:
    ok: bool
    first_violation: int | None = None
    worst_ratio: float = 0.0


def validate_sandwich(c: CoefSeq | np.ndarray, tol: float = 1e-12) -> SandwichReport:
    """Check 0 <= (partial sum)/(total sum) <= 1 for every prefix.

    The total is the last entry of the same cumulative accumulation as the
    prefixes, so an all-nonnegative sequence passes at tol = 0 exactly.
    """
    coefs = c.coefs if isinstance(c, CoefSeq) else np.asarray(c, dtype=float)
    partial = np.cumsum(coefs)
    total = partial[-1]
    if total == 0.0:
        raise ValueError("degenerate coefficient sequence: total sum is zero")
    ratios = partial / total
    bad = (ratios < -tol) | (ratios > 1.0 + tol)
    if not bad.any():
        return SandwichReport(True, None, float(np.max(np.abs(ratios - 0.5))))
    first = int(np.argmax(bad))
    return SandwichReport(False, first, float(ratios[first]))


@dataclass(frozen=True)
class ConditionReport:
    name: str
    exponent_range: tuple[float, float]
    scanned: tuple = field(default=())  # (exponent, converges, partial_sum) triples
    satisfiable: bool = False

    def __str__(self):
        lo, hi = self.exponent_range
        rows = ", ".join(f"{e:.3g}:{'ok' if c else 'div'}(S={ps:.6g})"
                         for e, c, ps in self.scanned)
        return (f"{self.name} on ({lo:.3g}, {hi:.3g}): "
                f"{'satisfiable' if self.satisfiable else 'NOT satisfiable'} [{rows}]")


@dataclass(frozen=True)
class MomentReport:
    conditions: tuple
    alpha: float

    @property
    def all_pass(self) -> bool:
        return all(c.satisfiable for c in self.conditions)

    def __str__(self):
        head = f"moment conditions at alpha={self.alpha}:"
        return "\n".join([head] + ["  " + str(c) for c in self.conditions])


def _scan(lo: float, hi: float, evaluate, n_grid: int = 5):
    """Scan an open exponent interval; ``evaluate`` -> (converges, partial_sum)."""
    if hi <= lo:
        return (), False
    grid = lo + (hi - lo) * (np.arange(1, n_grid + 1) / (n_grid + 1.0))
    rows = []
    any_ok = False
    for e in grid:
        conv, partial = evaluate(float(e))
        rows.append((float(e), conv, partial))
        any_ok = any_ok or conv
    return tuple(rows), any_ok


def validate_moments(model: CoefModel, alpha: float, j_max: int = 256) -> MomentReport:
    """Analytic convergence report for the four coefficient moment conditions.

    Exponents are scanned over their admissible ranges: delta in
    (0, alpha/2) for sum E(|C|^delta + |C|^{2 delta}), r in
    (alpha/2, min(1, alpha)) for sum sqrt(E|C|^{2r}), gamma in (alpha, 1)
    for alpha < 1 and in (alpha/2, 1) otherwise for the gamma analog, plus
    the plain summable-first-moment condition that enters when alpha >= 1.
    Per exponent the report carries the analytic convergence verdict and
    the partial sum at ``j_max``; a condition is satisfiable when some
    scanned exponent in its admissible range converges.
    """
    if not 0.0 < alpha < 2.0:
        raise ValueError("alpha must lie in (0, 2)")

    def double(e):
        ok1, p1 = model.moment_series(e, j_max)
        ok2, p2 = model.moment_series(2.0 * e, j_max)
        return ok1 and ok2, p1 + p2

    delta = _scan(0.0, alpha / 2.0, double)
    rr = _scan(alpha / 2.0, min(1.0, alpha),
               lambda e: model.sqrt_moment_series(e, j_max))
    glo = alpha if alpha < 1.0 else alpha / 2.0
    gamma = _scan(glo, 1.0, double)
    first_ok, first_ps = model.moment_series(1.0, j_max)
    conds = (
        ConditionReport("delta_moments", (0.0, alpha / 2.0), *delta),
        ConditionReport("sqrt_double_moments", (alpha / 2.0, min(1.0, alpha)), *rr),
        ConditionReport("gamma_moments", (glo, 1.0), *gamma),
        ConditionReport("first_moments", (1.0, 1.0), ((1.0, first_ok, first_ps),),
                        first_ok or alpha < 1.0),
    )
    return MomentReport(conds, alpha)


def tail_sums(c: CoefSeq, q: int) -> tuple[float, float]:
    """Tail sum past q and the q-truncated square aggregate.

    Returns ``(sum_{j>=q} C_j, sum_{j<q} C_j^2 + (sum_{j>=q} C_j)^2)``; for
    q beyond the realized support the pair degrades to ``(0, C^S)``.
    """
    if q < 0:
        raise ValueError("q must be >= 0")
    coefs = c.coefs
    tail = float(np.sum(coefs[q:]))
    head_sq = float(np.sum(coefs[:q] ** 2))
    return tail, head_sq + tail * tail
