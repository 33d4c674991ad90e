"""Finite time-value point configurations and the truncating summation map.

A configuration is a finite set of points (t_i, x_i) in [0,1] x (R \\ {0});
the empirical configuration of a process realization places mass at
(i/n, Z_i/a_n).  The summation map with threshold u sends a configuration
to the pair of step paths accumulating x_i and x_i^2 over points with
|x_i| > u, jumping at the t_i.

The map is continuous at configurations that avoid the degenerate set:
no points on the time boundary {0, 1}, no magnitude exactly at the
threshold, and no pair of opposite-sign points above the threshold that
share a time coordinate.  ``perturbation_continuity_check`` probes this
continuity empirically with small random displacements.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .cadlag import CadlagStep
from .linear_process import ProcessRealization
from .seeds import DOMAIN_PERTURBATION, rng_for
from .skorokhod import dist_product

__all__ = [
    "PointConfig", "empirical_pp", "summation_functional",
    "perturbation_continuity_check", "ContinuityReport",
]


@dataclass(frozen=True)
class PointConfig:
    """Finite configuration {(t_i, x_i)}; x_i never 0, t_i in [0, 1]."""

    points: np.ndarray  # shape (k, 2)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, 2)
        if len(pts) and (pts[:, 0].min() < 0.0 or pts[:, 0].max() > 1.0):
            raise ValueError("time coordinates must lie in [0, 1]")
        if np.any(pts[:, 1] == 0.0):
            raise ValueError("configurations cannot carry points with value 0")
        object.__setattr__(self, "points", pts)
        self.points.setflags(write=False)

    def __len__(self):
        return len(self.points)

    def to_json(self) -> str:
        return json.dumps({"points": self.points.tolist()})

    @classmethod
    def from_json(cls, s: str) -> "PointConfig":
        return cls(np.asarray(json.loads(s)["points"], dtype=float).reshape(-1, 2))


def empirical_pp(rz: ProcessRealization) -> PointConfig:
    """Points (i/n, Z_i/a_n) of a realization's innovation stretch.

    Exact zeros (a probability-zero event) are dropped with a warning so
    the configuration stays inside its state space.
    """
    n = rz.n
    z = rz.innovations[rz.coefs.j_max:]
    x = z / rz.a_n
    t = np.arange(1, n + 1) / n
    keep = x != 0.0
    if not keep.all():
        import warnings
        warnings.warn("dropping innovations that scaled to exactly zero")
    return PointConfig(np.column_stack((t[keep], x[keep])))


def summation_functional(cfg: PointConfig, u: float) -> tuple[CadlagStep, CadlagStep]:
    """Step paths accumulating x_i and x_i^2 over points with |x_i| > u.

    u = 0 is allowed for finite configurations (every point passes the
    strict threshold since values are never zero).
    """
    if u < 0.0:
        raise ValueError("u must be >= 0")
    pts = cfg.points
    keep = np.abs(pts[:, 1]) > u
    t = pts[keep, 0]
    x = pts[keep, 1]
    order = np.argsort(t, kind="stable")
    t, x = t[order], x[order]
    if len(t) and t[0] == 0.0:
        raise ValueError("summation paths need jump epochs in (0, 1]")
    sums = np.cumsum(x)
    sq = np.cumsum(x * x)
    merge = np.concatenate((t[1:] != t[:-1], [True])) if len(t) else np.empty(0, bool)
    return (CadlagStep(t[merge], sums[merge], 0.0),
            CadlagStep(t[merge], sq[merge], 0.0))


def check_lambda_membership(cfg: PointConfig, u: float, sep: float = 1e-12) -> str | None:
    """None if the configuration avoids the degenerate set, else the clause."""
    pts = cfg.points
    if len(pts) == 0:
        return None
    t, x = pts[:, 0], pts[:, 1]
    if np.any(t <= 0.0) or np.any(t >= 1.0):
        return "boundary: point mass on the time boundary {0, 1}"
    if np.any(np.abs(np.abs(x) - u) <= sep):
        return "threshold: point magnitude at the truncation level"
    big = np.abs(x) > u
    tb, xb = t[big], x[big]
    order = np.argsort(tb, kind="stable")
    tb, xb = tb[order], xb[order]
    same = tb[1:] == tb[:-1]
    if np.any(same & (np.sign(xb[1:]) != np.sign(xb[:-1]))):
        return "collision: opposite-sign points above the threshold share a time"
    return None


@dataclass(frozen=True)
class ContinuityReport:
    max_ratio: float        # worst observed distance / eps
    mean_distance: float
    trials: int
    eps: float


def perturbation_continuity_check(cfg: PointConfig, u: float, eps: float,
                                  trials: int, seed: int = 0) -> ContinuityReport:
    """Empirical continuity probe of the summation map at a configuration.

    Each trial displaces every point inside an L-inf ball and compares the
    two summation images in the product graph metric.  Time displacements
    use the full +-eps budget (graph distances absorb jump-time shifts
    one-for-one); value displacements are damped by the local sensitivity
    of the squared path and by the atom count, so the whole perturbation
    stays within one eps of output distance.  Draws that leave the
    continuity set (threshold crossing, sign collision, boundary exit)
    are resampled.

    Rejects configurations that violate the continuity-set clauses, and
    requires every magnitude to clear the threshold by more than eps so no
    admissible perturbation can cross it.
    """
    clause = check_lambda_membership(cfg, u)
    if clause is not None:
        raise ValueError(f"configuration outside the continuity set -- {clause}")
    pts = cfg.points
    if len(pts) == 0:
        raise ValueError("empty configuration has nothing to perturb")
    if np.any(np.abs(np.abs(pts[:, 1]) - u) <= eps):
        raise ValueError("point magnitudes must clear the threshold by more than eps")
    base = summation_functional(cfg, u)
    rng = rng_for(seed, DOMAIN_PERTURBATION)
    k = len(pts)
    damp = eps / (k * (1.0 + 2.0 * (np.abs(pts[:, 1]) + eps)))
    worst = 0.0
    total = 0.0
    for _ in range(trials):
        for _attempt in range(256):
            dt = rng.uniform(-eps, eps, k)
            dv = rng.uniform(-1.0, 1.0, k) * damp
            moved = np.column_stack((pts[:, 0] + dt, pts[:, 1] + dv))
            if np.any(moved[:, 1] == 0.0):
                continue
            cand = PointConfig(np.clip(moved, [0.0, -np.inf], [1.0, np.inf]))
            if check_lambda_membership(cand, u) is None \
                    and not np.any(np.abs(np.abs(cand.points[:, 1]) - u) <= 0.0):
                break
        else:
            raise RuntimeError("could not draw an admissible perturbation")
        d = dist_product(base, summation_functional(cand, u))
        worst = max(worst, d / eps)
        total += d
    return ContinuityReport(max_ratio=worst, mean_distance=total / trials,
                            trials=trials, eps=eps)
