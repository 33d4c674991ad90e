"""Piecewise-constant right-continuous functions on [0, 1] and their completed graphs.

A :class:`CadlagStep` is stored as an initial level plus an ordered list of
(jump time, new level) pairs with times in (0, 1].  Jumps at t = 0 are
disallowed; the initial level carries x(0).  Zero-height jumps are dropped
at construction so that equal functions have identical representations.

The completed graph of a step function is the union of its horizontal
plateaus with the vertical segments that fill each jump; it is an
axis-aligned polyline spanning t in [0, 1].  All metric computations work
on this polyline form.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

__all__ = ["CadlagStep", "CompletedGraph", "make_step", "completed_graph"]


@dataclass(frozen=True)
class CadlagStep:
    """Right-continuous step function on [0, 1].

    Attributes
    ----------
    times : ndarray
        Strictly increasing jump epochs, all in (0, 1].
    values : ndarray
        Level immediately after each jump; ``len(values) == len(times)``.
    initial_value : float
        Level on [0, first jump).
    """

    times: np.ndarray
    values: np.ndarray
    initial_value: float = 0.0

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or v.ndim != 1 or len(t) != len(v):
            raise ValueError("times and values must be 1-d and of equal length")
        if len(t) and (t[0] <= 0.0 or t[-1] > 1.0 or np.any(np.diff(t) <= 0.0)):
            raise ValueError("jump times must be strictly increasing and in (0, 1]")
        if not np.all(np.isfinite(v)) or not np.isfinite(self.initial_value):
            raise ValueError("levels must be finite")
        # canonical form: drop zero-height jumps
        levels = np.concatenate(([self.initial_value], v))
        keep = np.diff(levels) != 0.0
        object.__setattr__(self, "times", t[keep])
        object.__setattr__(self, "values", v[keep])
        object.__setattr__(self, "initial_value", float(self.initial_value))
        self.times.setflags(write=False)
        self.values.setflags(write=False)

    # -- evaluation ---------------------------------------------------------

    def __call__(self, t: float) -> float:
        return self.eval(t)

    def eval(self, t: float) -> float:
        """Right-continuous value x(t), t in [0, 1]."""
        if not 0.0 <= t <= 1.0:
            raise ValueError(f"t={t} outside [0, 1]")
        k = np.searchsorted(self.times, t, side="right")
        return float(self.values[k - 1]) if k else self.initial_value

    def eval_left(self, t: float) -> float:
        """Left limit x(t-), t in (0, 1]."""
        if not 0.0 < t <= 1.0:
            raise ValueError(f"t={t} outside (0, 1]")
        k = np.searchsorted(self.times, t, side="left")
        return float(self.values[k - 1]) if k else self.initial_value

    def eval_grid(self, ts: np.ndarray) -> np.ndarray:
        """Vectorized right-continuous evaluation."""
        ts = np.asarray(ts, dtype=float)
        if ts.size and (ts.min() < 0.0 or ts.max() > 1.0):
            raise ValueError("grid points outside [0, 1]")
        idx = np.searchsorted(self.times, ts, side="right")
        levels = np.concatenate(([self.initial_value], self.values))
        return levels[idx]

    # -- structure ----------------------------------------------------------

    @property
    def final_value(self) -> float:
        return float(self.values[-1]) if len(self.values) else self.initial_value

    def is_nondecreasing(self) -> bool:
        levels = np.concatenate(([self.initial_value], self.values))
        return bool(np.all(np.diff(levels) >= 0.0))

    def shifted(self, c: float) -> "CadlagStep":
        return CadlagStep(self.times, self.values + c, self.initial_value + c)

    # -- serialization ------------------------------------------------------

    def to_json(self) -> str:
        return json.dumps(
            {"initial": self.initial_value,
             "jumps": [[float(t), float(v)] for t, v in zip(self.times, self.values)]}
        )

    @classmethod
    def from_json(cls, s: str) -> "CadlagStep":
        d = json.loads(s)
        jumps = d.get("jumps", [])
        return make_step(d["initial"], [(t, v) for t, v in jumps])

    def sample_csv(self, grid: np.ndarray) -> str:
        """CSV of (t, x(t)) rows on a user grid."""
        rows = ["t,x"]
        for t, x in zip(grid, self.eval_grid(np.asarray(grid, float))):
            rows.append(f"{float(t)!r},{float(x)!r}")
        return "\n".join(rows) + "\n"


def make_step(initial: float, jumps) -> CadlagStep:
    """Build a step function from an initial level and (time, new_level) pairs."""
    if len(jumps) == 0:
        return CadlagStep(np.empty(0), np.empty(0), float(initial))
    times = np.array([t for t, _ in jumps], dtype=float)
    values = np.array([v for _, v in jumps], dtype=float)
    return CadlagStep(times, values, float(initial))


@dataclass(frozen=True)
class CompletedGraph:
    """Axis-aligned polyline form of a completed step-function graph.

    ``segments`` has one row (t0, v0, t1, v1) per segment, ordered along the
    graph.  Horizontal rows have t0 < t1 and v0 == v1; vertical rows have
    t0 == t1 and v0 != v1.  Consecutive rows share an endpoint and the
    projection onto the time axis is exactly [0, 1].
    """

    segments: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.segments.setflags(write=False)

    def __len__(self) -> int:
        return len(self.segments)

    def contains(self, t: float, v: float) -> bool:
        """Exact membership test for a point in the polyline (zero tolerance)."""
        t0, v0, t1, v1 = (self.segments[:, i] for i in range(4))
        on_h = (v0 == v) & (t0 <= t) & (t <= t1) & (t0 < t1)
        lo, hi = np.minimum(v0, v1), np.maximum(v0, v1)
        on_v = (t0 == t) & (t0 == t1) & (lo <= v) & (v <= hi)
        return bool(np.any(on_h | on_v))


def completed_graph(x: CadlagStep) -> CompletedGraph:
    """Plateaus plus one vertical connector per jump, in graph order."""
    segs = []
    prev_t = 0.0
    prev_v = x.initial_value
    for t, v in zip(x.times, x.values):
        if prev_t < t:
            segs.append((prev_t, prev_v, t, prev_v))
        segs.append((t, prev_v, t, v))
        prev_t, prev_v = t, v
    if prev_t < 1.0:
        segs.append((prev_t, prev_v, 1.0, prev_v))
    return CompletedGraph(np.array(segs, dtype=float).reshape(-1, 4))
