"""End-to-end convergence experiments and result emission.

Ensembles are seed-indexed: replication ``i`` of an experiment draws its
innovations and coefficients from streams keyed by ``i`` alone, so results
are independent of batch layout and worker count, and rerunning a spec
reproduces every sample bit-for-bit.
"""
from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import backend
from .coefficients import CoefModel, default_jmax
from .heavy_tail import TailModel, karamata_limit, norm_seq, sample_from, truncated_moment
from .ksstats import KsReport, ks_report
from .limit_process import (CharTriple, default_n_terms, increments_marginals,
                            series_marginals, w_tail_mean)
from .seeds import DOMAIN_COEFFICIENTS, DOMAIN_CONTROL, DOMAIN_INNOVATIONS, rng_for

__all__ = [
    "ExperimentSpec", "run_marginal_convergence", "run_self_normalized",
    "run_karamata_suite", "emit", "prelimit_marginals", "SelfNormResult",
    "KaramataRow", "matched_gaussian",
]

# Stream-index blocks keeping the coefficient draws of limit ensembles and
# of independent experiment repetitions disjoint from everything else.
_LIMIT_COEF_BLOCK = 1 << 32
_TREND_BLOCK = 1 << 40


@dataclass(frozen=True)
class ExperimentSpec:
    tail: TailModel
    coef: CoefModel
    n_grid: tuple = (1_000, 10_000, 100_000)
    reps: int = 10_000
    t_grid: tuple = (0.25, 0.5, 1.0)
    limit_mode: str = "series"
    seed: int = 0
    n_terms: int | None = None
    tail_bound: float | None = None
    trend_reps: int = 3
    workers: int = 1

    def __post_init__(self):
        if self.limit_mode not in ("series", "increments"):
            raise ValueError("limit_mode must be 'series' or 'increments'")
        if self.reps < 2:
            raise ValueError("reps must be >= 2")
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        object.__setattr__(self, "t_grid", tuple(float(t) for t in self.t_grid))

    def resolved_n_terms(self) -> int:
        return self.n_terms if self.n_terms is not None else default_n_terms(self.tail.alpha)

    def resolved_tail_bound(self) -> float:
        if self.tail_bound is not None:
            return self.tail_bound
        # declared bound covering the expected dropped mass of the default
        # series length (the residual-mean correction is applied on top)
        return 2.0 * w_tail_mean(self.tail.alpha, self.resolved_n_terms())

    def to_json(self) -> str:
        d = {
            "tail": json.loads(self.tail.to_json()),
            "coef": json.loads(self.coef.to_json()),
            "n_grid": list(self.n_grid),
            "reps": self.reps,
            "t_grid": list(self.t_grid),
            "limit_mode": self.limit_mode,
            "seed": self.seed,
            "n_terms": self.n_terms,
            "tail_bound": self.tail_bound,
            "trend_reps": self.trend_reps,
            "workers": self.workers,
        }
        return json.dumps(d, sort_keys=True)

    @classmethod
    def from_json(cls, s: str) -> "ExperimentSpec":
        d = json.loads(s)
        tail = TailModel(alpha=d["tail"]["alpha"], p=d["tail"]["p"])
        coef = CoefModel.from_json(json.dumps(d["coef"]))
        return cls(tail=tail, coef=coef, n_grid=tuple(d["n_grid"]), reps=d["reps"],
                   t_grid=tuple(d["t_grid"]), limit_mode=d["limit_mode"],
                   seed=d["seed"], n_terms=d["n_terms"], tail_bound=d["tail_bound"],
                   trend_reps=d["trend_reps"], workers=d.get("workers", 1))


# -- pre-limit ensembles -------------------------------------------------------

def _chunk_stats(args):
    """Partial-sum statistics for replications [lo, hi); worker-safe."""
    (tail, coef_model, n, j_max, idx, seed, lo, hi, stream_base, batch) = args
    idx = np.asarray(idx, dtype=np.int64)
    out_s = np.empty((hi - lo, len(idx)))
    out_q = np.empty((hi - lo, len(idx)))
    pos = 0
    width = n + j_max
    lags_plus = j_max + 1
    while pos < hi - lo:
        b = min(batch, hi - lo - pos)
        z = np.empty((b, width))
        c = np.empty((b, lags_plus))
        for k in range(b):
            rep = lo + pos + k
            z[k] = sample_from(tail, width, rng_for(seed, DOMAIN_INNOVATIONS,
                                                    stream_base + rep))
            c[k] = coef_model.sample(j_max, rng_for(seed, DOMAIN_COEFFICIENTS,
                                                    stream_base + rep))
        s, q = backend.batch_partial_stats(z, c, idx)
        out_s[pos:pos + b] = s
        out_q[pos:pos + b] = q
        pos += b
    return out_s, out_q


def prelimit_marginals(tail: TailModel, coef_model: CoefModel, n: int, reps: int,
                       t_grid, seed: int, stream_base: int = 0,
                       workers: int = 1, j_max: int | None = None):
    """Ensembles of (V_n(t), W_n(t), S_n(t)) at the requested epochs.

    Returns (v, w, s) arrays of shape (reps, len(t_grid)).  Epochs with
    floor(n t) = 0 produce exact zeros.  One replication = one coefficient
    realization plus one innovation stretch.
    """
    t_grid = np.atleast_1d(np.asarray(t_grid, dtype=float))
    jm = default_jmax(coef_model, tail.alpha) if j_max is None else j_max
    k_idx = np.floor(n * t_grid + 1e-9).astype(np.int64)
    pos_mask = k_idx >= 1
    idx_all = np.unique(np.concatenate((k_idx[pos_mask], [n])))
    # memory cap ~64 MB per innovation block
    batch = max(1, min(reps, int(8e6 / max(1, n + jm))))
    bounds = np.linspace(0, reps, max(1, workers) + 1).astype(int)
    jobs = [(tail, coef_model, n, jm, idx_all, seed, int(lo), int(hi),
             stream_base, batch)
            for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_chunk_stats, jobs))
    else:
        parts = [_chunk_stats(j) for j in jobs]
    sums = np.concatenate([p[0] for p in parts], axis=0)
    sqs = np.concatenate([p[1] for p in parts], axis=0)

    a_n = norm_seq(tail, n)
    zeta_sq = sqs[:, int(np.searchsorted(idx_all, n))]
    v = np.zeros((reps, len(t_grid)))
    w = np.zeros((reps, len(t_grid)))
    s = np.zeros((reps, len(t_grid)))
    zeta = np.sqrt(zeta_sq)
    for col, (k, ok) in enumerate(zip(k_idx, pos_mask)):
        if not ok:
            continue
        j = int(np.searchsorted(idx_all, k))
        v[:, col] = sums[:, j] / a_n
        w[:, col] = sqs[:, j] / (a_n * a_n)
        s[:, col] = sums[:, j] / zeta
    return v, w, s


def _limit_coef_aggregates(coef_model: CoefModel, alpha: float, reps: int,
                           seed: int, stream_base: int = 0):
    jm = default_jmax(coef_model, alpha)
    c1 = np.empty(reps)
    c2 = np.empty(reps)
    for i in range(reps):
        rng = rng_for(seed, DOMAIN_COEFFICIENTS,
                      _LIMIT_COEF_BLOCK + stream_base + i)
        c = coef_model.sample(jm, rng)
        c1[i] = c.sum()
        c2[i] = (c ** 2).sum()
    return c1, c2


def _limit_marginals(spec: ExperimentSpec, ts, stream_base: int = 0):
    """(c1 V(t), c2 W(t)) ensembles in the requested mode."""
    tail = spec.tail
    c1, c2 = _limit_coef_aggregates(spec.coef, tail.alpha, spec.reps, spec.seed,
                                    stream_base)
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if spec.limit_mode == "series":
        v, w = series_marginals(tail.alpha, tail.p, tail.r, ts,
                                spec.resolved_n_terms(), spec.reps, spec.seed,
                                tail_bound=spec.resolved_tail_bound(),
                                stream_base=stream_base)
    else:
        v = increments_marginals(CharTriple.sum_process(tail), ts, spec.reps,
                                 spec.seed)
        w = increments_marginals(CharTriple.square_process(tail), ts, spec.reps,
                                 spec.seed + 1)
    return c1[:, None] * v, c2[:, None] * w, c1, c2


def run_marginal_convergence(spec: ExperimentSpec) -> list[KsReport]:
    """Compare pre-limit marginals at the largest horizon with limit draws.

    One report per epoch and coordinate; epochs at t = 0 are degenerate
    and reported with statistic 0.
    """
    n = max(spec.n_grid)
    ts = [t for t in spec.t_grid if t > 0.0]
    reports = []
    for t in spec.t_grid:
        if t <= 0.0:
            reports.append(KsReport(statistic=0.0, m=spec.reps, n=spec.reps,
                                    criticals={lv: 1.0 for lv in (0.1, 0.05, 0.01)},
                                    label=f"V(t={t}) degenerate"))
    if not ts:
        return reports
    v_pre, w_pre, _ = prelimit_marginals(spec.tail, spec.coef, n, spec.reps,
                                         ts, spec.seed, workers=spec.workers)
    v_lim, w_lim, _, _ = _limit_marginals(spec, ts)
    for k, t in enumerate(ts):
        reports.append(ks_report(v_pre[:, k], v_lim[:, k],
                                 label=f"V(t={t}) n={n} vs {spec.limit_mode}",
                                 extra={"t": t, "coordinate": "V", "horizon": n}))
        reports.append(ks_report(w_pre[:, k], w_lim[:, k],
                                 label=f"W(t={t}) n={n} vs {spec.limit_mode}",
                                 extra={"t": t, "coordinate": "W", "horizon": n}))
    return reports


@dataclass(frozen=True)
class SelfNormResult:
    reports: list            # KsReports of repetition 0, every (n, t)
    trend: dict              # n -> median KS statistic at t = 1 over repetitions
    trend_ok: bool
    spec: ExperimentSpec


def run_self_normalized(spec: ExperimentSpec) -> SelfNormResult:
    """Self-normalized marginals against the joint series limit statistic.

    Requires series mode (the ratio needs the joint law of V and W(1)).
    The trend is the per-horizon median of the t = 1 statistic over
    ``trend_reps`` independent repetitions; it must be nonincreasing for
    ``trend_ok``.
    """
    if spec.limit_mode != "series":
        raise ValueError("self-normalized comparisons need the joint series mode; "
                         "increments mode only provides marginal laws")
    ts = np.array(sorted({*[t for t in spec.t_grid if t > 0.0], 1.0}))
    tail = spec.tail
    reports = []
    stats_t1 = {n: [] for n in spec.n_grid}
    for rep in range(max(1, spec.trend_reps)):
        base = rep * _TREND_BLOCK
        c1, c2 = _limit_coef_aggregates(spec.coef, tail.alpha, spec.reps,
                                        spec.seed, base)
        v_lim, w_lim = series_marginals(tail.alpha, tail.p, tail.r, ts,
                                        spec.resolved_n_terms(), spec.reps,
                                        spec.seed,
                                        tail_bound=spec.resolved_tail_bound(),
                                        stream_base=base)
        w1 = w_lim[:, -1]
        s_lim = c1[:, None] * v_lim / np.sqrt(c2 * w1)[:, None]
        for n in spec.n_grid:
            _, _, s_pre = prelimit_marginals(tail, spec.coef, n, spec.reps, ts,
                                             spec.seed, stream_base=base,
                                             workers=spec.workers)
            for k, t in enumerate(ts):
                r = ks_report(s_pre[:, k], s_lim[:, k],
                              label=f"S(t={t}) n={n} rep={rep}",
                              extra={"t": float(t), "horizon": n, "rep": rep})
                if rep == 0:
                    reports.append(r)
                if t == 1.0:
                    stats_t1[n].append(r.statistic)
    trend = {n: float(np.median(vals)) for n, vals in stats_t1.items()}
    ordered = [trend[n] for n in sorted(trend)]
    trend_ok = all(a >= b - 1e-12 for a, b in zip(ordered[:-1], ordered[1:]))
    return SelfNormResult(reports=reports, trend=trend, trend_ok=trend_ok, spec=spec)


# -- truncated-moment suite ------------------------------------------------------

@dataclass(frozen=True)
class KaramataRow:
    kind: str
    n: int
    mc: float
    se: float          # analytic standard error of the estimator
    target: float      # exact finite-n value
    limit: float       # asymptotic constant
    ok: bool           # |mc - target| <= 3 se
    fragile: bool = False  # infinite-variance estimator; descriptive only


def run_karamata_suite(tail: TailModel, n_values=(1_000, 10_000, 100_000),
                       draws: int = 1_000_000, seed: int = 0) -> list[KaramataRow]:
    """Monte Carlo check of the truncated-moment functionals at u = 1.

    The inside moments are bounded statistics whose estimator variances
    are themselves exact truncated-moment expressions, so the reported
    standard errors are analytic (the empirical variance would hinge on
    the handful of draws near the truncation level).  The outside first
    moment only exists for index > 1 and its estimator has infinite
    variance, so its rows are marked fragile and carry descriptive value
    only, with the empirical spread in the se column.
    """
    kinds = ["first_inside", "second_inside"]
    if tail.alpha > 1.0:
        kinds.append("first_outside")
    rows = []
    for i, n in enumerate(n_values):
        rng = rng_for(seed, DOMAIN_CONTROL, i)
        z = sample_from(tail, draws, rng)
        a_n = norm_seq(tail, n)
        zn = z / a_n
        inside = np.abs(z) <= a_n
        tm = {k: truncated_moment(tail, n, 1.0, k)
              for k in ("first_inside", "second_inside", "fourth_inside")}
        for kind in kinds:
            if kind == "first_inside":
                vals = n * np.where(inside, zn, 0.0)
                var = n * tm["second_inside"] - tm["first_inside"] ** 2
            elif kind == "second_inside":
                vals = n * np.where(inside, zn * zn, 0.0)
                var = n * tm["fourth_inside"] - tm["second_inside"] ** 2
            else:
                vals = n * np.where(~inside, zn, 0.0)
                var = None
            mc = float(vals.mean())
            if var is None:
                se = float(vals.std(ddof=1) / np.sqrt(draws))
            else:
                se = float(np.sqrt(var / draws))
            target = tm.get(kind, truncated_moment(tail, n, 1.0, kind)
                            if tail.alpha > 1.0 else 0.0)
            rows.append(KaramataRow(kind=kind, n=n, mc=mc, se=se, target=target,
                                    limit=karamata_limit(tail, kind),
                                    ok=abs(mc - target) <= 3.0 * se,
                                    fragile=kind == "first_outside"))
    return rows


def matched_gaussian(sample: np.ndarray, seed: int = 0) -> np.ndarray:
    """Gaussian ensemble whose median absolute value matches the sample's."""
    med = float(np.median(np.abs(sample)))
    scale = med / 0.6744897501960817  # Phi^{-1}(3/4)
    rng = rng_for(seed, DOMAIN_CONTROL, 999)
    return rng.normal(0.0, scale, len(sample))


# -- emission ---------------------------------------------------------------------

def _fmt(x) -> str:
    return repr(float(x)) if isinstance(x, (float, np.floating)) else str(x)


def emit(results, fmt: str, out_dir: str, spec: ExperimentSpec | None = None,
         name: str = "results", timestamp: str | None = None) -> str:
    """Write KS reports or suite rows; returns the file path.

    Every file starts with a provenance header: a timestamp comment line
    (excluded from byte-level determinism) followed by the full spec.
    """
    os.makedirs(out_dir, exist_ok=True)
    rows = [r.row() if isinstance(r, KsReport) else r.__dict__ for r in results]
    header = spec.to_json() if spec is not None else "{}"
    stamp = timestamp if timestamp is not None else _now()
    if fmt == "json":
        path = os.path.join(out_dir, f"{name}.json")
        with open(path, "w") as fh:
            fh.write(f"// generated_at {stamp}\n")
            json.dump({"spec": json.loads(header), "rows": rows}, fh,
                      sort_keys=True, default=float)
            fh.write("\n")
        return path
    if fmt != "csv":
        raise ValueError("format must be 'csv' or 'json'")
    path = os.path.join(out_dir, f"{name}.csv")
    cols = sorted({k for row in rows for k in row})
    with open(path, "w") as fh:
        fh.write(f"# generated_at {stamp}\n")
        fh.write(f"# spec {header}\n")
        fh.write(",".join(cols) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row.get(c, "")) for c in cols) + "\n")
    return path


def _now() -> str:
    import datetime
    return datetime.datetime.now(datetime.timezone.utc).isoformat()
