"""Command-line entry point.

Exit codes: 0 when every verdict passes, 1 when any comparison rejects,
2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .cadlag import CadlagStep
from .coefficients import CoefModel, default_jmax, sample_coefs
from .harness import (ExperimentSpec, emit, run_karamata_suite,
                      run_marginal_convergence, run_self_normalized)
from .heavy_tail import TailModel
from .limit_process import (CharTriple, default_n_terms, increments_marginals,
                            series_marginals)
from .linear_process import paths, realize, self_normalized
from .skorokhod import dist_m2, dist_uniform


def _tail_from(args) -> TailModel:
    return TailModel(alpha=args.alpha, p=args.p)


def _coef_from(args) -> CoefModel:
    return CoefModel.from_json(args.coef_model)


def _load_spec(args) -> ExperimentSpec:
    if args.spec:
        with open(args.spec) as fh:
            return ExperimentSpec.from_json(fh.read())
    return ExperimentSpec(tail=_tail_from(args), coef=_coef_from(args),
                          seed=args.seed, reps=args.reps)


def _cmd_simulate(args) -> int:
    tail = _tail_from(args)
    model = _coef_from(args)
    j_max = args.jmax if args.jmax is not None else default_jmax(model, tail.alpha)
    coefs = sample_coefs(model, j_max, args.coef_seed)
    rz = realize(tail, coefs, args.n, args.seed)
    pp = paths(rz)
    sn = self_normalized(rz)
    os.makedirs(args.out, exist_ok=True)
    manifest = {
        "tail": json.loads(tail.to_json()),
        "coef_model": json.loads(model.to_json()),
        "n": args.n, "seed": args.seed, "coef_seed": args.coef_seed,
        "j_max": j_max, "a_n": rz.a_n,
    }
    with open(os.path.join(args.out, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, sort_keys=True)
        fh.write("\n")
    for name, step in (("v", pp.v), ("w", pp.w), ("s", sn)):
        with open(os.path.join(args.out, f"path_{name}.json"), "w") as fh:
            fh.write(step.to_json() + "\n")
    grid = np.arange(args.n + 1) / args.n
    rows = ["t,v,w,s"]
    for t, v, w, s in zip(grid, pp.v.eval_grid(grid), pp.w.eval_grid(grid),
                          sn.eval_grid(grid)):
        rows.append(f"{float(t)!r},{float(v)!r},{float(w)!r},{float(s)!r}")
    with open(os.path.join(args.out, "paths.csv"), "w") as fh:
        fh.write("\n".join(rows) + "\n")
    print(os.path.join(args.out, "paths.csv"))
    return 0


def _cmd_metric(args) -> int:
    with open(args.path1) as fh:
        x1 = CadlagStep.from_json(fh.read())
    with open(args.path2) as fh:
        x2 = CadlagStep.from_json(fh.read())
    res = dist_m2(x1, x2)
    out = {"d_m2": res.value, "d_uniform": dist_uniform(x1, x2),
           "witness": res.witness}
    print(json.dumps(out))
    return 0


def _cmd_limit(args) -> int:
    tail = _tail_from(args)
    n_terms = args.n_terms if args.n_terms is not None else default_n_terms(tail.alpha)
    if args.mode == "series":
        v, w = series_marginals(tail.alpha, tail.p, tail.r, [1.0], n_terms,
                                args.reps, args.seed,
                                tail_bound=args.tail_bound
                                if args.tail_bound is not None else np.inf)
    else:
        v = increments_marginals(CharTriple.sum_process(tail), [1.0], args.reps,
                                 args.seed)
        w = increments_marginals(CharTriple.square_process(tail), [1.0],
                                 args.reps, args.seed, stream=1)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, f"limit_{args.mode}.csv")
    with open(path, "w") as fh:
        fh.write("v1,w1\n")
        for a, b in zip(v[:, 0], w[:, 0]):
            fh.write(f"{float(a)!r},{float(b)!r}\n")
    print(path)
    return 0


def _verdict_exit(reports) -> int:
    return 1 if any(r.reject(0.01) for r in reports) else 0


def _cmd_converge(args) -> int:
    spec = _load_spec(args)
    reports = run_marginal_convergence(spec)
    emit(reports, args.format, args.out, spec=spec, name="converge")
    for r in reports:
        print(f"{r.label}: D={r.statistic:.5f} crit1%={r.criticals[0.01]:.5f} "
              f"-> {r.verdict}")
    return _verdict_exit(reports)


def _cmd_selfnorm(args) -> int:
    spec = _load_spec(args)
    result = run_self_normalized(spec)
    emit(result.reports, args.format, args.out, spec=spec, name="selfnorm")
    for r in result.reports:
        print(f"{r.label}: D={r.statistic:.5f} crit1%={r.criticals[0.01]:.5f} "
              f"-> {r.verdict}")
    print(f"trend (median KS at t=1 by horizon): {result.trend} "
          f"nonincreasing={result.trend_ok}")
    return 1 if (not result.trend_ok or _verdict_exit(result.reports)) else 0


def _cmd_karamata(args) -> int:
    tail = _tail_from(args)
    rows = run_karamata_suite(tail, draws=args.draws, seed=args.seed)
    emit(rows, args.format, args.out, name="karamata")
    bad = 0
    for row in rows:
        flag = "ok" if row.ok else ("fragile" if row.fragile else "FAIL")
        print(f"{row.kind} n={row.n}: mc={row.mc:.5f} se={row.se:.5f} "
              f"target={row.target:.5f} limit={row.limit:.5f} {flag}")
        bad += (not row.ok and not row.fragile)
    return 1 if bad else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="heavypaths")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, coef=True):
        p.add_argument("--alpha", type=float, default=0.5)
        p.add_argument("--p", type=float, default=0.5)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default="out")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        if coef:
            p.add_argument("--coef-model", default='{"kind": "deterministic_list", "values": [1.0]}')
            p.add_argument("--coef-seed", type=int, default=0)

    p = sub.add_parser("simulate", help="realize one linear process and dump paths")
    common(p)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--jmax", type=int, default=None)
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("metric", help="graph distances between two path files")
    p.add_argument("path1")
    p.add_argument("path2")
    p.set_defaults(fn=_cmd_metric)

    p = sub.add_parser("limit", help="sample the limit pair (V(1), W(1))")
    common(p, coef=False)
    p.add_argument("--mode", choices=("increments", "series"), default="series")
    p.add_argument("--n-terms", type=int, default=None)
    p.add_argument("--tail-bound", type=float, default=None)
    p.add_argument("--reps", type=int, default=1000)
    p.set_defaults(fn=_cmd_limit)

    p = sub.add_parser("converge", help="pre-limit vs limit marginal comparison")
    common(p)
    p.add_argument("--spec", default=None)
    p.add_argument("--reps", type=int, default=2000)
    p.set_defaults(fn=_cmd_converge)

    p = sub.add_parser("selfnorm", help="self-normalized comparison and trend")
    common(p)
    p.add_argument("--spec", default=None)
    p.add_argument("--reps", type=int, default=2000)
    p.set_defaults(fn=_cmd_selfnorm)

    p = sub.add_parser("karamata", help="truncated-moment Monte Carlo suite")
    common(p, coef=False)
    p.add_argument("--draws", type=int, default=1_000_000)
    p.set_defaults(fn=_cmd_karamata)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
