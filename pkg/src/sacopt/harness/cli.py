"""Command-line driver.

    sacopt run        --config cfg.json [--seed S] [--workers K] [--out DIR]
    sacopt sweep      --config cfg.json ...
    sacopt conditions --config cfg.json ...
    sacopt theory     --config cfg.json ...

Exit codes: 0 success, 2 configuration error, 3 at least one quantile was
unattainable within the budget.
"""
from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .. import theory
from ..engine import default_schedule
from ..problems import SphereProblem, sublevel_measure_sphere
from .conditions import condition_report
from .config import ConfigError, load_config, save_config
from .paa import build_problem, estimate_paa, scaling_sweep, success_probability
from .report import emit_report

EXIT_OK, EXIT_CONFIG, EXIT_UNATTAINABLE = 0, 2, 3


def _metadata(cfg, command: str) -> dict:
    return {"command": command, "problem": f"{cfg.problem} n={cfg.n}", "delta": cfg.delta,
            "trials": cfg.trials, "budget": cfg.budget, "seed": cfg.seed, "sample_scale": cfg.sample_scale}


def theory_rows(cfg) -> list[dict]:
    """Reference values for every (algorithm, alpha*) pair of a config.

    The query-bound column assumes nothing about the learned hypotheses
    (``Pr_h = 0``) and is therefore a worst case for the given schedule.
    The success lower bound assumes zero training error and exact samplers.
    """
    problem = build_problem(cfg)
    rows = []
    for alg in cfg.algorithms:
        for a in cfg.alpha_stars:
            pr_u = success_probability(problem, a)
            uni = theory.uniform_paa_complexity(pr_u, cfg.delta) if pr_u is not None else None
            row = {"algorithm": alg, "alpha_star": a, "pr_u": pr_u,
                   "uniform_asymptotic": uni.asymptotic if uni else None,
                   "uniform_exact": uni.exact_quantile if uni else None,
                   "T": None, "lam": None, "m0": None, "m_t": None, "total_queries": None,
                   "vc_bound_m_t": None, "query_bound_worst": None, "success_lb": None, "success_lb_vacuous": None}
            if alg != "uniform":
                s = default_schedule(a, cfg.n, alg, cfg.sample_scale, delta=cfg.delta)
                d = cfg.n + 1
                row.update(T=s.T, lam=s.lam, m0=s.m[0], m_t=s.m[1], total_queries=s.total_queries,
                           vc_bound_m_t=theory.vc_bound(max(s.m[1], d), d, s.eta, 0.0))
                if pr_u is not None:
                    recs = [theory.IterationRecord(m, 0.0) for m in s.m[1:]]
                    inp = theory.BoundInputs(pr_u, 0.0, s.lam, cfg.delta, s.eta, s.m[0], d, recs)
                    row["query_bound_worst"] = theory.theorem1_bound(inp)
                if isinstance(problem, SphereProblem) and all(m >= d for m in s.m[1:]):
                    measures = [sublevel_measure_sphere(problem, at) for at in s.alphas]
                    if all(m.exact for m in measures):
                        recs = [theory.IterationRecord(m, mm.value) for m, mm in zip(s.m[1:], measures)]
                        inp = theory.BoundInputs(pr_u or 0.0, 0.0, s.lam, cfg.delta, s.eta, s.m[0], d, recs)
                        lb = theory.theorem4_lower_bound(inp, sublevel_measure_sphere(problem, a).value)
                        row.update(success_lb=lb.value, success_lb_vacuous=lb.flagged)
            rows.append(row)
    return rows


def _write_theory(rows, path: Path):
    cols = list(rows[0]) if rows else ["algorithm", "alpha_star"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow(["" if r[c] is None else (repr(r[c]) if isinstance(r[c], float) else
                                                  str(int(r[c])) if isinstance(r[c], bool) else str(r[c]))
                        for c in cols])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sacopt", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in [("run", "estimate PAA quantiles for every configured level"),
                       ("sweep", "estimate quantiles and fit log-log scaling slopes"),
                       ("conditions", "check learner conditions on diagnostic runs"),
                       ("theory", "tabulate bound values for the configured schedules")]:
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True, help="JSON experiment config")
        p.add_argument("--seed", type=int, help="override the master seed")
        p.add_argument("--workers", type=int, default=1, help="worker processes for trials")
        p.add_argument("--out", help="override the output directory")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        changes = {}
        if args.seed is not None:
            changes["seed"] = args.seed
        if args.out is not None:
            changes["out"] = args.out
        if changes:
            cfg = cfg.replace(**changes)
        if args.workers < 1:
            raise ConfigError("--workers must be >= 1")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    save_config(cfg, out / "config.json")
    meta = _metadata(cfg, args.command)

    try:
        if args.command == "theory":
            rows = theory_rows(cfg)
            _write_theory(rows, out / "theory.csv")
            for r in rows:
                print(", ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}" for k, v in r.items()))
            return EXIT_OK
        if args.command == "conditions":
            rows = condition_report(cfg)
            emit_report([], [], rows, out, metadata=meta)
            print((out / "summary.txt").read_text(), end="")
            return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "run":
        estimates, trials = estimate_paa(cfg, args.workers)
        slopes = []
    else:
        estimates, slopes, trials = scaling_sweep(cfg, args.workers)
    emit_report(estimates, slopes, [], out, trials=trials, budget=cfg.budget, metadata=meta)
    print((out / "summary.txt").read_text(), end="")
    return EXIT_OK if all(e.valid for e in estimates) else EXIT_UNATTAINABLE


if __name__ == "__main__":
    sys.exit(main())
