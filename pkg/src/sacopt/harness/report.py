"""CSV and plain-text outputs of the experiment harness.

Files written into the output directory:

``trials.csv``      algorithm, alpha_star, trial, seed, first_hit, censored
``estimates.csv``   one ``estimate`` row per (algorithm, alpha*) and one
                    ``slope`` row per algorithm
``conditions.csv``  per-iteration condition checks (only when given)
``summary.txt``     empirical quantiles next to theory reference values

Floats are written with ``repr`` so that output is byte-stable.
"""
from __future__ import annotations

import csv
import math
from pathlib import Path

TRIAL_COLUMNS = ["algorithm", "alpha_star", "trial", "seed", "first_hit", "censored"]
ESTIMATE_COLUMNS = ["kind", "algorithm", "alpha_star", "delta", "quantile", "hit_fraction", "censored",
                    "trials", "theory", "slope", "ci_low", "ci_high", "note"]
CONDITION_COLUMNS = ["algorithm", "alpha_star", "run", "t", "alpha_t", "positives", "train_error", "radius",
                     "indep_lhs", "indep_rhs", "indep_z", "violation", "violation_se", "vol_h", "vol_h_se",
                     "vol_alpha_t", "vol_alpha_t_se", "one_side_ok", "volume_ok"]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write(path: Path, columns, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def emit_report(estimates, slopes, conditions, path, trials=(), budget: int | None = None,
                metadata: dict | None = None) -> list[Path]:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    p = out / "trials.csv"
    _write(p, TRIAL_COLUMNS, ((t.algorithm, t.alpha_star, t.trial, t.seed,
                               budget if t.first_hit is None and budget is not None else t.first_hit,
                               t.censored) for t in trials))
    written.append(p)

    rows = [("estimate", e.algorithm, e.alpha_star, e.delta, e.quantile, e.hit_fraction, e.censored,
             len(e.first_hits), e.theory, None, None, None, e.note) for e in estimates]
    rows += [("slope", s.algorithm, None, None, None, None, None, None, None, s.slope, s.ci_low, s.ci_high,
              "gaps: " + " ".join(repr(g) for g in s.gaps) if s.gaps else "") for s in slopes]
    p = out / "estimates.csv"
    _write(p, ESTIMATE_COLUMNS, rows)
    written.append(p)

    if conditions:
        p = out / "conditions.csv"
        _write(p, CONDITION_COLUMNS, ((c.algorithm, c.alpha_star, c.run, c.t, c.alpha_t, c.positives,
                                       c.train_error, c.radius, c.indep_lhs, c.indep_rhs, c.indep_z,
                                       c.violation, c.violation_se, c.vol_h, c.vol_h_se, c.vol_alpha_t,
                                       c.vol_alpha_t_se, c.one_side_ok, c.volume_ok) for c in conditions))
        written.append(p)

    p = out / "summary.txt"
    p.write_text(summary_text(estimates, slopes, conditions, metadata))
    written.append(p)
    return written


def speedup(estimates, baseline: str = "uniform", other: str = "sac1") -> tuple[float, float] | None:
    """``(alpha*, baseline quantile / other quantile)`` at the smallest shared alpha*."""
    base = {e.alpha_star: e.quantile for e in estimates if e.algorithm == baseline and e.valid}
    alt = {e.alpha_star: e.quantile for e in estimates if e.algorithm == other and e.valid}
    shared = sorted(set(base) & set(alt))
    if not shared:
        return None
    a = shared[0]
    return a, base[a] / alt[a]


def summary_text(estimates, slopes, conditions=(), metadata: dict | None = None) -> str:
    lines = []
    for key, value in sorted((metadata or {}).items()):
        lines.append(f"# {key}: {value}")
    if estimates:
        lines.append("algorithm  alpha_star  quantile  theory  hit_fraction  censored")
        for e in estimates:
            q = "unattainable" if e.quantile is None else str(e.quantile)
            th = "-" if e.theory is None else f"{e.theory:g}"
            lines.append(f"{e.algorithm:9s}  {e.alpha_star:<10.6g}  {q:>8s}  {th:>6s}  "
                         f"{e.hit_fraction:12.4f}  {e.censored:8d}" + (f"  ({e.note})" if e.note else ""))
    for s in slopes:
        if s.slope is None:
            lines.append(f"slope {s.algorithm}: insufficient uncensored levels")
        else:
            ci = "" if s.ci_low is None else f" [{s.ci_low:.3f}, {s.ci_high:.3f}]"
            lines.append(f"slope {s.algorithm}: {s.slope:.3f}{ci}")
    for other in ("sac1", "sac2"):
        sp = speedup(estimates, "uniform", other)
        if sp is not None:
            lines.append(f"speedup uniform/{other} at alpha*={sp[0]:g}: {sp[1]:.3f}")
    if conditions:
        n_bad1 = sum(not c.one_side_ok for c in conditions)
        n_bad6 = sum(not c.volume_ok for c in conditions)
        zs = [abs(c.indep_z) for c in conditions if c.indep_z is not None and math.isfinite(c.indep_z)]
        lines.append(f"conditions: {len(conditions)} iterations, one-side violations {n_bad1}, "
                     f"|D_h| > |D_alpha_t| {n_bad6}, max |independence z| "
                     f"{max(zs) if zs else 0.0:.2f}")
    return "\n".join(lines) + "\n"


def _parse(value: str, kind):
    if value == "":
        return None
    return kind(value)


def read_estimates(path) -> list[dict]:
    """Parse ``estimates.csv`` back into dictionaries with typed values."""
    types = {"alpha_star": float, "delta": float, "quantile": int, "hit_fraction": float, "censored": int,
             "trials": int, "theory": float, "slope": float, "ci_low": float, "ci_high": float}
    with open(Path(path)) as fh:
        return [{k: (_parse(v, types[k]) if k in types else v) for k, v in row.items()}
                for row in csv.DictReader(fh)]


def read_trials(path) -> list[dict]:
    types = {"alpha_star": float, "trial": int, "seed": int, "first_hit": int, "censored": int}
    with open(Path(path)) as fh:
        return [{k: (_parse(v, types[k]) if k in types else v) for k, v in row.items()}
                for row in csv.DictReader(fh)]
