"""Batch runner: ``barrier-spectra {eigs,sweep,verify,jensen-demo,baselines}``.

Outputs go to ``--out`` as CSV (header row) and JSON (``"schema": 1``).
Identical configurations give byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import experiments as ex
from .config import build_config
from .core import in_gamma_strip
from .eigen import ZRegion, locate_eigenvalues
from .errors import BarrierSpectraError
from .schrodinger import Problem

SCHEMA = 1
EIG_COLUMNS = ("R", "re_lambda", "im_lambda", "re_z", "im_z", "multiplicity", "residual")
COMMANDS = ("eigs", "sweep", "verify", "jensen-demo", "baselines")


def _num(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    return x


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return _num(obj)


def write_json(path, payload):
    body = {"schema": SCHEMA, **payload}
    Path(path).write_text(json.dumps(_clean(body), indent=2, sort_keys=True) + "\n")


def eig_rows(R, eigs):
    for e in eigs.entries:
        yield (repr(float(R)), repr(e.lam.real), repr(e.lam.imag), repr(e.z.real), repr(e.z.imag),
               str(e.multiplicity), repr(e.residual))


def write_eig_csv(path, blocks):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(EIG_COLUMNS)
        for R, eigs in blocks:
            w.writerows(eig_rows(R, eigs))


def _map(fn, items, workers):
    if workers <= 1 or len(items) <= 1:
        return [fn(i) for i in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))


# --- commands -------------------------------------------------------------------


def cmd_eigs(cfg, out):
    problem = Problem(cfg.q, cfg.gamma, cfg.R)
    if cfg.region is not None:
        eigs = locate_eigenvalues(problem, ZRegion(*cfg.region), cfg.tol)
    else:
        eigs = ex.full_spectrum(problem, tol=cfg.tol)
    write_eig_csv(out / "eigs.csv", [(cfg.R, eigs)])
    lam = eigs.lambdas
    strip = np.asarray(in_gamma_strip(lam, cfg.gamma), dtype=bool).reshape(lam.shape)
    return {"count": eigs.count, "in_strip": int(strip.sum()), "files": ["eigs.csv"]}


def _sweep_task(args):
    potential, gamma, R, tol = args
    from .potentials import parse_potential

    return ex.sweep_point(parse_potential(potential), gamma, R, tol=tol)


def _run_sweep(cfg):
    tasks = [(cfg.potential, cfg.gamma, R, cfg.tol) for R in cfg.R_list]
    return _map(_sweep_task, tasks, cfg.workers)


def cmd_sweep(cfg, out):
    points = _run_sweep(cfg)
    write_eig_csv(out / "sweep_eigs.csv", [(p.R, p.eigs) for p in points])
    Rs = [p.R for p in points]
    counts = [p.summary["count"] for p in points]
    ratios = [p.summary["max_sqrt_dist"] / (p.R / math.log(p.R)) for p in points]
    top = [p.x_emp for p in points][-3:]
    report = {
        "command": "sweep",
        "config": cfg.as_dict(),
        "per_R": [{**p.summary, "reports": [r.as_dict() for r in p.reports if r.bound_name != "enclosure"],
                   "enclosure_violations": sum(1 for r in p.reports
                                               if r.bound_name == "enclosure" and not r.satisfied)}
                  for p in points],
        "onset": ex.bound_onsets(points),
        "x_emp_spread_top3": ex.relative_spread(top),
        "magnitude_ratio_spread": ex.relative_spread(ratios) if min(ratios) > 0 else None,
        "count_loglog_slope": ex.loglog_slope(Rs, counts) if min(counts) > 0 and len(Rs) > 1 else None,
    }
    write_json(out / "sweep_report.json", report)
    return {"counts": counts, "all_satisfied": all(r.satisfied for p in points for r in p.reports),
            "files": ["sweep_eigs.csv", "sweep_report.json"]}


def cmd_baselines(cfg, out):
    points = _run_sweep(cfg)
    q = cfg.q
    cols = ["R", "count", "count_bound", "count_baseline", "max_abs_lambda",
            "magnitude_radius_sq", "magnitude_baseline", "max_sqrt_dist", "magnitude_radius"]
    with open(out / "baselines.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for p in points:
            s = p.summary
            bound = s.get("count_bound_compact") if q.is_compact else s.get("count_bound_naimark")
            w.writerow([repr(float(p.R)), s["count"], repr(float(bound)), repr(s["baseline_count"]),
                        repr(s["max_abs_lambda"]), repr(s["magnitude_radius"] ** 2),
                        repr(s["baseline_magnitude"]), repr(s["max_sqrt_dist"]), repr(s["magnitude_radius"])])
    return {"files": ["baselines.csv"]}


def cmd_jensen(cfg, out):
    result = ex.jensen_demo(cfg.q, cfg.gamma, cfg.R, cfg.a)
    write_json(out / "jensen_demo.json", {"command": "jensen-demo", "config": cfg.as_dict(), **result})
    return {"bound": result["bound"], "winding_count": result["winding_count"], "ok": result["ok"],
            "files": ["jensen_demo.json"]}


def cmd_verify(cfg, out):
    from .potentials import parse_potential

    suites = {}
    hpm = ex.hpm_trials(100_000, (0.5, 1.0, 5.0), cfg.seed)
    suites["hpm"] = {"samples": 300_000, "failures": sum(hpm.values())}
    lhs, rhs = ex.gronwall_trials(1000, cfg.seed)
    suites["gronwall"] = {"samples": 1000, "failures": int(np.sum(lhs > rhs))}
    rng = np.random.default_rng(cfg.seed)
    trials = [ex.jensen_polynomial_trial(rng) for _ in range(50)]
    suites["jensen"] = {"samples": 50, "failures": sum(1 for b, k in trials if math.floor(b) < k)}
    fails = 0
    detail = {}
    for name in ("zero", "box:A=1,Q=1"):
        ag = ex.oracle_agreement(parse_potential(name), cfg.gamma, cfg.R, cfg.fd_n, tol=cfg.tol)
        fails += 0 if ag.ok else 1
        detail[name] = {"fd_count": ag.fd_count, "shooting_count": ag.shooting_count,
                        "max_deviation": float(ag.deviation.max()) if ag.deviation.size else 0.0,
                        "max_error": float(ag.error.max()) if ag.error.size else 0.0}
    suites["oracle"] = {"samples": 2, "failures": fails, "detail": detail}
    passed = all(s["failures"] == 0 for s in suites.values())
    write_json(out / "verify.json", {"command": "verify", "config": cfg.as_dict(), "suites": suites,
                                     "passed": passed})
    return {"passed": passed, "suites": {k: v["failures"] for k, v in suites.items()},
            "files": ["verify.json"]}


HANDLERS = {"eigs": cmd_eigs, "sweep": cmd_sweep, "verify": cmd_verify,
            "jensen-demo": cmd_jensen, "baselines": cmd_baselines}


def build_parser():
    ap = argparse.ArgumentParser(prog="barrier-spectra", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="flat key = value file")
    ap.add_argument("--gamma", type=float)
    ap.add_argument("--R", type=float)
    ap.add_argument("--R-list", dest="R_list", help="comma-separated R values")
    ap.add_argument("--potential", help="e.g. zero, box:A=1,Q=1, expdecay:A=1,k=5")
    ap.add_argument("--out", help="output directory")
    ap.add_argument("--tol", type=float)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--threads", type=int, help="worker processes (default: all cores)")
    return ap


def run(argv=None):
    """Parse arguments, run one command, return the process exit status."""
    args = build_parser().parse_args(argv)
    try:
        overrides = {k: getattr(args, k) for k in
                     ("gamma", "R", "R_list", "potential", "out", "tol", "seed", "threads")}
        cfg = build_config(args.config, overrides)
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        summary = HANDLERS[args.command](cfg, out)
    except (BarrierSpectraError, OSError) as exc:
        err = {"schema": SCHEMA, "error": type(exc).__name__, "message": str(exc)}
        param = getattr(exc, "param", None)
        if param is not None:
            err["param"] = param
        print(json.dumps(err, sort_keys=True), file=sys.stderr)
        return 2
    print(json.dumps(_clean({"command": args.command, **summary}), sort_keys=True))
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
