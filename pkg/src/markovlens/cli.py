"""Command-line surface: analyze, witness-scan, extend, report.

Exit codes: 0 success, 2 configuration error, 3 numerical failure (the
message names the failing stage and time point).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

import numpy as np

from . import __version__
from .config import AnalysisConfig, load_config, matrix_from_json, matrix_to_json, \
    validate_verdict_report
from .divisibility import cp_divisibility_verdict, image_basis, rank_profile
from .dynamics import canonical_gkls, generator_from_family
from .errors import ConfigError, MarkovLensError, NumericalError, SingularGeneratorError
from .reports import read_json, write_csv, write_json
from .superop import to_choi
from .witnesses import blp_sigma, witness_scan

log = logging.getLogger("markovlens")


def _setup_logging() -> None:
    level = os.environ.get("MARKOVLENS_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _outdir(config: AnalysisConfig, args) -> str:
    out = args.out or config.output
    os.makedirs(out, exist_ok=True)
    return out


def _witness_options(config: AnalysisConfig, args) -> dict:
    opts = {"ancilla_kind": "d", "n_samples": 64, "n_refine": 8, "seed": 0}
    opts.update(config.witness)
    if args.seed is not None:
        opts["seed"] = args.seed
    return opts


def _record_rows(record):
    rows = []
    n = len(record.times)
    for k in range(n):
        deriv = record.derivatives[k - 1] if 0 < k < n - 1 else None
        rows.append([float(record.times[k]), float(record.norms[k]),
                     None if deriv is None else float(deriv)])
    return rows


def _record_summary(record, extra=None) -> dict:
    out = {
        "ancilla_kind": record.ancilla_kind,
        "max_backflow": float(record.max_backflow),
        "max_backflow_time": float(record.max_backflow_time),
        "kink_times": [float(t) for t in record.kink_times],
        "witness": matrix_to_json(record.witness),
    }
    out.update(extra or {})
    return out


def task_verdict(config: AnalysisConfig, family, grid, outdir: str) -> None:
    verdict = cp_divisibility_verdict(family, grid, config.tolerances)
    report = {
        "status": verdict.status.value,
        "family": {"preset": family.kind, "dim": family.dim},
        "grid": {"t_max": float(grid.times[-1]), "n_points": int(len(grid.times))},
        "tolerances": {
            "choi_tol": config.tolerances.choi_tol,
            "tp_tol": config.tolerances.tp_tol,
            "kernel_tol": config.tolerances.kernel_tol,
            "rank_rtol": config.tolerances.rank_rtol,
            "fd_tol": config.tolerances.fd_tol,
        },
        "evidence": {
            "invertible_everywhere": verdict.invertible_everywhere,
            "image_nonincreasing": verdict.image_nonincreasing,
            "image_residual": verdict.image_residual,
            "worst_kernel_residual": verdict.worst_kernel_residual,
            "first_violation_time": verdict.first_violation_time,
            "worst_choi_min_eig": verdict.worst_choi_min_eig,
            "worst_tp_residual": verdict.worst_tp_residual,
            "p_sampling_min_eig": verdict.p_sampling_min_eig,
            "witness_max_backflow": verdict.witness_max_backflow,
            "ranks": [int(r) for r in verdict.ranks.ranks],
            "breakpoints": [float(b) for b in verdict.ranks.breakpoints],
            "projectors": [{"t": float(t), "natural": matrix_to_json(p.natural)}
                           for t, p in verdict.projectors],
            "notes": list(verdict.notes),
        },
    }
    validate_verdict_report(report)
    write_json(os.path.join(outdir, "verdict.json"), report)

    rp = verdict.ranks
    n_sv = rp.singular_values.shape[1]
    header = ["t"] + [f"sigma_{i + 1}" for i in range(n_sv)] + ["rank"]
    rows = [[float(rp.times[k])] + [float(s) for s in rp.singular_values[k]]
            + [int(rp.ranks[k])] for k in range(len(rp.times))]
    write_csv(os.path.join(outdir, "rank_profile.csv"), header, rows)
    log.info("verdict: %s", verdict.status.value)


def task_rates(config: AnalysisConfig, family, grid, outdir: str) -> None:
    n_rates = family.dim ** 2 - 1
    header = ["t"] + [f"gamma_{k + 1}" for k in range(n_rates)] + ["singular"]
    rows = []
    singular_times = []
    for t in grid.times:
        try:
            gen = generator_from_family(family, float(t),
                                        rank_rtol=config.tolerances.rank_rtol)
            dec = canonical_gkls(gen)
            rows.append([float(t)] + [float(g) for g in dec.rates] + [0])
        except (SingularGeneratorError, NumericalError) as exc:
            singular_times.append(float(t))
            rows.append([float(t)] + [None] * n_rates + [1])
            log.debug("rates: singular at t=%s (%s)", t, exc)
    write_csv(os.path.join(outdir, "rates.csv"), header, rows)
    write_json(os.path.join(outdir, "rates_summary.json"),
               {"singular_times": singular_times,
                "n_regular": sum(1 for r in rows if r[-1] == 0)})


def task_blp(config: AnalysisConfig, family, grid, outdir: str) -> None:
    d = family.dim
    if config.blp.get("rho1") is not None:
        rho1 = matrix_from_json(config.blp["rho1"])
        rho2 = matrix_from_json(config.blp["rho2"])
    else:
        rho1 = np.zeros((d, d), dtype=complex)
        rho1[0, 0] = 1.0
        rho2 = np.zeros((d, d), dtype=complex)
        rho2[1, 1] = 1.0
    record = blp_sigma(family, rho1, rho2, grid)
    write_csv(os.path.join(outdir, "blp_trajectory.csv"),
              ["t", "norm", "derivative"], _record_rows(record))
    write_json(os.path.join(outdir, "blp.json"), _record_summary(record))


def task_witness_scan(config: AnalysisConfig, family, grid, outdir: str,
                      args) -> None:
    opts = _witness_options(config, args)
    record = witness_scan(family, grid, ancilla_kind=opts["ancilla_kind"],
                          n_samples=opts["n_samples"], n_refine=opts["n_refine"],
                          seed=opts["seed"])
    spacing = float(np.max(np.diff(grid.times)))
    threshold = config.fd_tol + 10.0 * spacing ** 2
    summary = _record_summary(record, {
        "n_samples": opts["n_samples"],
        "n_refine": opts["n_refine"],
        "seed": opts["seed"],
        "backflow_threshold": threshold,
        "no_violation_found": bool(record.max_backflow <= threshold),
    })
    write_json(os.path.join(outdir, "best_witness.json"), summary)
    write_csv(os.path.join(outdir, "witness_trajectory.csv"),
              ["t", "norm", "derivative"], _record_rows(record))


def task_extend(config: AnalysisConfig, family, grid, outdir: str) -> None:
    from .cp_extension import SubspaceMapSpec, extend_cp

    rp = rank_profile(family, grid, rtol=config.tolerances.rank_rtol)
    probe_times = list(rp.breakpoints) or [float(grid.times[-1])]
    require_tp = bool(config.extend.get("require_tp", True))
    max_iter = int(config.extend.get("max_iter", 5000))
    results = []
    for k, t_star in enumerate(probe_times):
        basis = image_basis(family.evaluate(t_star), config.tolerances.rank_rtol)
        spec = SubspaceMapSpec(domain=basis,
                               images=tuple(g.copy() for g in basis.elements),
                               dim=family.dim, require_tp=require_tp)
        nat = family.evaluate(t_star).natural
        warm = to_choi_projector(nat, family.dim)
        res = extend_cp(spec, max_iter=max_iter, init_choi=warm)
        entry = {
            "t": float(t_star),
            "status": res.status.value,
            "iterations": res.iterations,
            "action_residual": res.action_residual,
            "tp_residual": res.tp_residual,
            "psd_slack": res.psd_slack,
            "subspace_dim": len(basis),
            "require_tp": require_tp,
        }
        if res.choi is not None:
            choi_file = f"choi_{k}.json"
            write_json(os.path.join(outdir, choi_file),
                       {"t": float(t_star), "choi": matrix_to_json(res.choi)})
            entry["choi_file"] = choi_file
        results.append(entry)
    write_json(os.path.join(outdir, "feasibility.json"), {"results": results})


def to_choi_projector(nat: np.ndarray, dim: int):
    """Choi of the HS-orthogonal projector onto the image: the warm start
    for extension feasibility."""
    from .superop import Superoperator
    proj = nat @ np.linalg.pinv(nat, rcond=1e-12)
    return to_choi(Superoperator(dim=dim, natural=proj))


def cmd_report(args) -> int:
    indir = args.indir
    if not os.path.isdir(indir):
        print(f"error: {indir} is not a directory", file=sys.stderr)
        return 2
    names = sorted(n for n in os.listdir(indir)
                   if n.endswith(".json") or n.endswith(".csv"))
    if not names:
        print(f"error: no artifacts in {indir}", file=sys.stderr)
        return 2
    print(f"{'artifact':32s} {'summary'}")
    print("-" * 72)
    for name in names:
        path = os.path.join(indir, name)
        if name.endswith(".csv"):
            with open(path, encoding="utf-8") as fh:
                n_rows = sum(1 for _ in fh) - 1
            print(f"{name:32s} {n_rows} rows")
            continue
        data = read_json(path)
        if name == "verdict.json":
            print(f"{name:32s} status={data['status']} "
                  f"breakpoints={data['evidence']['breakpoints']}")
        elif name == "best_witness.json":
            print(f"{name:32s} max_backflow={data['max_backflow']:.3e} "
                  f"at t={data['max_backflow_time']:.4f}")
        elif name == "blp.json":
            print(f"{name:32s} max_backflow={data['max_backflow']:.3e}")
        elif name == "feasibility.json":
            statuses = ",".join(r["status"] for r in data["results"])
            print(f"{name:32s} {statuses}")
        elif name == "rates_summary.json":
            print(f"{name:32s} regular={data['n_regular']} "
                  f"singular={len(data['singular_times'])}")
        else:
            print(f"{name:32s} json")
    return 0


def run_tasks(config: AnalysisConfig, tasks, args) -> int:
    family = config.build_family()
    grid = config.build_grid()
    outdir = _outdir(config, args)
    for task in tasks:
        log.info("running task %s", task)
        if task == "verdict":
            task_verdict(config, family, grid, outdir)
        elif task == "rates":
            task_rates(config, family, grid, outdir)
        elif task == "blp":
            task_blp(config, family, grid, outdir)
        elif task == "witness_scan":
            task_witness_scan(config, family, grid, outdir, args)
        elif task == "extend":
            task_extend(config, family, grid, outdir)
        else:
            raise ConfigError(f"unknown task {task!r}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="markovlens",
        description="Divisibility and information-backflow diagnostics for "
                    "quantum dynamical maps")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="JSON analysis config")
        p.add_argument("--out", default=None, help="output directory override")
        p.add_argument("--seed", type=int, default=None, help="seed override")
        p.add_argument("--threads", type=int, default=None,
                       help="worker hint; results are identical for any value")

    p_an = sub.add_parser("analyze", help="run the tasks listed in the config")
    common(p_an)
    p_ws = sub.add_parser("witness-scan", help="randomized backflow search")
    common(p_ws)
    p_ex = sub.add_parser("extend", help="CPTP-extension feasibility probe")
    common(p_ex)
    p_rp = sub.add_parser("report", help="summarize an output directory")
    p_rp.add_argument("--in", dest="indir", required=True)
    return parser


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        if args.command == "report":
            return cmd_report(args)
        config = load_config(args.config)
        if args.command == "analyze":
            return run_tasks(config, config.tasks, args)
        if args.command == "witness-scan":
            return run_tasks(config, ["witness_scan"], args)
        if args.command == "extend":
            return run_tasks(config, ["extend"], args)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        stage = f" [stage: {exc.stage}]" if exc.stage else ""
        at = f" [t={exc.time}]" if exc.time is not None else ""
        print(f"numerical failure{stage}{at}: {exc}", file=sys.stderr)
        return 3
    except MarkovLensError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
