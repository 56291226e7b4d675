"""Command-line interface: solve, compare, verify, and bench subcommands.

Exit codes: 0 success, 2 input/schema error, 3 solver non-convergence.
Reports are JSON with elapsed times split into a separate "timings" field so
the rest of the document is byte-stable across runs with identical seeds.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import statistics
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .baseline_solver import solve_baseline
from .dr_solver import SolveReport, residual, solve_dr, validate_params
from .operators import estimate_constants
from .problemfile import (ProblemBundle, ProblemFileError,
                          bundled_problem_path, load_problem)
from .sets import SamplerConfig
from .verify import check_projection_lipschitz

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NO_CONVERGENCE = 3


def _resolve_file(name: str) -> Path:
    path = Path(name)
    if path.exists():
        return path
    try:
        bundled = bundled_problem_path(name)
        if bundled.exists():
            return bundled
    except (FileNotFoundError, ModuleNotFoundError):
        pass
    raise ProblemFileError(f"{name}: no such problem file")


def _load(args) -> ProblemBundle:
    bundle = load_problem(_resolve_file(args.file))
    dr = bundle.dr_params
    bp = bundle.baseline_params
    if args.tol is not None:
        dr = dataclasses.replace(dr, tol=args.tol)
        bp = dataclasses.replace(bp, inner_tol=args.tol, outer_tol=args.tol)
    if args.max_iter is not None:
        dr = dataclasses.replace(dr, max_iter=args.max_iter)
        bp = dataclasses.replace(bp, max_inner=args.max_iter)
    if args.seed is not None:
        bp = dataclasses.replace(bp, seed=args.seed)
    return dataclasses.replace(bundle, dr_params=dr, baseline_params=bp)


def _run_record(algorithm: str, start: int, report: SolveReport,
                bundle: ProblemBundle) -> tuple[dict, dict]:
    final = report.final
    res = (float("nan") if report.status == "invalid_params"
           else residual(bundle.problem, bundle.dr_params.xi, final.z, final.x))
    certificate = ({"delta": report.delta} if report.delta is not None
                   else {"void": True})
    record = {
        "algorithm": algorithm,
        "start": start,
        "status": report.status,
        "iterations": report.iterations,
        "final_x": final.x.tolist(),
        "final_z": final.z.tolist(),
        "residual": res,
        "certificate": certificate,
        "notes": list(report.notes),
    }
    if report.outer_cycles is not None:
        record["outer_cycles"] = report.outer_cycles
    timing = {"algorithm": algorithm, "start": start, "elapsed": report.elapsed}
    return record, timing


def _report_document(bundle: ProblemBundle, runs: list, timings: list,
                     checks: list | None = None) -> dict:
    return {
        "tool_version": __version__,
        "problem_hash": bundle.problem_hash,
        "runs": runs,
        "checks": checks or [],
        "timings": timings,
    }


def _emit(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def write_trace_csv(path, report: SolveReport) -> None:
    """Per-iteration trace: iter, dz, dy, dx, residual, bound."""
    tr = report.trace
    if tr is None:
        raise ValueError("report has no trace; run the solver with tracing")
    bounds = report.theoretical_bounds
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["iter", "dz", "dy", "dx", "residual", "bound"])
        for k in range(report.iterations):
            dz = "" if np.isnan(tr.dz[k]) else repr(float(tr.dz[k]))
            bound = repr(float(bounds[k])) if k < bounds.shape[0] else ""
            w.writerow([k + 1, dz, repr(float(tr.dy[k])),
                        repr(float(tr.dx[k])),
                        repr(float(tr.solution_residuals[k])), bound])


def _trace_path(out: str | None, start: int) -> Path:
    base = Path(out).with_suffix("") if out else Path("trace")
    return Path(f"{base}_start{start}.csv")


def cmd_solve(args) -> int:
    bundle = _load(args)
    runs, timings = [], []
    ok = True
    for i, (x0, y0) in enumerate(bundle.starts):
        rep = solve_dr(bundle.problem, bundle.dr_params, x0, y0,
                       record_trace=args.trace)
        record, timing = _run_record("dr", i, rep, bundle)
        runs.append(record)
        timings.append(timing)
        ok = ok and rep.status == "converged"
        if args.trace:
            path = _trace_path(args.out, i)
            write_trace_csv(path, rep)
            print(f"trace written to {path}", file=sys.stderr)
    _emit(_report_document(bundle, runs, timings), args.out)
    return EXIT_OK if ok else EXIT_NO_CONVERGENCE


def cmd_compare(args) -> int:
    bundle = _load(args)
    runs, timings = [], []
    ok = True
    for i, (x0, y0) in enumerate(bundle.starts):
        for algorithm, solver, params in (
            ("dr", solve_dr, bundle.dr_params),
            ("baseline", solve_baseline, bundle.baseline_params),
        ):
            rep = solver(bundle.problem, params, x0, y0)
            record, timing = _run_record(algorithm, i, rep, bundle)
            runs.append(record)
            timings.append(timing)
            ok = ok and rep.status == "converged"

    print(f"{'start':>5}  {'algorithm':<9} {'iterations':>10} "
          f"{'elapsed_s':>12} {'residual':>12}")
    for record, timing in zip(runs, timings):
        print(f"{record['start']:>5}  {record['algorithm']:<9} "
              f"{record['iterations']:>10} {timing['elapsed']:>12.6f} "
              f"{record['residual']:>12.3e}")
    if args.out:
        _emit(_report_document(bundle, runs, timings), args.out)
    return EXIT_OK if ok else EXIT_NO_CONVERGENCE


def cmd_verify(args) -> int:
    bundle = _load(args)
    prob = bundle.problem
    seed = bundle.baseline_params.seed
    count = args.samples

    L_hat, mu_hat = estimate_constants(
        prob.T, SamplerConfig(seed=seed, count=count))
    a3_ok = L_hat <= prob.T.L + 1e-6 and mu_hat >= prob.T.mu - 1e-6
    a4 = check_projection_lipschitz(
        prob.phi, prob.C, prob.phi.lipschitz_l,
        SamplerConfig(seed=seed + 1, count=count))
    pc = validate_params(prob, bundle.dr_params)

    print(f"[A1] feasible set: nonempty closed convex -- ok "
          f"(certified at construction)")
    print(f"[A2] moving-set values: nonempty closed convex -- ok "
          f"(kind={prob.phi.kind})")
    print(f"[A3] operator constants: declared L={prob.T.L:.6g} "
          f"mu={prob.T.mu:.6g}; sampled L_hat={L_hat:.6g} "
          f"mu_hat={mu_hat:.6g} -- {'ok' if a3_ok else 'FAIL'}")
    a4_line = (f"[A4] projection-Lipschitz: declared l={a4.declared_l:.6g}; "
               f"sampled max ratio={a4.max_ratio:.6g} "
               f"-- {'ok' if a4.ok else 'FAIL'}")
    if not a4.ok:
        a4_line += (f"\n     witness: x={a4.witness_x.tolist()} "
                    f"y={a4.witness_y.tolist()} z={a4.witness_z.tolist()}")
    print(a4_line)
    if pc.feasible:
        print(f"parameters: feasible, delta={pc.delta:.6f} "
              f"(modulus={pc.modulus:.6f}, gamma={pc.gamma:.6f})")
    else:
        print(f"parameters: INFEASIBLE, violated: {'; '.join(pc.violations)} "
              f"(delta would be {pc.delta:.6f})")

    if args.out:
        checks = [
            {"name": "operator-constants", "declared_L": prob.T.L,
             "declared_mu": prob.T.mu, "L_hat": L_hat, "mu_hat": mu_hat,
             "ok": a3_ok},
            {"name": "projection-lipschitz", **a4.to_dict()},
            {"name": "parameter-feasibility", "feasible": pc.feasible,
             "delta": pc.delta, "modulus": pc.modulus, "gamma": pc.gamma,
             "violations": list(pc.violations)},
        ]
        _emit(_report_document(bundle, [], [], checks), args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    bundle = _load(args)
    elapsed: dict[tuple[str, int], list[float]] = {}
    iterations: dict[tuple[str, int], list[int]] = {}
    ok = True
    for _ in range(args.repeats):
        for i, (x0, y0) in enumerate(bundle.starts):
            for algorithm, solver, params in (
                ("dr", solve_dr, bundle.dr_params),
                ("baseline", solve_baseline, bundle.baseline_params),
            ):
                rep = solver(bundle.problem, params, x0, y0)
                elapsed.setdefault((algorithm, i), []).append(rep.elapsed)
                iterations.setdefault((algorithm, i), []).append(rep.iterations)
                ok = ok and rep.status == "converged"

    print(f"repeats: {args.repeats}")
    print(f"{'start':>5}  {'algorithm':<9} {'iterations':>10} "
          f"{'median_elapsed_s':>17}")
    for (algorithm, i), times in sorted(elapsed.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        iters = iterations[(algorithm, i)]
        iter_txt = (str(iters[0]) if len(set(iters)) == 1
                    else f"{min(iters)}-{max(iters)}")
        print(f"{i:>5}  {algorithm:<9} {iter_txt:>10} "
              f"{statistics.median(times):>17.6f}")

    x0, y0 = bundle.starts[0]
    rep = solve_dr(bundle.problem, bundle.dr_params, x0, y0, record_trace=True)
    out = args.out or "bench.csv"
    write_trace_csv(out, rep)
    print(f"residual-vs-iteration trace (start 0) written to {out}",
          file=sys.stderr)
    return EXIT_OK if ok else EXIT_NO_CONVERGENCE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qvikit",
        description="Solve and verify quasi-variational inequalities with "
                    "moving constraint sets.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="problem JSON file (or a bundled name "
                                     "such as example2.json)")
    common.add_argument("--tol", type=float, default=None,
                        help="override the stopping tolerance")
    common.add_argument("--max-iter", type=int, default=None,
                        help="override the iteration cap")
    common.add_argument("--seed", type=int, default=None,
                        help="override the sampling seed")
    common.add_argument("--out", default=None, help="write the report here "
                                                    "instead of stdout")

    p = sub.add_parser("solve", parents=[common],
                       help="run the splitting solver from every start")
    p.add_argument("--trace", action="store_true",
                   help="write a per-iteration CSV trace per start")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("compare", parents=[common],
                       help="run both algorithms and tabulate them")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("verify", parents=[common],
                       help="check the structural assumptions and parameters")
    p.add_argument("--samples", type=int, default=10_000,
                   help="sample count for the probe checks")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", parents=[common],
                       help="repeat the comparison and report medians")
    p.add_argument("--repeats", type=int, default=10,
                   help="number of repeats (default 10)")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ProblemFileError as err:
        print(f"input error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
