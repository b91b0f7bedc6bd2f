"""Command-line harness.

Subcommands:

* ``simulate`` -- run a seeded experiment for one algorithm/family config
  and append a report row (CSV or JSON).
* ``analyze`` -- emit closed-form tables: matched-probability p(k, t),
  acceptance schedules alpha_t, or the threshold-cutoff sweep ALG(l).
* ``verify`` -- run the invariant battery; exit code 2 on any failure.
* ``report`` -- convert a JSON row file into the canonical CSV (or back).

Exit codes: 0 success, 1 input error, 2 invariant-suite failure.  The only
environment variable honored is ``SECMATCH_THREADS`` (compute thread count).
"""

from __future__ import annotations

import argparse
import os
import sys

from .errors import CapacityError, InputError


def _configure_threads() -> None:
    threads = os.environ.get("SECMATCH_THREADS")
    if threads:
        import numba

        numba.set_num_threads(max(1, int(threads)))


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="secmatch", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a seeded experiment")
    sim.add_argument("--algorithm", required=True,
                     choices=("vertex", "vertex-ordinal-greedy", "edge", "hypergraph", "ordinal"))
    sim.add_argument("--family", required=True)
    sim.add_argument("--n", type=int, default=0)
    sim.add_argument("--m", type=int, default=0)
    sim.add_argument("--d", type=int, default=2)
    sim.add_argument("--density", type=float, default=0.5)
    sim.add_argument("--m-aux", type=int, default=0)
    sim.add_argument("--k", type=int, default=None)
    sim.add_argument("--l", type=int, default=None, dest="ell")
    sim.add_argument("--trials", type=int, default=1000)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--oracle", choices=("exact", "mc"), default="exact")
    sim.add_argument("--inner-trials", type=int, default=200)
    sim.add_argument("--resample", action="store_true")
    sim.add_argument("--out", default=None)
    sim.add_argument("--format", choices=("csv", "json"), default="csv")

    ana = sub.add_parser("analyze", help="closed-form tables")
    ana.add_argument("table", choices=("match-probability", "edge-schedule",
                                       "hyper-schedule", "threshold-sweep",
                                       "ceiling-sweep"))
    ana.add_argument("--n", type=int, default=100)
    ana.add_argument("--n-min", type=int, default=10)
    ana.add_argument("--m", type=int, default=20)
    ana.add_argument("--d", type=int, default=2)
    ana.add_argument("--k", type=int, default=None)
    ana.add_argument("--out", default=None)
    ana.add_argument("--format", choices=("csv", "json"), default="csv")

    ver = sub.add_parser("verify", help="run the invariant suites")
    ver.add_argument("--full", action="store_true", help="widen the sweep ranges")

    rep = sub.add_parser("report", help="convert stored rows between formats")
    rep.add_argument("rows", help="JSON rows file produced by simulate --format json")
    rep.add_argument("--out", required=True)
    rep.add_argument("--format", choices=("csv", "json"), default="csv")

    return ap


def _emit(lines: list[str], out: str | None) -> None:
    text = "\n".join(lines) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _cmd_simulate(args) -> int:
    from .bench import ExperimentConfig, InstanceFamily, run_experiment, write_report

    fam = InstanceFamily(kind=args.family, n=args.n, m=args.m, d=args.d,
                         density=args.density, m_aux=args.m_aux)
    cfg = ExperimentConfig(
        algorithm=args.algorithm, family=fam, trials=args.trials, seed=args.seed,
        k=args.k, ell=args.ell, oracle=args.oracle, inner_trials=args.inner_trials,
        resample=args.resample,
    )
    est, rows = run_experiment(cfg)
    if args.out:
        write_report(rows, args.format, args.out)
    print(f"mean_ratio={est.mean_ratio:.6f} stderr={est.stderr:.6f} "
          f"ci=[{est.ci_lo:.6f}, {est.ci_hi:.6f}] trials={est.trials}")
    return 0


def _cmd_analyze(args) -> int:
    import json as _json

    from . import ordinal, schedules, vertex

    if args.table == "match-probability":
        n = args.n
        k = args.k if args.k is not None else n // 2
        if k < 3:
            raise InputError("closed form needs k >= 3")
        rows = [(t, vertex.p_closed(k, t)) for t in range(k, n + 1)]
        header = "t,p_closed"
    elif args.table == "edge-schedule":
        sched = schedules.alpha_recursive(args.m)
        rows = [(t, sched[t]) for t in range(1, args.m + 1)]
        header = "t,alpha"
    elif args.table == "hyper-schedule":
        sched = schedules.hyper_alpha_recursive(args.m, args.d)
        rows = [(t, sched[t]) for t in range(1, args.m + 1)]
        header = "t,alpha"
    elif args.table == "threshold-sweep":
        sweep = ordinal.threshold_values(args.n)
        rows = [(ell, float(sweep[ell])) for ell in range(1, args.n + 1)]
        header = "l,value"
    else:
        # best cutoff and its distance to the 5/12 limit, per horizon
        rows = []
        for n in range(max(args.n_min, 3), args.n + 1):
            r = ordinal.optimal_threshold(n)
            rows.append((n, r.l_star, r.value, r.value - 5.0 / 12.0))
        header = "n,l_star,value,gap_to_5_12"
    if args.format == "csv":
        lines = [header] + [",".join(repr(x) if isinstance(x, float) else str(x) for x in row)
                            for row in rows]
    else:
        keys = header.split(",")
        lines = [_json.dumps([dict(zip(keys, row)) for row in rows], indent=2)]
    _emit(lines, args.out)
    return 0


def _cmd_verify(args) -> int:
    from .bench import verify_invariants

    results = verify_invariants(fast=not args.full)
    failed = 0
    for name, ok, detail in results:
        status = "ok" if ok else "FAIL"
        print(f"[{status}] {name}: {detail}")
        if not ok:
            failed += 1
    if failed:
        print(f"{failed} invariant check(s) failed")
        return 2
    print(f"all {len(results)} invariant checks passed")
    return 0


def _cmd_report(args) -> int:
    from .bench import rows_from_json, write_report

    rows = rows_from_json(args.rows)
    write_report(rows, args.format, args.out)
    print(f"wrote {len(rows)} row(s) to {args.out}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        _configure_threads()
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "analyze":
            return _cmd_analyze(args)
        if args.command == "verify":
            return _cmd_verify(args)
        return _cmd_report(args)
    except (InputError, CapacityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
