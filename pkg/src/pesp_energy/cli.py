"""Command-line interface.

Exit codes: 0 success, 1 validation/parse/usage problems, 2 infeasible,
3 limit reached.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from pathlib import Path

from . import io as iofmt
from .core import validate_instance
from .generators import MODES, gen_artificial4, gen_example_hp, gen_random
from .onestation import Method, PreconditionError, solve_by_method
from .pareto import FrontError, enumerate_front, sweep, dominance_filter
from .solver import GuardError, Objective, SolveRequest, Status, brute_force, export_lp, solve_exact

EXIT_OK, EXIT_INVALID, EXIT_INFEASIBLE, EXIT_LIMIT = 0, 1, 2, 3
DEFAULT_TIME_LIMIT = 600.0


def timetable_id(timetable: dict) -> str:
    blob = json.dumps(dict(sorted(timetable.items())), separators=(",", ":"))
    return hashlib.sha1(blob.encode()).hexdigest()[:12]


def _write_json(obj, path):
    text = json.dumps(obj, indent=2) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8", newline="\n")


def _load(path):
    return iofmt.read_instance(path)


def cmd_validate(args) -> int:
    inst = _load(args.input)
    problems = validate_instance(inst)
    for v in problems:
        print(v)
    if problems:
        return EXIT_INVALID
    print("ok")
    return EXIT_OK


def _status_code(status: Status) -> int:
    return {Status.OPTIMAL: EXIT_OK, Status.INFEASIBLE: EXIT_INFEASIBLE, Status.LIMIT_REACHED: EXIT_LIMIT}[status]


def cmd_solve(args) -> int:
    inst = _load(args.input)
    objective = Objective(args.objective)
    if args.method not in ("exact", "auto") and objective is Objective.MIN_TRAVEL:
        print("error: only the exact method optimizes travel time", file=sys.stderr)
        return EXIT_INVALID
    if args.method != "exact":
        return _run_method(inst, args)
    res = solve_exact(SolveRequest(inst, objective, args.min_overlap, args.time_limit, args.node_limit))
    print(f"status: {res.status.value}")
    if res.solution is None:
        print("no solution found", file=sys.stderr)
        return _status_code(res.status)
    print(f"total_overlap: {res.solution.total_overlap}")
    print(f"travel_time: {iofmt.format_weight(res.solution.travel_time)}")
    print(f"bound: {iofmt.format_weight(res.bound)}")
    if args.output:
        out = iofmt.solution_to_dict(res.solution)
        out["status"] = res.status.value
        _write_json(out, args.output)
    return _status_code(res.status)


def _run_method(inst, args) -> int:
    try:
        res = solve_by_method(inst, args.method, args.time_limit)
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    sol = res.solution
    print(f"method: {res.method}")
    print(f"total_overlap: {sol.total_overlap}")
    print(f"travel_time: {iofmt.format_weight(sol.travel_time)}")
    print(f"bounds: [{res.lower}, {res.upper}]{'' if res.optimal else ' (heuristic)'}")
    if args.output:
        out = iofmt.solution_to_dict(sol)
        out.update(method=res.method, lower=res.lower, upper=res.upper, optimal=res.optimal)
        _write_json(out, args.output)
    return EXIT_OK if res.optimal else EXIT_LIMIT


def cmd_energy(args) -> int:
    args.objective = Objective.MAX_OVERLAP.value
    return _run_method(_load(args.input), args)


def cmd_pareto(args) -> int:
    inst = _load(args.input)
    try:
        points = sweep(inst, workers=args.workers, time_limit=args.time_limit)
    except FrontError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LIMIT if exc.status is Status.LIMIT_REACHED else EXIT_INFEASIBLE
    front = points if args.unfiltered else list(dominance_filter(points).points)
    rows = [(p.overlap, iofmt.format_weight(p.travel_time), timetable_id(p.witness.timetable)) for p in front]
    stream = sys.stdout if args.output in (None, "-") else open(args.output, "w", newline="", encoding="ascii")
    try:
        w = csv.writer(stream, lineterminator="\n")
        w.writerow(["overlap", "travel_time", "timetable_id"])
        w.writerows(rows)
    finally:
        if stream is not sys.stdout:
            stream.close()
    if args.witnesses:
        _write_json(
            {timetable_id(p.witness.timetable): iofmt.solution_to_dict(p.witness) for p in front},
            args.witnesses,
        )
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.kind == "artificial4":
        inst = gen_artificial4()
    elif args.kind == "example-hp":
        inst = gen_example_hp()
    else:
        try:
            inst = gen_random(
                args.seed, args.n, args.period, (args.time_min, args.time_max),
                (args.wait_min, args.wait_max), args.mode,
                transfer_prob=args.transfer_prob,
            )
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INVALID
    text = iofmt.dumps_instance(inst)
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text, encoding="utf-8", newline="\n")
    return EXIT_OK


def cmd_export_lp(args) -> int:
    model = export_lp(_load(args.input), args.min_overlap)
    if args.output in (None, "-"):
        sys.stdout.write(model.text)
    else:
        Path(args.output).write_text(model.text, encoding="ascii", newline="\n")
    return EXIT_OK


def cmd_oracle(args) -> int:
    inst = _load(args.input)
    try:
        res = brute_force(SolveRequest(inst, Objective(args.objective), args.min_overlap))
    except GuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    print(f"status: {res.status.value}")
    if res.solution is not None:
        print(f"total_overlap: {res.solution.total_overlap}")
        print(f"travel_time: {iofmt.format_weight(res.solution.travel_time)}")
    return _status_code(res.status)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pesp-energy", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="verb", required=True)

    def with_io(p, output=True):
        p.add_argument("input", help="instance file (JSON)")
        if output:
            p.add_argument("-o", "--output", help="output file (default: stdout where applicable)")
        return p

    methods = ["auto"] + [m.value for m in Method]

    p = with_io(sub.add_parser("validate", help="check an instance"), output=False)
    p.set_defaults(func=cmd_validate)

    p = with_io(sub.add_parser("solve", help="solve one scalarized problem"))
    p.add_argument("--objective", choices=[o.value for o in Objective], default=Objective.MIN_TRAVEL.value)
    p.add_argument("--min-overlap", type=int, default=0)
    p.add_argument("--method", choices=methods, default="exact")
    p.add_argument("--time-limit", type=float, default=DEFAULT_TIME_LIMIT)
    p.add_argument("--node-limit", type=int, default=None)
    p.set_defaults(func=cmd_solve)

    p = with_io(sub.add_parser("energy", help="maximize overlap on a one-station network"))
    p.add_argument("--method", choices=methods, default="auto")
    p.add_argument("--time-limit", type=float, default=DEFAULT_TIME_LIMIT)
    p.set_defaults(func=cmd_energy)

    p = with_io(sub.add_parser("pareto", help="write the Pareto front as CSV"))
    p.add_argument("--time-limit", type=float, default=DEFAULT_TIME_LIMIT)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--witnesses", help="also write witness solutions (JSON)")
    p.add_argument("--unfiltered", action="store_true", help="one row per overlap floor, no dominance filter")
    p.set_defaults(func=cmd_pareto)

    p = sub.add_parser("gen", help="write a generated instance")
    p.add_argument("kind", choices=["artificial4", "example-hp", "random"])
    p.add_argument("-o", "--output")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--period", type=int, default=10)
    p.add_argument("--time-min", type=int, default=1)
    p.add_argument("--time-max", type=int, default=3)
    p.add_argument("--wait-min", type=int, default=0)
    p.add_argument("--wait-max", type=int, default=3)
    p.add_argument("--mode", choices=MODES, default="bounded")
    p.add_argument("--transfer-prob", type=float, default=0.0)
    p.set_defaults(func=cmd_gen)

    p = with_io(sub.add_parser("export-lp", help="write the MIP model in LP format"))
    p.add_argument("--min-overlap", type=int, default=0)
    p.set_defaults(func=cmd_export_lp)

    p = with_io(sub.add_parser("oracle", help="solve by exhaustive enumeration (tiny instances)"), output=False)
    p.add_argument("--objective", choices=[o.value for o in Objective], default=Objective.MIN_TRAVEL.value)
    p.add_argument("--min-overlap", type=int, default=0)
    p.set_defaults(func=cmd_oracle)
    return ap


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except iofmt.InstanceFormatError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
