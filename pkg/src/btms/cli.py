"""Command-line interface: ``btms <command> ...``.

Exit codes: 0 success, 2 validation error, 3 I/O error, 4 ranking error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import harness
from .metrics import IncompleteMatrixError
from .moea import AlgoConfig, nsga2_run
from .oracle import DEFAULT_SAMPLES, DEFAULT_SEED, sample_reference_front, write_front_csv
from .polynomial import serialize_poly
from .suite import build_suite, evaluate, export_problem, get_problem, import_problem

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_RANKING = 4


def _fmt_bound(v: float) -> str:
    return "" if math.isinf(v) else f"{v:g}"


def cmd_list(args) -> int:
    print(f"{'id':<8} {'vars':>4} {'objs':>4} {'cons':>4}  title")
    for p in build_suite(args.strict_paper):
        print(f"{p.id:<8} {p.n_vars:>4} {p.n_objectives:>4} {p.n_constraints:>4}  {p.title}")
    return EXIT_OK


def cmd_info(args) -> int:
    p = get_problem(args.id, args.strict_paper)
    names = p.var_names
    print(f"{p.id}: {p.title}")
    print(f"source: {p.citation}")
    print("variables:")
    for v in p.variables:
        print(f"  {v.symbol:<4} [{v.lower:g}, {v.upper:g}] {v.units:<8} {v.description}")
    print("objectives (minimized as stored):")
    for k, o in enumerate(p.objectives):
        note = "" if o.printed_sense == o.effective_sense else f" (printed as {o.printed_sense})"
        print(f"  f{k + 1} {o.name} [{o.units}]{note}")
        print(f"     = {serialize_poly(o.body, names)}")
    if p.constraints:
        print("constraints:")
    for c in p.constraints:
        expr = f"f{c.expr + 1}" if isinstance(c.expr, int) else serialize_poly(c.expr, names)
        lo, hi = _fmt_bound(c.lower), _fmt_bound(c.upper)
        bounds = f"{lo} <= " if lo else ""
        bounds += "expr" + (f" <= {hi}" if hi else "")
        print(f"  {c.label}: {bounds}   expr = {expr}")
    return EXIT_OK


def cmd_eval(args) -> int:
    p = get_problem(args.id, args.strict_paper)
    try:
        x = [float(v) for v in args.x.split(",")]
    except ValueError:
        raise ValueError(f"--x must be comma-separated numbers, got {args.x!r}") from None
    print(json.dumps(evaluate(p, x).to_dict(), indent=2))
    return EXIT_OK


def cmd_front(args) -> int:
    if args.id.lower() == "all":
        paths = harness.build_reference_fronts(args.out, None, args.n, args.seed, args.strict_paper)
        for path in paths:
            print(path)
        return EXIT_OK
    front = sample_reference_front(get_problem(args.id, args.strict_paper), args.n, args.seed, workers=args.workers)
    write_front_csv(front, args.out)
    print(f"{front.problem_id}: {len(front)} nondominated points from n={args.n} -> {args.out}")
    return EXIT_OK


def cmd_optimize(args) -> int:
    settings = {}
    if args.config:
        try:
            settings = json.loads(Path(args.config).read_text())
        except json.JSONDecodeError as exc:
            raise ValueError(f"{args.config}: invalid JSON ({exc})") from None
    for key, value in (("population_size", args.pop), ("generations", args.gens), ("seed", args.seed)):
        if value is not None:
            settings[key] = value
    cfg = AlgoConfig.from_dict(settings)
    record = nsga2_run(get_problem(args.id, args.strict_paper), cfg)
    out = Path(args.out) / record.problem_id / f"{record.seed}.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(harness.record_to_json(record))
    print(
        f"{record.problem_id} seed={record.seed}: archive={len(record.archive_f)} "
        f"feasible={record.feasible_ratio():.2f} time={record.wall_time:.2f}s -> {out}"
    )
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = harness.load_config(args.config)
    records = harness.run_experiment(cfg, workers=args.workers)
    print(f"{len(records)} runs written to {cfg.output_dir}")
    return EXIT_OK


def cmd_rank(args) -> int:
    report = harness.rank_report(args.indicators, args.metric)
    print(report.text(), end="")
    if args.out:
        prefix = Path(args.out)
        prefix.parent.mkdir(parents=True, exist_ok=True)
        Path(f"{prefix}_medians.csv").write_text(report.medians_csv())
        Path(f"{prefix}_ranks.csv").write_text(report.ranks_csv())
    return EXIT_OK


def cmd_export(args) -> int:
    text = export_problem(get_problem(args.id, args.strict_paper))
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text, end="")
    return EXIT_OK


def cmd_import(args) -> int:
    p = import_problem(Path(args.file).read_text())
    print(f"{p.id}: {p.n_vars} variables, {p.n_objectives} objectives, {p.n_constraints} constraints (valid)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="btms", description="BTMS benchmark suite tools")
    parser.add_argument("--strict-paper", action="store_true", help="drop the BTMS-9 anomalous term")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="list the problems").set_defaults(func=cmd_list)

    p = sub.add_parser("info", help="show a problem datasheet")
    p.add_argument("id")
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("eval", help="evaluate one decision vector")
    p.add_argument("id")
    p.add_argument("--x", required=True, help="comma-separated decision vector")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("front", help="sample a reference front ('all' writes every problem into --out DIR)")
    p.add_argument("id")
    p.add_argument("--n", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_front)

    p = sub.add_parser("optimize", help="single NSGA-II run")
    p.add_argument("id")
    p.add_argument("--pop", type=int)
    p.add_argument("--gens", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--config", help="JSON object of algorithm settings")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("run", help="run an experiment matrix")
    p.add_argument("--config", required=True)
    p.add_argument("--workers", type=int, help="override the config's worker count")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("rank", help="median and mean-rank tables from an indicator CSV")
    p.add_argument("--indicators", required=True)
    p.add_argument("--metric", choices=["hv", "igdplus"], default="hv")
    p.add_argument("--out", help="prefix for <prefix>_medians.csv and <prefix>_ranks.csv")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("export", help="write a problem as JSON")
    p.add_argument("id")
    p.add_argument("--out")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("import", help="validate a problem JSON file")
    p.add_argument("file")
    p.set_defaults(func=cmd_import)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except IncompleteMatrixError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RANKING
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except KeyError as exc:
        print(f"error: {exc.args[0] if exc.args else exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
