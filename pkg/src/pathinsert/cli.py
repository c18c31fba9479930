"""Command-line front end.

Exit status: 0 on success (an empty result included), 1 for unreadable or
invalid input, 2 when an emitted path fails its own conflict check.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from . import bench, documents
from .documents import format_clock, parse_duration, parse_time, read_file
from .errors import InvariantViolation, PathInsertError
from .generate import GenConfig, generate
from .model import InsertionRequest
from .oracle import oracle_frontier
from .paths import frontier_records, path_records, paths_from_tree
from .pipeline import insert
from .plot import render
from .verify import validate

log = logging.getLogger("pathinsert")

EXIT_OK, EXIT_INPUT, EXIT_VERIFY = 0, 1, 2
NO_PATH = "no feasible path"


class VerificationFailed(Exception):
    pass


def _instance_args(p, required=True):
    p.add_argument("--network", required=required, help="network document")
    p.add_argument("--timetable", required=required, help="timetable document")
    p.add_argument("--params", required=required, help="parameter document")


def _request_args(p, required=True):
    p.add_argument("--from", dest="origin", required=required, help="origin station")
    p.add_argument("--to", dest="destination", required=required, help="destination station")
    p.add_argument("--window-start", type=parse_time, required=required, help="seconds, HH:MM[:SS] or ISO time")
    p.add_argument("--window-end", type=parse_time, required=required)
    p.add_argument("--routes", type=int, default=3, help="alternative routes to consider (default 3)")
    p.add_argument("--no-stop", default="", help="comma-separated stations where the train may not stop")


def _out_args(p):
    p.add_argument("--out", help="write here instead of standard output")
    p.add_argument("--format", choices=("text", "json"), default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pathinsert", description=__doc__.splitlines()[0])
    parser.add_argument("--verbose", "-v", action="store_true", help="log progress, timings and table sizes")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("insert", help="find non-dominated paths for a new train")
    _instance_args(p)
    _request_args(p)
    _out_args(p)
    p.add_argument("--dump-tables", metavar="FILE", help="write every table and the size profile here")

    p = sub.add_parser("oracle", help="brute-force frontier on a time grid (for checking)")
    _instance_args(p)
    _request_args(p)
    _out_args(p)
    p.add_argument("--grid", type=parse_duration, default=60, help="grid step in seconds (default 60)")

    p = sub.add_parser("validate", help="report problems in the input documents")
    _instance_args(p)

    p = sub.add_parser("gen", help="write a seeded synthetic instance")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--stations", type=int, default=5)
    p.add_argument("--trains", type=int, default=4)
    p.add_argument("--window-start", type=parse_time, default=0)
    p.add_argument("--window-end", type=parse_time, default=4 * 3600)
    p.add_argument("--double-share", type=float, default=0.5, help="share of double-track links")
    p.add_argument("--local-share", type=float, default=0.3, help="share of trains running only part of the line")
    p.add_argument("--topology", choices=("corridor", "diamond"), default="corridor")
    p.add_argument("--grid", type=int, default=60, help="align times to this step; 0 for arbitrary seconds")
    p.add_argument("--days", type=int, default=1, help="repeat the timetable on this many days")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("plot", help="time-distance diagram as SVG")
    _instance_args(p)
    p.add_argument("--paths", help="path records written by insert")
    p.add_argument("--line", help="comma-separated stations to draw (default: the first path)")
    p.add_argument("--window-start", type=parse_time)
    p.add_argument("--window-end", type=parse_time)
    p.add_argument("--flip", action="store_true", help="time downwards instead of across")
    p.add_argument("--out", help="SVG file (default standard output)")

    p = sub.add_parser("bench", help="query time against window length")
    _instance_args(p, required=False)
    _request_args(p, required=False)
    p.add_argument("--multipliers", default="1,2,3,4", help="window multiples (days on the synthetic line)")
    p.add_argument("--reps", type=int, default=5, help="runs per window (default 5)")
    p.add_argument("--seed", type=int, default=bench.CORRIDOR["seed"], help="synthetic line seed")
    p.add_argument("--profile", metavar="FILE", help="write the table-size profile of the largest window here")
    p.add_argument("--out", help="timing table file (default standard output)")
    return parser


# ------------------------------------------------------------ helpers


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load(args):
    net = documents.load_network(read_file(args.network), args.network)
    tt = documents.load_timetable(read_file(args.timetable), net, args.timetable)
    params = documents.load_parameters(read_file(args.params), net, tt, args.params)
    return net, tt, params


def _request(args) -> InsertionRequest:
    no_stop = frozenset(s for s in args.no_stop.split(",") if s)
    return InsertionRequest(args.origin, args.destination, (args.window_start, args.window_end), no_stop, args.routes)


# ------------------------------------------------------------ commands


def cmd_insert(args) -> int:
    net, tt, params = _load(args)
    report = insert(net, tt, params, _request(args))
    for name, ms in report.timings.items():
        log.info("%s: %.1f ms", name, ms)
    if args.dump_tables and report.tables is not None:
        _emit(report.tables.dump() + "\n\n" + bench.profile_tsv(report.tables), args.dump_tables)
    tree = {"result": [{"status": "ok" if report.frontier else NO_PATH, "paths": len(report.frontier)}]}
    tree["frontier"] = frontier_records(report.frontier)
    tree["path"] = path_records(report.paths)
    _emit(documents.write_tree(tree, args.format), args.out)
    if not report.frontier:
        print(NO_PATH, file=sys.stderr)
    for n, (pt, bad) in enumerate(zip(report.frontier, report.violations), start=1):
        log.info("path %d: %s -> %s (+%d s family)", n, format_clock(pt.departure), format_clock(pt.arrival), pt.slack)
        for v in bad:
            print(f"path {n}: {v}", file=sys.stderr)
    if not report.clean:
        raise VerificationFailed(f"{sum(map(bool, report.violations))} emitted path(s) break a margin")
    return EXIT_OK


def cmd_oracle(args) -> int:
    net, tt, params = _load(args)
    points = oracle_frontier(net, tt, params, _request(args), g=args.grid)
    _emit(documents.write_tree({"frontier": frontier_records(points)}, args.format), args.out)
    return EXIT_OK


def cmd_validate(args) -> int:
    diags = validate(*_load(args))
    for d in diags:
        print(d)
    if not diags:
        print("no problems found")
    return EXIT_OK


def cmd_gen(args) -> int:
    cfg = GenConfig(
        stations=args.stations,
        trains=args.trains,
        window=(args.window_start, args.window_end),
        seed=args.seed,
        grid=args.grid or None,
        double_share=args.double_share,
        local_share=args.local_share,
        topology=args.topology,
        days=args.days,
    )
    inst = generate(cfg)
    os.makedirs(args.out, exist_ok=True)
    ext = "json" if args.format == "json" else "txt"
    for name, text in (
        ("network", documents.dump_network(inst.network, args.format)),
        ("timetable", documents.dump_timetable(inst.timetable, args.format)),
        ("params", documents.dump_parameters(inst.params, args.format)),
    ):
        _emit(text, os.path.join(args.out, f"{name}.{ext}"))
    lo, hi = inst.window
    print(f"--from {inst.origin} --to {inst.destination} --window-start {lo} --window-end {hi}")
    return EXIT_OK


def cmd_plot(args) -> int:
    net, tt, params = _load(args)
    paths = paths_from_tree(documents.parse_document(read_file(args.paths), args.paths)) if args.paths else []
    line = [s for s in args.line.split(",") if s] if args.line else None
    window = None
    if args.window_start is not None and args.window_end is not None:
        window = (args.window_start, args.window_end)
    _emit(render(net, tt, params, paths, stations=line, window=window, flip=args.flip), args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    multipliers = [int(m) for m in args.multipliers.split(",") if m]
    if args.network:
        if not (args.timetable and args.params and args.origin and args.destination):
            raise PathInsertError("bench on files needs --timetable, --params, --from, --to and the window")
        net, tt, params = _load(args)
        req = _request(args)
        inst = bench.Instance(net, tt, params, req.origin, req.destination, req.window)
        rows, tables = [], None
        for m in multipliers:
            row, tables = bench.time_instance(bench.widen(inst, req, m), m, args.reps)
            rows.append(row)
    else:
        rows, tables = bench.scaling(multipliers, args.reps, lambda d: bench.corridor(d, seed=args.seed))
    _emit(bench.timing_tsv(rows), args.out)
    if len(rows) >= 3:
        slope, _, r2 = bench.linear_fit([r.multiplier for r in rows], [r.mean_ms for r in rows])
        print(f"linear fit: {slope:.2f} ms per window multiple, R^2 = {r2:.4f}", file=sys.stderr)
    if args.profile and tables is not None:
        _emit(bench.profile_tsv(tables), args.profile)
    return EXIT_OK


COMMANDS = {
    "insert": cmd_insert,
    "oracle": cmd_oracle,
    "validate": cmd_validate,
    "gen": cmd_gen,
    "plot": cmd_plot,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (VerificationFailed, InvariantViolation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (PathInsertError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
