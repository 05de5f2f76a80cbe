"""Command line front end: ``orthopack solve|bench|generate|convert``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from . import bench
from .model import Instance, InstanceError, generate_instance, parse_instance, serialize_instance
from .okp import solve_okp
from .opp import FEASIBLE, INFEASIBLE, Limits, solve_opp
from .orlib import parse_orlib
from .spp import solve_spp
from .svg import emit_svg, layer_slices

EXIT_OK, EXIT_INPUT, EXIT_TIMEOUT = 0, 1, 2


def _read(path: str, fmt: str, columns: str | None) -> Instance:
    text = Path(path).read_text()
    if fmt == "orlib":
        if columns:
            return parse_orlib(text, tuple(columns.split(",")))[0]
        return parse_orlib(text)[0]
    inst = parse_instance(text)
    if not inst.name:
        inst = Instance(inst.W, inst.types, inst.kind, Path(path).stem)
    return inst


def _witness(instance: Instance, packing: dict) -> str:
    if not packing:
        return "witness: no boxes\n"
    if instance.d == 2:
        lines = [f"  box {b} (type {instance.boxes[b].type_index}) at {tuple(packing[b])}" for b in sorted(packing)]
        return "witness:\n" + "\n".join(lines) + "\n"
    return "witness by layers:\n" + layer_slices(instance, packing)


def cmd_solve(args: argparse.Namespace) -> int:
    try:
        instance = _read(args.path, args.format, args.columns)
    except (OSError, InstanceError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    limits = Limits(nodes=args.node_limit, seconds=args.time_limit)
    report: dict = {"problem": args.problem, "instance": instance.name, "d": instance.d, "W": list(instance.W)}
    height = None
    if args.problem == "opp":
        verdict = solve_opp(instance.with_container(instance.W, "decision"), limits=limits)
        proved = verdict.status in (FEASIBLE, INFEASIBLE)
        packing = verdict.packing or {}
        print(verdict.status)
        print(f"opp nodes: {verdict.nodes}")
        report.update(status=verdict.status, stats={"opp_nodes": verdict.nodes})
    elif args.problem == "okp":
        res = solve_okp(instance, limits, seed=args.seed)
        proved = res.optimal
        packing = res.packing
        print(f"value: {res.value}" + ("" if proved else f"  (upper bound {res.upper_bound})"))
        print(f"status: {res.status}")
        print(f"boxes: {len(res.subset)}")
        print(f"okp nodes: {res.stats.okp_nodes}  opp calls: {res.stats.opp_calls}  opp nodes: {res.stats.opp_nodes}")
        report.update(status=res.status, value=res.value, upper_bound=res.upper_bound, counts=list(res.counts),
                      stats=vars(res.stats))
    else:
        try:
            strip = instance.with_container(instance.W, "strip")
        except InstanceError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        res = solve_spp(strip, limits, seed=args.seed)
        proved = res.optimal
        packing = res.packing
        height = res.height
        print(f"height: {res.height}" + ("" if proved else f"  (lower bound {res.lower_bound})"))
        print(f"status: {res.status}")
        print(f"opp calls: {res.stats.opp_calls}  opp nodes: {res.stats.opp_nodes}")
        report.update(status=res.status, height=res.height, lower_bound=res.lower_bound, stats=vars(res.stats),
                      heights_tried=[list(t) for t in res.heights_tried])
    sys.stdout.write(_witness(instance, packing))
    report["packing"] = {str(b): list(p) for b, p in sorted(packing.items())}
    report["proved"] = proved
    if args.svg:
        if instance.d != 2:
            print("warning: SVG output needs d = 2, skipped", file=sys.stderr)
        elif packing or args.problem != "opp":
            Path(args.svg).write_text(emit_svg(instance, packing, height))
    if args.json:
        Path(args.json).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return EXIT_OK if proved else EXIT_TIMEOUT


def cmd_bench(args: argparse.Namespace) -> int:
    generated = dict(dimension=args.dimension, instance_type=args.type, m=args.m, nu=args.nu,
                     seeds=range(args.first_seed, args.first_seed + args.seeds))
    try:
        rows = bench.run_suite(args.suite, args.time_limit, args.seed, args.node_limit, args.data_dir or (),
                               args.jobs, generated)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    times = not args.no_times
    sys.stdout.write(bench.format_table(rows, times))
    mismatches = [r.instance for r in rows if r.match == "no"]
    if mismatches:
        print(f"MISMATCH: {', '.join(mismatches)}", file=sys.stderr)
    if args.json:
        Path(args.json).write_text(json.dumps([r.as_dict(times) for r in rows], indent=2) + "\n")
    return EXIT_OK


def cmd_generate(args: argparse.Namespace) -> int:
    inst = generate_instance(args.dimension, args.type, args.m, args.nu, args.seed)
    text = serialize_instance(inst)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_convert(args: argparse.Namespace) -> int:
    try:
        text = Path(args.path).read_text()
        problems = parse_orlib(text, tuple(args.columns.split(",")), args.dimension, name=args.name,
                               drop_oversized=args.drop_oversized)
    except (OSError, InstanceError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    for k, inst in enumerate(problems, 1):
        name = inst.name or f"{args.name or Path(args.path).stem}{k if len(problems) > 1 else ''}"
        inst = Instance(inst.W, inst.types, inst.kind, name)
        (out / f"{name}.txt").write_text(serialize_instance(inst))
        print(out / f"{name}.txt")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="orthopack", description="Exact orthogonal packing solvers.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve one instance")
    s.add_argument("problem", choices=("opp", "okp", "spp"))
    s.add_argument("path")
    s.add_argument("--format", choices=("canonical", "orlib"), default="canonical")
    s.add_argument("--columns", help="OR-library row layout, e.g. w1,w2,count,value")
    s.add_argument("--time-limit", type=float, default=None, help="seconds")
    s.add_argument("--node-limit", type=int, default=None)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--svg", help="write an SVG of the witness (d = 2)")
    s.add_argument("--json", help="write a JSON report")
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("bench", help="run a benchmark suite")
    b.add_argument("suite", help="paper-small | paper-medium | generated | empty")
    b.add_argument("--time-limit", type=float, default=900.0, help="seconds per instance")
    b.add_argument("--node-limit", type=int, default=None, help="OKP nodes per instance")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--data-dir", action="append", help="directory with <name>.txt instances")
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--json")
    b.add_argument("--no-times", action="store_true", help="omit wall times for reproducible tables")
    b.add_argument("--dimension", type=int, default=3)
    b.add_argument("--type", default="I", choices=("I", "II", "III"))
    b.add_argument("--m", type=int, default=20)
    b.add_argument("--nu", type=int, default=1)
    b.add_argument("--seeds", type=int, default=10)
    b.add_argument("--first-seed", type=int, default=1)
    b.set_defaults(func=cmd_bench)

    g = sub.add_parser("generate", help="random instance in canonical format")
    g.add_argument("--dimension", type=int, default=2)
    g.add_argument("--type", default="I", choices=("I", "II", "III"))
    g.add_argument("--m", type=int, default=20)
    g.add_argument("--nu", type=int, default=1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("convert", help="OR-library file to canonical instances")
    c.add_argument("path")
    c.add_argument("outdir")
    c.add_argument("--columns", default="w1,w2,count,value")
    c.add_argument("--dimension", type=int, default=2)
    c.add_argument("--name", default="")
    c.add_argument("--drop-oversized", action="store_true")
    c.set_defaults(func=cmd_convert)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
