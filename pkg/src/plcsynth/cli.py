"""Command-line front end.

Operates on a file-based project: blocks live in `.st`/`.il` source files,
constraint lists in `.xml` files.  Exit codes: 0 success or Verified,
1 Violated/Unsatisfiable/inconsistent, 2 usage or input errors,
3 size-bound or internal errors.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, replace
from pathlib import Path

from .bench import SCENARIO_NAMES, BenchReport, bench_run, scenario
from .blocks import Block, Lang, TypeCheckError
from .constraints import (
    ConstraintList, SchemaError, check_consistency, compile_spec,
    load_constraints,
)
from .engine import (
    Counterexample, SizeBoundExceeded, SynthConfig, Unsatisfiable, Verified,
    equivalent, extend, repair, simplify, synthesize, verify,
)
from .lang import ParseError, emit, parse_il, parse_st, translate

EXIT_OK = 0
EXIT_VIOLATED = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3


@dataclass(frozen=True)
class ProjectLayout:
    """A project directory: blocks/*.st|*.il plus constraints/*.xml."""
    root: Path
    blocks: dict[str, Block]
    constraint_lists: tuple[ConstraintList, ...]

    @classmethod
    def scan(cls, root) -> "ProjectLayout":
        root = Path(root)
        blocks: dict[str, Block] = {}
        for path in sorted((root / "blocks").glob("*")):
            if path.suffix not in (".st", ".il"):
                continue
            block = load_block(path)
            if block.name in blocks:
                raise SchemaError(1, f"duplicate block name '{block.name}' "
                                     f"({path.name})")
            blocks[block.name] = block
        lists = []
        for path in sorted((root / "constraints").glob("*.xml")):
            cl = load_constraints(path)
            if cl.block_name not in blocks:
                raise SchemaError(1, f"constraint list {path.name} names "
                                     f"unknown block '{cl.block_name}'")
            lists.append(cl)
        return cls(root, blocks, tuple(lists))


def load_block(path) -> Block:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".il":
        return parse_il(text)
    return parse_st(text)


def write_block(block: Block, path) -> None:
    path = Path(path)
    lang = Lang.IL if path.suffix == ".il" else Lang.ST
    path.write_text(emit(block, lang), encoding="utf-8")


def _default_out(block_path: str, op: str, lang: Lang) -> Path:
    source = Path(block_path)
    return source.with_name(f"{source.stem}.{op}.{lang.value}")


def print_counterexample(cex: Counterexample, out) -> None:
    if cex.init_state:
        state = " ".join(f"{n}={int(v)}" for n, v in cex.init_state.items())
        print(f"init: {state}", file=out)
    for index, inputs in enumerate(cex.input_cycles):
        cells = " ".join(f"{n}={int(v)}" for n, v in inputs.items())
        print(f"cycle {index}: {cells}", file=out)
    print(f"violated: {cex.violated}", file=out)


def _summary(op: str, result, path) -> str:
    return (f"{op}: wrote {path} "
            f"(slots {result.slots_used}, iterations {result.iterations}, "
            f"{result.wall_time * 1000:.1f} ms)")


def _config(args) -> SynthConfig:
    cfg = SynthConfig()
    if getattr(args, "seed", None) is not None:
        cfg = replace(cfg, seed=args.seed)
    if getattr(args, "max_slots", None) is not None:
        cfg = replace(cfg, max_slots=args.max_slots)
    if getattr(args, "joint", False):
        cfg = replace(cfg, per_output=False)
    if getattr(args, "cycles", None) is not None:
        cfg = replace(cfg, unwind_cycles=args.cycles)
    if getattr(args, "symbolic_init", False):
        cfg = replace(cfg, symbolic_init=True)
    return cfg


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plcsynth",
        description="Synthesize, verify, repair, simplify and translate "
                    "Boolean PLC blocks from constraint lists.")
    sub = parser.add_subparsers(dest="command", required=True)

    synth = sub.add_parser("synth", help="generate a block from constraints")
    synth.add_argument("--constraints", required=True)
    synth.add_argument("--out")
    synth.add_argument("--lang", choices=["st", "il"], default="st")
    synth.add_argument("--seed", type=int)
    synth.add_argument("--max-slots", dest="max_slots", type=int)
    synth.add_argument("--joint", action="store_true")

    ver = sub.add_parser("verify", help="check a block against constraints")
    ver.add_argument("--block", required=True)
    ver.add_argument("--constraints", required=True)
    ver.add_argument("--cycles", type=int)
    ver.add_argument("--symbolic-init", dest="symbolic_init", action="store_true")

    rep = sub.add_parser("repair", help="minimally edit a block to meet constraints")
    rep.add_argument("--block", required=True)
    rep.add_argument("--constraints", required=True)
    rep.add_argument("--out")
    rep.add_argument("--seed", type=int)

    simp = sub.add_parser("simplify", help="minimize a block without changing behavior")
    simp.add_argument("--block", required=True)
    simp.add_argument("--out")
    simp.add_argument("--seed", type=int)

    ext = sub.add_parser("extend", help="add new behavior with minimal edits")
    ext.add_argument("--block", required=True)
    ext.add_argument("--constraints", required=True)
    ext.add_argument("--out")
    ext.add_argument("--seed", type=int)

    tr = sub.add_parser("translate", help="convert a block to the other dialect")
    tr.add_argument("--block", required=True)
    tr.add_argument("--to", required=True, choices=["st", "il"])
    tr.add_argument("--out")

    bench = sub.add_parser("bench", help="run a warehouse synthesis benchmark")
    bench.add_argument("--scenario", required=True, choices=list(SCENARIO_NAMES))
    bench.add_argument("--repeat", type=int, default=10)
    bench.add_argument("--seed", type=int, default=0)

    check = sub.add_parser("check", help="report conflicting truth-table rows")
    check.add_argument("--constraints", required=True)
    return parser


def _cmd_synth(args, out) -> int:
    constraint_list = load_constraints(args.constraints)
    spec = compile_spec(constraint_list)
    cfg = _config(args)
    result = synthesize(constraint_list.interface, spec, cfg,
                        name=constraint_list.block_name)
    lang = Lang(args.lang)
    block = translate(result.block, lang)
    path = Path(args.out) if args.out else Path(f"{block.name}.{lang.value}")
    write_block(block, path)
    print(_summary("synth", result, path), file=out)
    return EXIT_OK


def _cmd_verify(args, out) -> int:
    block = load_block(args.block)
    spec = compile_spec(load_constraints(args.constraints))
    result = verify(block, spec, _config(args))
    if isinstance(result, Verified):
        print(f"Verified (bound {result.bound})", file=out)
        return EXIT_OK
    print_counterexample(result.counterexample, out)
    return EXIT_VIOLATED


def _cmd_repair(args, out) -> int:
    block = load_block(args.block)
    spec = compile_spec(load_constraints(args.constraints))
    result = repair(block, spec, _config(args))
    path = Path(args.out) if args.out else _default_out(args.block, "repaired",
                                                        block.lang)
    write_block(result.block, path)
    print(_summary("repair", result, path), file=out)
    return EXIT_OK


def _cmd_simplify(args, out) -> int:
    block = load_block(args.block)
    result = simplify(block, _config(args))
    path = Path(args.out) if args.out else _default_out(args.block, "simplified",
                                                        block.lang)
    write_block(result.block, path)
    print(_summary("simplify", result, path), file=out)
    return EXIT_OK


def _cmd_extend(args, out) -> int:
    block = load_block(args.block)
    extra = load_constraints(args.constraints)
    result = extend(block, extra, _config(args))
    path = Path(args.out) if args.out else _default_out(args.block, "extended",
                                                        block.lang)
    write_block(result.block, path)
    print(_summary("extend", result, path), file=out)
    return EXIT_OK


def _cmd_translate(args, out) -> int:
    block = load_block(args.block)
    target = Lang(args.to)
    result = translate(block, target)
    outcome = equivalent(block, result, SynthConfig(unwind_cycles=2))
    if not isinstance(outcome, Verified):
        print("internal error: translation changed behavior", file=out)
        return EXIT_INTERNAL
    path = Path(args.out) if args.out else _default_out(args.block, "translated",
                                                        target)
    write_block(result, path)
    print(f"translate: wrote {path} ({block.lang.value} -> {target.value})",
          file=out)
    return EXIT_OK


def _format_seconds(value: float) -> str:
    return f"{value * 1000:.2f} ms" if value < 1.0 else f"{value:.3f} s"


def _print_bench(report: BenchReport, out) -> None:
    print(f"scenario: {report.scenario} (n={report.repeats})", file=out)
    print(f"  mean {_format_seconds(report.stats.mean)}  "
          f"stddev {_format_seconds(report.stats.stddev)}", file=out)
    for name, comp in sorted(report.per_component.items()):
        print(f"  component {name}: mean {_format_seconds(comp.mean)}  "
              f"stddev {_format_seconds(comp.stddev)}", file=out)


def _cmd_bench(args, out) -> int:
    spec = scenario(args.scenario)
    report = bench_run(spec, args.repeat, SynthConfig(seed=args.seed))
    _print_bench(report, out)
    return EXIT_OK


def _cmd_check(args, out) -> int:
    constraint_list = load_constraints(args.constraints)
    report = check_consistency(constraint_list)
    if report.consistent:
        print("consistent", file=out)
        return EXIT_OK
    for conflict in report.conflicts:
        witness = " ".join(f"{n}={int(v)}" for n, v in conflict.witness.items())
        print(f"conflict: constraints {conflict.first} and {conflict.second} "
              f"disagree on {conflict.output} at {witness}", file=out)
    return EXIT_VIOLATED


_COMMANDS = {
    "synth": _cmd_synth,
    "verify": _cmd_verify,
    "repair": _cmd_repair,
    "simplify": _cmd_simplify,
    "extend": _cmd_extend,
    "translate": _cmd_translate,
    "bench": _cmd_bench,
    "check": _cmd_check,
}


def run(argv, out=None) -> int:
    """Dispatch one subcommand; every termination path maps to an exit code."""
    out = out if out is not None else sys.stdout
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return _COMMANDS[args.command](args, out)
    except Unsatisfiable as exc:
        print(f"unsatisfiable: {exc}", file=out)
        return EXIT_VIOLATED
    except (ParseError, SchemaError, TypeCheckError, ValueError) as exc:
        print(f"error: {exc}", file=out)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=out)
        return EXIT_USAGE
    except SizeBoundExceeded as exc:
        print(f"error: {exc}", file=out)
        return EXIT_INTERNAL
    except Exception as exc:  # BenchValidationError, replay failures, bugs
        print(f"internal error: {exc}", file=out)
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
