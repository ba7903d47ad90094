"""Command-line interface: single runs, batches, program evaluation and generalizations."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional, Sequence

from .benchmarks import PROBLEM_NAMES, UnknownProblem, background_names, builtin_problem, run_batch
from .dataset import Dataset, DatasetError, load_dataset
from .evolution import CoveringFitness, RunConfig, run
from .generalize import generalizations, restricted_generalizations
from .reports import (
    batch_file_stem,
    batch_summary_text,
    batch_table_text,
    fraction_text,
    run_file_stem,
    run_report_text,
    timing_text,
    write_files,
)
from .rewriting import BUDGET_EXHAUSTED, normalize
from .syntax import ParseError, parse_equation, parse_program, print_equation, print_program
from .terms import is_program_legal


class CliError(Exception):
    """User-facing failure; the message is printed and the exit status is nonzero."""


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {value}")
    return value


def _non_negative(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative: {value}")
    return value


_CONFIG_FLAGS = {
    "min_population": ("--population", _positive),
    "max_iterations": ("--iterations", _non_negative),
    "max_basic_equations": ("--max-basic", _positive),
    "max_recursive_equations": ("--max-recursive", _positive),
    "max_equation_nodes": ("--max-nodes", _positive),
    "max_rewrite_steps": ("--max-rewrite-steps", _positive),
    "max_redex_searches": ("--max-redex-searches", _positive),
    "gp_max_depth": ("--gp-depth", _positive),
    "tournament_size": ("--tournament-size", _positive),
}


def _add_source(p: argparse.ArgumentParser, required: bool = True) -> None:
    group = p.add_mutually_exclusive_group(required=required)
    group.add_argument("--problem", help=f"built-in problem: {', '.join(PROBLEM_NAMES)}")
    group.add_argument("--dataset", type=Path, help="dataset file with #basic/#extra/#background sections")
    p.add_argument("--extra-cube-example", action="store_true",
                   help="add cube(4) = 64 to the extra examples of the cube problem")


def _add_config(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    for name, (flag, kind) in _CONFIG_FLAGS.items():
        p.add_argument(flag, dest=name, type=kind, default=None,
                       help=f"default {getattr(RunConfig(), name)}")


def _config(args, algorithm: str) -> RunConfig:
    overrides = {name: getattr(args, name) for name in _CONFIG_FLAGS if getattr(args, name) is not None}
    try:
        return RunConfig(algorithm=algorithm, seed=args.seed, **overrides)
    except ValueError as exc:
        raise CliError(str(exc)) from None


def _load(args) -> Dataset:
    if args.problem is not None:
        try:
            return builtin_problem(args.problem, with_extra_cube_example=args.extra_cube_example)
        except UnknownProblem as exc:
            raise CliError(exc.args[0]) from None
    path: Path = args.dataset
    if not path.is_file():
        raise CliError(f"dataset file not found: {path}")
    try:
        return load_dataset(path)
    except (ParseError, DatasetError) as exc:
        raise CliError(f"{path}: {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rewrite-evolve",
        description="Evolve rewriting programs from input/output examples.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="one seeded evolutionary run")
    _add_source(p)
    p.add_argument("--algorithm", choices=("haea", "gp"), default="haea")
    _add_config(p)
    p.add_argument("--out", type=Path, default=Path("reports"), help="report directory")
    p.add_argument("--quiet", action="store_true", help="no per-iteration progress on stderr")

    p = sub.add_parser("batch", help="seeded runs over several problems")
    p.add_argument("--runs", type=_positive, default=10, help="runs per problem and algorithm")
    p.add_argument("--problems", default="all", help="'all' or a comma-separated list")
    p.add_argument("--algorithm", choices=("haea", "gp", "both"), default="both")
    _add_config(p)
    p.add_argument("--jobs", type=_positive, default=1, help="worker processes")
    p.add_argument("--out", type=Path, default=Path("reports"), help="report directory")
    p.add_argument("--quiet", action="store_true", help="no per-run progress on stderr")

    p = sub.add_parser("eval", help="covering factor of a program on a dataset")
    p.add_argument("--program", type=Path, required=True, help="program file, one equation per line")
    _add_source(p)
    p.add_argument("--max-rewrite-steps", type=_positive, default=RunConfig.max_rewrite_steps)
    p.add_argument("--max-redex-searches", type=_positive, default=RunConfig.max_redex_searches)
    p.add_argument("--plain", action="store_true", help="print numerals as s(...) terms")

    p = sub.add_parser("generalize", help="generalizations of a ground example")
    p.add_argument("--example", required=True, help='ground equation such as "square_bino(0,0) = 0"')
    p.add_argument("--restricted", action="store_true", help="only program-legal generalizations")

    sub.add_parser("problems", help="list the built-in problems")
    return parser


def cmd_run(args) -> int:
    dataset = _load(args)
    cfg = _config(args, args.algorithm)
    problem = args.problem or dataset.name or "dataset"
    progress = None
    if not args.quiet:
        def progress(it, best):
            print(f"iteration {it}: best {best}", file=sys.stderr)
    rep = run(dataset, cfg, problem, progress)
    stem = run_file_stem(rep)
    paths = write_files(args.out, {
        f"{stem}.txt": run_report_text(rep),
        f"{stem}.timing": timing_text([("wall_seconds", rep.wall_time)]),
    })
    print(f"success: {str(rep.success).lower()}")
    print(f"fitness: {fraction_text(rep.best_fitness)}")
    print(f"iterations: {rep.iterations}")
    print(print_program(rep.best_program, numeral_sugar=True))
    print(f"report: {paths[0]}")
    return 0


def _problem_list(text: str) -> List[str]:
    if text == "all":
        return list(PROBLEM_NAMES)
    names = [n.strip() for n in text.split(",") if n.strip()]
    if not names:
        raise CliError("no problems given")
    unknown = [n for n in names if n not in PROBLEM_NAMES]
    if unknown:
        raise CliError(f"unknown problem(s): {', '.join(unknown)}; choose from {', '.join(PROBLEM_NAMES)}")
    return list(dict.fromkeys(names))


def cmd_batch(args) -> int:
    problems = _problem_list(args.problems)
    algorithms = ("haea", "gp") if args.algorithm == "both" else (args.algorithm,)
    cfg = _config(args, algorithms[0])
    progress = None
    if not args.quiet:
        def progress(rep):
            flag = "ok" if rep.success else "fail"
            print(f"{rep.algorithm} {rep.problem} seed {rep.seed}: {flag} ({rep.best_fitness})",
                  file=sys.stderr)
    batch = run_batch(problems, cfg, args.runs, algorithms, jobs=args.jobs, progress=progress)
    stem = batch_file_stem(batch, problems, args.problems == "all")
    files = {
        f"{stem}.tsv": batch_table_text(batch),
        f"{stem}.txt": batch_summary_text(batch),
        f"{stem}.timing": timing_text(
            [("batch_wall_seconds", batch.wall_time)]
            + [(f"{r.algorithm}\t{r.problem}\t{r.seed}", r.wall_time) for r in batch.reports]),
    }
    for rep in batch.reports:
        files[f"{stem}.runs/{run_file_stem(rep)}.txt"] = run_report_text(rep)
    write_files(args.out, files)
    sys.stdout.write(batch_summary_text(batch))
    return 0


def cmd_eval(args) -> int:
    dataset = _load(args)
    path: Path = args.program
    if not path.is_file():
        raise CliError(f"program file not found: {path}")
    try:
        program = parse_program(path.read_text(encoding="utf-8"))
    except ParseError as exc:
        raise CliError(f"{path}: {exc}") from None
    for e in program:
        if not is_program_legal(e, dataset.constructors()):
            raise CliError(f"{path}: equation is not a valid rule: {print_equation(e)}")
    cfg = replace(RunConfig(), max_rewrite_steps=args.max_rewrite_steps,
                  max_redex_searches=args.max_redex_searches)
    fitness = CoveringFitness(dataset, cfg.budget)
    sugar = not args.plain
    for e, ok in zip(fitness.examples, fitness.covered(program)):
        if ok:
            status = "deduced"
        else:
            out = normalize(program, dataset.background, e.lhs, cfg.budget)
            status = "budget-exhausted" if out.status == BUDGET_EXHAUSTED else "failed"
        print(f"{status}\t{print_equation(e, sugar)}")
    print(fraction_text(fitness(program), len(fitness.examples)))
    return 0


def cmd_generalize(args) -> int:
    try:
        example = parse_equation(args.example)
    except ParseError as exc:
        raise CliError(str(exc)) from None
    try:
        items = restricted_generalizations(example) if args.restricted else generalizations(example)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    for g in items:
        print(print_equation(g))
    kind = "restricted generalizations" if args.restricted else "generalizations"
    print(f"{len(items)} {kind}")
    return 0


def cmd_problems(args) -> int:
    for name in PROBLEM_NAMES:
        ds = builtin_problem(name)
        print(f"{name}\t{len(ds.examples)} examples\tbackground: {', '.join(background_names(name))}")
    return 0


COMMANDS = {
    "run": cmd_run,
    "batch": cmd_batch,
    "eval": cmd_eval,
    "generalize": cmd_generalize,
    "problems": cmd_problems,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
