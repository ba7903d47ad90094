"""Built-in algebra problems, their known solutions and the batch runner."""

from __future__ import annotations

import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .dataset import Dataset
from .evolution import RunConfig, RunReport, run
from .syntax import parse_equations, parse_program
from .terms import Program

BACKGROUND_SOURCE = {
    "sum": """
        sum(N,0) = N
        sum(N,s(M)) = s(sum(N,M))
    """,
    "prod": """
        prod(N,0) = 0
        prod(N,s(M)) = sum(prod(N,M),N)
    """,
    "double": """
        double(0) = 0
        double(s(N)) = s(s(double(N)))
    """,
    "triple": """
        triple(0) = 0
        triple(s(N)) = s(s(s(triple(N))))
    """,
    "square": """
        square(0) = 0
        square(s(N)) = sum(square(N),sum(s(N),N))
    """,
    "cube": """
        cube(0) = 0
        cube(s(N)) = s(sum(cube(N),triple(sum(square(N),N))))
    """,
}


def background(*names: str) -> Program:
    """Background program with the given functions, in the canonical listing order."""
    unknown = set(names) - set(BACKGROUND_SOURCE)
    if unknown:
        raise KeyError(f"unknown background functions: {sorted(unknown)}")
    text = "\n".join(BACKGROUND_SOURCE[n] for n in BACKGROUND_SOURCE if n in names)
    return parse_program(text)


_PROBLEMS: Dict[str, Tuple[str, str, Tuple[str, ...]]] = {
    "cube-bino": (
        "cube_bino(0,0) = 0",
        "cube_bino(1,0) = 1; cube_bino(0,1) = 1; cube_bino(1,1) = 8; cube_bino(2,0) = 8; cube_bino(0,2) = 8",
        ("sum", "prod", "triple", "square", "cube"),
    ),
    "cube": (
        "cube(0) = 0; cube(1) = 1",
        "cube(2) = 8; cube(3) = 27",
        ("sum", "triple", "square"),
    ),
    "square-bino": (
        "square_bino(0,0) = 0",
        "square_bino(1,0) = 1; square_bino(0,1) = 1; square_bino(1,1) = 4; square_bino(2,1) = 9; "
        "square_bino(2,2) = 16; square_bino(3,1) = 16; square_bino(2,3) = 25; square_bino(3,2) = 25",
        ("sum", "prod", "double", "square"),
    ),
    "square": (
        "square(0) = 0; square(1) = 1",
        "square(2) = 4; square(3) = 9; square(4) = 16; square(5) = 25",
        ("sum", "prod", "triple"),
    ),
    "square-trino": (
        "square_trino(0,0,0) = 0",
        "square_trino(0,1,1) = 4; square_trino(1,0,1) = 4; square_trino(1,1,0) = 4; square_trino(2,0,0) = 4; "
        "square_trino(0,2,0) = 4; square_trino(0,0,2) = 4; square_trino(1,1,1) = 9; square_trino(2,1,1) = 16; "
        "square_trino(1,2,1) = 16; square_trino(1,1,2) = 16",
        ("sum", "prod", "double", "square"),
    ),
    "sum-n": (
        "sum_n(0) = 0; sum_n(1) = 1",
        "sum_n(2) = 3; sum_n(3) = 6; sum_n(4) = 10",
        ("sum",),
    ),
    "sum-n-square": (
        "sum_n_square(0) = 0; sum_n_square(1) = 1",
        "sum_n_square(2) = 5; sum_n_square(3) = 14; sum_n_square(4) = 30",
        ("sum", "double", "square"),
    ),
}

PROBLEM_NAMES: Tuple[str, ...] = tuple(_PROBLEMS)

# extra example used to probe how the cube problem reacts to one more data point
CUBE_EXTRA_EXAMPLE = "cube(4) = 64"

_SOLUTIONS: Dict[str, Tuple[str, ...]] = {
    "cube-bino": (
        "cube_bino(A,B) = cube(sum(A,B))",
        "cube_bino(A,B) = sum(prod(sum(sum(prod(A,A),prod(B,B)),sum(prod(B,A),prod(A,B))),B),"
        "prod(A,sum(sum(prod(B,A),prod(B,A)),sum(prod(B,B),prod(A,A)))))",
    ),
    "cube": (
        "cube(0) = 0; cube(s(A)) = sum(triple(sum(square(A),A)),s(cube(A)))",
        "cube(s(A)) = sum(sum(sum(triple(square(A)),s(A)),sum(A,cube(A))),A); cube(A) = A",
    ),
    "square-bino": (
        "square_bino(A,B) = square(sum(B,A))",
        "square_bino(A,B) = sum(sum(prod(A,A),double(prod(A,B))),prod(B,B))",
    ),
    "square": (
        "square(s(A)) = sum(square(A),s(double(A))); square(0) = 0",
        "square(0) = 0; square(s(A)) = sum(sum(A,square(A)),s(A))",
    ),
    "square-trino": (
        "square_trino(A,B,C) = square(sum(B,sum(C,A)))",
        "square_trino(A,B,C) = sum(prod(sum(C,A),sum(B,sum(sum(B,C),A))),prod(B,B))",
    ),
    "sum-n": (
        "sum_n(0) = 0; sum_n(s(A)) = s(sum(sum_n(A),A))",
        "sum_n(s(A)) = sum(s(A),sum_n(A)); sum_n(A) = A",
    ),
    "sum-n-square": (
        "sum_n_square(s(A)) = sum(sum(square(A),A),sum(s(sum_n_square(A)),A)); sum_n_square(A) = A",
        "sum_n_square(s(A)) = sum(sum(sum_n_square(A),s(square(A))),sum(A,A)); sum_n_square(0) = 0",
    ),
}


class UnknownProblem(KeyError):
    pass


def _check(name: str) -> None:
    if name not in _PROBLEMS:
        raise UnknownProblem(f"unknown problem {name!r}; choose from {', '.join(PROBLEM_NAMES)}")


def builtin_problem(name: str, with_extra_cube_example: bool = False) -> Dataset:
    _check(name)
    basic, extra, bk = _PROBLEMS[name]
    extra_eqs = parse_equations(extra)
    if with_extra_cube_example and name == "cube":
        extra_eqs += parse_equations(CUBE_EXTRA_EXAMPLE)
    return Dataset(tuple(parse_equations(basic)), tuple(extra_eqs), background(*bk), name).validate()


def background_names(name: str) -> Tuple[str, ...]:
    _check(name)
    return _PROBLEMS[name][2]


def solution_oracles(name: str) -> List[Program]:
    _check(name)
    return [parse_program(src) for src in _SOLUTIONS[name]]


def oracle_dataset(name: str) -> Dataset:
    """The problem's dataset with background knowledge extended to every built-in function.

    The printed solutions for ``square`` call ``double``, which is not part of
    that problem's background knowledge.
    """
    ds = builtin_problem(name)
    return replace(ds, background=background(*BACKGROUND_SOURCE))


# ---------------------------------------------------------------------------
# batches


@dataclass
class ProblemRow:
    algorithm: str
    problem: str
    runs: int
    successes: int

    @property
    def failures(self) -> int:
        return self.runs - self.successes

    @property
    def success_percent(self) -> float:
        return 100.0 * self.successes / self.runs if self.runs else 0.0


@dataclass
class Quartiles:
    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float
    mean: float


def quartiles(values: Sequence[float]) -> Quartiles:
    """Five-number summary with linearly interpolated quartiles, plus the mean."""
    data = sorted(float(v) for v in values)
    if len(data) == 1:
        v = data[0]
        return Quartiles(v, v, v, v, v, v)
    q1, median, q3 = statistics.quantiles(data, n=4, method="inclusive")
    return Quartiles(data[0], q1, median, q3, data[-1], statistics.fmean(data))


@dataclass
class BatchReport:
    runs_per_problem: int
    seed: int
    reports: List[RunReport] = field(default_factory=list)
    wall_time: float = 0.0

    def algorithms(self) -> List[str]:
        return list(dict.fromkeys(r.algorithm for r in self.reports))

    def rows(self, algorithm: Optional[str] = None) -> List[ProblemRow]:
        table: Dict[Tuple[str, str], ProblemRow] = {}
        for r in self.reports:
            if algorithm is not None and r.algorithm != algorithm:
                continue
            row = table.setdefault((r.algorithm, r.problem), ProblemRow(r.algorithm, r.problem, 0, 0))
            row.runs += 1
            row.successes += r.success
        return list(table.values())

    def quartiles(self, algorithm: str) -> Quartiles:
        return quartiles([row.success_percent for row in self.rows(algorithm)])

    def mean_success(self, algorithm: str) -> float:
        return self.quartiles(algorithm).mean


def run_seed(base_seed: int, index: int) -> int:
    """Seed of the ``index``-th run; shared by all algorithms and problems."""
    return base_seed + index


def _job(args) -> RunReport:
    problem, cfg = args
    try:
        return run(builtin_problem(problem), cfg, problem)
    except Exception as exc:  # a failed run is recorded, the batch goes on
        return RunReport(cfg.algorithm, problem, cfg.seed, cfg, False, Program(), Fraction(0), 0, 0,
                         error=f"{type(exc).__name__}: {exc}")


def run_batch(problems: Sequence[str], cfg: RunConfig, runs_per_problem: int,
              algorithms: Sequence[str] = ("haea",), jobs: int = 1, progress=None) -> BatchReport:
    if runs_per_problem < 1:
        raise ValueError("runs_per_problem must be positive")
    for name in problems:
        _check(name)
    start = time.perf_counter()
    work = [(problem, replace(cfg, algorithm=alg, seed=run_seed(cfg.seed, k)))
            for alg in algorithms for problem in problems for k in range(runs_per_problem)]
    reports: List[RunReport] = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for rep in pool.map(_job, work):
                reports.append(rep)
                if progress:
                    progress(rep)
    else:
        for item in work:
            rep = _job(item)
            reports.append(rep)
            if progress:
                progress(rep)
    return BatchReport(runs_per_problem, cfg.seed, reports, time.perf_counter() - start)
