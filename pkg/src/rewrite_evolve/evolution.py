"""HaEa and classic GP evolution of programs, driven by covering-factor fitness."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .dataset import Dataset
from .generalize import initial_population
from .operators import (
    BINARY,
    GP_OPERATOR_NAMES,
    OPERATOR_NAMES,
    OPERATORS,
    OperatorContext,
    apply_operator,
)
from .rewriting import DEFAULT_BUDGET, EvalBudget, Evaluator, rules_of, to_value
from .terms import Program, symbols

RATE_FLOOR = 1e-4


@dataclass(frozen=True)
class RunConfig:
    algorithm: str = "haea"
    min_population: int = 500
    max_iterations: int = 100
    max_basic_equations: int = 3
    max_recursive_equations: int = 3
    max_equation_nodes: int = 30
    max_rewrite_steps: int = 500
    max_redex_searches: int = 500
    gp_max_depth: int = 2
    tournament_size: int = 4
    seed: int = 0

    def __post_init__(self):
        if self.algorithm not in ("haea", "gp"):
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        for name in ("min_population", "max_basic_equations", "max_recursive_equations",
                     "max_equation_nodes", "max_rewrite_steps", "max_redex_searches",
                     "gp_max_depth", "tournament_size"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be non-negative")

    @property
    def budget(self) -> EvalBudget:
        return EvalBudget(self.max_rewrite_steps, self.max_redex_searches)

    def context(self, dataset: Dataset) -> OperatorContext:
        return OperatorContext.for_dataset(
            dataset,
            max_equation_nodes=self.max_equation_nodes,
            max_basic=self.max_basic_equations,
            max_recursive=self.max_recursive_equations,
            gp_depth=self.gp_max_depth,
        )


# ---------------------------------------------------------------------------
# fitness


class CoveringFitness:
    """Covering factor of programs on a dataset, cached per program.

    Background-knowledge calls are memoized across programs when the program
    cannot influence them (it defines no symbol the background uses).
    """

    def __init__(self, dataset: Dataset, budget: EvalBudget = DEFAULT_BUDGET):
        self.dataset = dataset
        self.budget = budget
        self.examples = dataset.examples
        self.expected = [to_value(e.rhs) for e in self.examples]
        self.bk = dataset.background
        self.bk_names = set(self.bk.defined_symbols())
        self.bk_mentions = self.bk_names | {s.name for e in self.bk for s in symbols(e.rhs)}
        self.bk_memo: dict = {}
        self.cache: Dict[Program, Fraction] = {}
        self.evaluations = 0

    def covered(self, p: Program) -> List[bool]:
        """Per-example deduction flags, in :attr:`examples` order."""
        rules = rules_of(p, self.bk)
        if self.bk_mentions.isdisjoint(p.defined_symbols()):
            if len(self.bk_memo) > 2_000_000:
                self.bk_memo.clear()
            ev = Evaluator(rules, self.budget, self.bk_memo, self.bk_names)
        else:
            ev = Evaluator(rules, self.budget)
        return [ev.value(e.lhs) == want for e, want in zip(self.examples, self.expected)]

    def __call__(self, p: Program) -> Fraction:
        hit = self.cache.get(p)
        if hit is not None:
            return hit
        self.evaluations += 1
        f = Fraction(sum(self.covered(p)), len(self.examples))
        self.cache[p] = f
        return f


def covering_factor(p: Program, dataset: Dataset, budget: EvalBudget = DEFAULT_BUDGET) -> Fraction:
    """Fraction of the (deduplicated) basic and extra examples that ``p`` deduces."""
    return CoveringFitness(dataset, budget)(p)


# ---------------------------------------------------------------------------
# individuals and selection


@dataclass(frozen=True)
class Individual:
    program: Program
    fitness: Fraction
    rates: Tuple[float, ...] = ()


def normalize_rates(rates: Sequence[float], floor: float = RATE_FLOOR) -> Tuple[float, ...]:
    floored = [max(r, floor) for r in rates]
    total = sum(floored)
    return tuple(r / total for r in floored)


def random_rates(rng: random.Random, n: int = len(OPERATOR_NAMES)) -> Tuple[float, ...]:
    return normalize_rates([rng.random() for _ in range(n)])


def roulette(rates: Sequence[float], rng: random.Random) -> int:
    x = rng.random() * sum(rates)
    acc = 0.0
    for i, r in enumerate(rates):
        acc += r
        if x < acc:
            return i
    return len(rates) - 1


def tournament_select(pop: Sequence[Individual], k: int, rng: random.Random) -> Individual:
    """Best of ``k`` uniform draws with replacement; ties broken at random."""
    if not pop:
        raise ValueError("empty population")
    draws = [pop[rng.randrange(len(pop))] for _ in range(k)]
    best = max(ind.fitness for ind in draws)
    return rng.choice([ind for ind in draws if ind.fitness == best])


@dataclass
class StepInfo:
    operator: str
    applied: bool
    improved: bool


def haea_step(ind: Individual, pop: Sequence[Individual], fitness: Callable[[Program], Fraction],
              ctx: OperatorContext, cfg: RunConfig, rng: random.Random) -> Tuple[Individual, StepInfo]:
    """Evolve one individual: pick an operator by its rates, compare child and parent, adapt."""
    k = roulette(ind.rates, rng)
    name = OPERATOR_NAMES[k]
    mate = tournament_select(pop, cfg.tournament_size, rng).program if OPERATORS[name][0] == BINARY else None
    outcome = apply_operator(name, ind.program, mate, ctx, rng)
    child = rng.choice(outcome.offspring)
    child_fitness = fitness(child) if outcome.applied else ind.fitness
    learning_rate = 1.0 - rng.random()  # in (0, 1]
    rates = list(ind.rates)
    improved = child_fitness > ind.fitness
    if improved:
        rates[k] *= 1.0 + learning_rate
        winner, winner_fitness = child, child_fitness
    else:
        rates[k] *= 1.0 - learning_rate
        winner, winner_fitness = ind.program, ind.fitness
    return (Individual(winner, winner_fitness, normalize_rates(rates)),
            StepInfo(name, outcome.applied, improved))


def gp_step(ind: Individual, pop: Sequence[Individual], fitness: Callable[[Program], Fraction],
            ctx: OperatorContext, cfg: RunConfig, rng: random.Random) -> Tuple[Individual, StepInfo]:
    name = GP_OPERATOR_NAMES[0] if rng.random() < 0.5 else GP_OPERATOR_NAMES[1]
    mate = tournament_select(pop, cfg.tournament_size, rng).program if OPERATORS[name][0] == BINARY else None
    outcome = apply_operator(name, ind.program, mate, ctx, rng)
    child = rng.choice(outcome.offspring)
    child_fitness = fitness(child) if outcome.applied else ind.fitness
    if child_fitness > ind.fitness:
        return Individual(child, child_fitness), StepInfo(name, outcome.applied, True)
    return ind, StepInfo(name, outcome.applied, False)


# ---------------------------------------------------------------------------
# runs


@dataclass
class RunReport:
    algorithm: str
    problem: str
    seed: int
    config: RunConfig
    success: bool
    best_program: Program
    best_fitness: Fraction
    iterations: int
    population_size: int
    # (iteration, best fitness, mean fitness)
    trajectory: List[Tuple[int, Fraction, Fraction]] = field(default_factory=list)
    operator_rates: Dict[str, float] = field(default_factory=dict)
    # operator -> [selected, applied, improved]
    operator_usage: Dict[str, List[int]] = field(default_factory=dict)
    evaluations: int = 0
    wall_time: float = 0.0
    error: Optional[str] = None


def _stream(seed: int, iteration: int, index: int) -> random.Random:
    return random.Random(f"{seed}:{iteration}:{index}")


def _best(pop: Sequence[Individual]) -> Individual:
    best = pop[0]
    for ind in pop[1:]:
        if ind.fitness > best.fitness:
            best = ind
    return best


def _snapshot(it: int, pop: Sequence[Individual]) -> Tuple[int, Fraction, Fraction]:
    total = sum((ind.fitness for ind in pop), Fraction(0))
    return it, _best(pop).fitness, total / len(pop)


def run(dataset: Dataset, cfg: RunConfig, problem: str = "",
        progress: Optional[Callable[[int, Fraction], None]] = None) -> RunReport:
    """One seeded evolutionary run; the report is a pure function of its inputs."""
    start = time.perf_counter()
    ctx = cfg.context(dataset)
    fitness = CoveringFitness(dataset, cfg.budget)
    init_rng = random.Random(f"{cfg.seed}:init")
    programs = initial_population(dataset, cfg.min_population, init_rng)
    haea = cfg.algorithm == "haea"
    names = OPERATOR_NAMES if haea else GP_OPERATOR_NAMES
    pop = [Individual(p, fitness(p), random_rates(init_rng) if haea else ()) for p in programs]
    step = haea_step if haea else gp_step
    usage = {name: [0, 0, 0] for name in names}
    trajectory = [_snapshot(0, pop)]
    iterations = 0
    while iterations < cfg.max_iterations and _best(pop).fitness < 1:
        iterations += 1
        frozen = tuple(pop)
        nxt = []
        for i, ind in enumerate(frozen):
            new, info = step(ind, frozen, fitness, ctx, cfg, _stream(cfg.seed, iterations, i))
            counts = usage[info.operator]
            counts[0] += 1
            counts[1] += info.applied
            counts[2] += info.improved
            nxt.append(new)
        pop = nxt
        trajectory.append(_snapshot(iterations, pop))
        if progress is not None:
            progress(iterations, trajectory[-1][1])
    best = _best(pop)
    rates = {}
    if haea:
        for k, name in enumerate(names):
            rates[name] = sum(ind.rates[k] for ind in pop) / len(pop)
    return RunReport(
        algorithm=cfg.algorithm,
        problem=problem or dataset.name,
        seed=cfg.seed,
        config=cfg,
        success=best.fitness == 1,
        best_program=best.program,
        best_fitness=best.fitness,
        iterations=iterations,
        population_size=len(pop),
        trajectory=trajectory,
        operator_rates=rates,
        operator_usage=usage,
        evaluations=fitness.evaluations,
        wall_time=time.perf_counter() - start,
    )


def run_haea(dataset: Dataset, cfg: RunConfig, problem: str = "") -> RunReport:
    if cfg.algorithm != "haea":
        cfg = replace(cfg, algorithm="haea")
    return run(dataset, cfg, problem)


def run_gp(dataset: Dataset, cfg: RunConfig, problem: str = "") -> RunReport:
    if cfg.algorithm != "gp":
        cfg = replace(cfg, algorithm="gp")
    return run(dataset, cfg, problem)
