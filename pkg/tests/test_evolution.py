import random
from fractions import Fraction

import pytest

from rewrite_evolve.benchmarks import builtin_problem, solution_oracles, oracle_dataset
from rewrite_evolve.evolution import (
    RATE_FLOOR,
    CoveringFitness,
    Individual,
    RunConfig,
    covering_factor,
    haea_step,
    normalize_rates,
    random_rates,
    roulette,
    run_gp,
    run_haea,
    tournament_select,
)
from rewrite_evolve.operators import OPERATOR_NAMES, OperatorOutcome
from rewrite_evolve.reports import run_report_text
from rewrite_evolve.syntax import parse_program
from rewrite_evolve.terms import Program

SMALL = RunConfig(min_population=40, max_iterations=6)


def test_covering_examples():
    ds = builtin_problem("sum-n")
    assert covering_factor(parse_program("sum_n(A) = A"), ds) == Fraction(2, 5)
    assert covering_factor(Program(), ds) == 0
    for sol in solution_oracles("sum-n"):
        assert covering_factor(sol, oracle_dataset("sum-n")) == 1


def test_fitness_cache_counts_distinct_programs():
    fit = CoveringFitness(builtin_problem("sum-n"))
    p = parse_program("sum_n(A) = A")
    assert fit(p) == fit(p) == Fraction(2, 5)
    assert fit.evaluations == 1
    flags = fit.covered(p)
    assert len(flags) == 5 and sum(flags) == 2


def test_rates_invariants():
    rng = random.Random(0)
    for _ in range(200):
        rates = random_rates(rng)
        assert len(rates) == len(OPERATOR_NAMES)
        assert abs(sum(rates) - 1) < 1e-12
        assert min(rates) > 0
    skewed = normalize_rates([1.0, 0.0, 0.0])
    assert abs(sum(skewed) - 1) < 1e-12
    assert min(skewed) >= RATE_FLOOR / (1 + 2 * RATE_FLOOR) - 1e-15


def test_roulette_frequencies():
    rng = random.Random(3)
    counts = [0, 0, 0]
    for _ in range(30000):
        counts[roulette([0.2, 0.3, 0.5], rng)] += 1
    assert [round(c / 30000, 1) for c in counts] == [0.2, 0.3, 0.5]


def test_tournament_prefers_fitter():
    pop = [Individual(Program(), Fraction(k, 10)) for k in range(10)]
    rng = random.Random(0)
    wins = [tournament_select(pop, 4, rng).fitness for _ in range(2000)]
    assert sum(wins) / len(wins) > Fraction(6, 10)
    assert tournament_select(pop[:1], 4, rng) is pop[0]
    with pytest.raises(ValueError):
        tournament_select([], 4, rng)


class _FixedOperator:
    """Stands in for an operator with a known child."""

    def __init__(self, child):
        self.child = child

    def __call__(self, name, parent, mate, ctx, rng):
        return OperatorOutcome([self.child], True)


@pytest.mark.parametrize("child_fit, rewarded, keeps_parent", [
    (Fraction(3, 5), True, False),
    (Fraction(2, 5), False, True),
    (Fraction(1, 5), False, True),
])
def test_haea_step_reward_and_punish(monkeypatch, child_fit, rewarded, keeps_parent):
    parent = parse_program("sum_n(A) = A")
    child = parse_program("sum_n(0) = 0")
    monkeypatch.setattr("rewrite_evolve.evolution.apply_operator", _FixedOperator(child))
    rates = normalize_rates([1.0] * len(OPERATOR_NAMES))
    ind = Individual(parent, Fraction(2, 5), rates)
    ds = builtin_problem("sum-n")
    for seed in range(20):
        new, info = haea_step(ind, [ind], lambda p: child_fit, SMALL.context(ds), SMALL, random.Random(seed))
        k = OPERATOR_NAMES.index(info.operator)
        assert abs(sum(new.rates) - 1) < 1e-12
        others = [r for j, r in enumerate(new.rates) if j != k]
        if rewarded:
            assert new.rates[k] > rates[k] and all(r < rates[0] for r in others)
        else:
            assert new.rates[k] < rates[k] and all(r > rates[0] for r in others)
        assert info.improved == rewarded
        assert (new.program == parent) == keeps_parent
        assert new.fitness == (ind.fitness if keeps_parent else child_fit)


def test_zero_iterations_reports_initial_population():
    ds = builtin_problem("square-bino")
    rep = run_haea(ds, RunConfig(min_population=10, max_iterations=0, seed=1))
    assert rep.iterations == 0
    assert len(rep.trajectory) == 1
    assert rep.population_size >= 10


@pytest.mark.parametrize("runner", [run_haea, run_gp])
def test_runs_are_deterministic(runner):
    ds = builtin_problem("sum-n")
    cfg = RunConfig(min_population=40, max_iterations=5, seed=4)
    assert run_report_text(runner(ds, cfg, "sum-n")) == run_report_text(runner(ds, cfg, "sum-n"))


@pytest.mark.parametrize("runner", [run_haea, run_gp])
def test_best_fitness_never_decreases(runner):
    rep = runner(builtin_problem("square-trino"), RunConfig(min_population=40, max_iterations=8, seed=2))
    bests = [b for _, b, _ in rep.trajectory]
    assert bests == sorted(bests)
    means = [m for _, _, m in rep.trajectory]
    assert means == sorted(means)


def test_run_stops_at_success():
    rep = run_haea(builtin_problem("sum-n"), RunConfig(seed=7))
    assert rep.success and rep.best_fitness == 1
    assert rep.iterations < 100
    assert rep.trajectory[-1][1] == 1 and all(b < 1 for _, b, _ in rep.trajectory[:-1])


def test_config_validation():
    with pytest.raises(ValueError):
        RunConfig(algorithm="es")
    with pytest.raises(ValueError):
        RunConfig(min_population=0)
    with pytest.raises(ValueError):
        RunConfig(max_iterations=-1)
