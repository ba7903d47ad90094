"""Inductive synthesis of rewriting programs from examples by adaptive evolution."""

from .benchmarks import PROBLEM_NAMES, builtin_problem, run_batch, solution_oracles
from .dataset import Dataset, load_dataset, parse_dataset
from .evolution import RunConfig, RunReport, covering_factor, run, run_gp, run_haea
from .generalize import generalizations, initial_population, restricted_generalizations
from .rewriting import EvalBudget, deduces, normalize
from .syntax import parse_equation, parse_program, parse_term, print_equation, print_program, print_term
from .terms import App, Equation, Program, Var

__version__ = "0.1.0"

__all__ = [
    "App", "Dataset", "EvalBudget", "Equation", "PROBLEM_NAMES", "Program", "RunConfig", "RunReport",
    "Var", "builtin_problem", "covering_factor", "deduces", "generalizations", "initial_population",
    "load_dataset", "normalize", "parse_dataset", "parse_equation", "parse_program", "parse_term",
    "print_equation", "print_program", "print_term", "restricted_generalizations", "run", "run_batch",
    "run_gp", "run_haea", "solution_oracles",
]
