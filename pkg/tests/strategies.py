"""Random terms for property tests.

Terms are built by a plain seeded generator and exposed to Hypothesis through
a drawn integer seed; this keeps a thousand cases per property fast.
"""

import random

from hypothesis import strategies as st

from rewrite_evolve.terms import App, Equation, Term, Var

VAR_NAMES = ["A", "B", "C", "N", "M", "X"]
FUNCTIONS = [("f", 1), ("g", 2), ("h", 3), ("s", 1), ("sum", 2), ("•", 2)]
CONSTANTS = ["0", "a", "[]"]


def random_term(rng: random.Random, size: int = 8, ground: bool = False) -> Term:
    if size <= 1 or rng.random() < 0.25:
        if not ground and rng.random() < 0.5:
            return Var(rng.choice(VAR_NAMES))
        return App(rng.choice(CONSTANTS))
    name, arity = rng.choice(FUNCTIONS)
    budget = max(1, (size - 1) // arity)
    return App(name, tuple(random_term(rng, budget, ground) for _ in range(arity)))


def random_substitution(rng: random.Random) -> dict:
    keys = rng.sample(VAR_NAMES, rng.randint(0, 4))
    return {k: random_term(rng, 6) for k in keys}


_seeds = st.integers(min_value=0, max_value=2**32 - 1).map(random.Random)

terms = _seeds.map(random_term)
ground_terms = _seeds.map(lambda r: random_term(r, ground=True))
substitutions = _seeds.map(random_substitution)
equations = _seeds.map(lambda r: Equation(random_term(r), random_term(r)))
