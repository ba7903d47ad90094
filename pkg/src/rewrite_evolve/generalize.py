"""Generalizations of ground examples and the initial population built from them."""

from __future__ import annotations

import random
from itertools import islice
from typing import Iterator, List, Sequence, Tuple

from .dataset import Dataset
from .terms import (
    BUILTIN_CONSTRUCTORS,
    App,
    Equation,
    Program,
    Term,
    Var,
    canonical,
    canonical_names,
    is_ground,
    is_program_legal,
)


class EmptyPool(ValueError):
    """No example produced a restricted generalization."""


def _names(n: int) -> List[str]:
    return list(islice(canonical_names(), n))


def _anti_instances(t: Term, classes: Tuple[Tuple[Term, str], ...], names: List[str]
                    ) -> Iterator[Tuple[Term, Tuple[Tuple[Term, str], ...]]]:
    """Every way of abstracting subterms of ``t`` given the classes chosen so far.

    A class pairs a ground subterm with the variable standing for it.  At each
    node the options are, in order: a new variable, any existing variable whose
    class holds an identical subterm (most recent first), or keeping the node
    and abstracting inside its arguments.
    """
    yield Var(names[len(classes)]), classes + ((t, names[len(classes)]),)
    for sub, name in reversed(classes):
        if sub == t:
            yield Var(name), classes
    if t.args:
        for args, cls in _args_anti_instances(t.args, classes, names):
            yield App(t.name, args), cls
    else:
        yield t, classes


def _args_anti_instances(args: Sequence[Term], classes, names):
    if not args:
        yield (), classes
        return
    for first, cls in _anti_instances(args[0], classes, names):
        for rest, cls2 in _args_anti_instances(args[1:], cls, names):
            yield (first,) + rest, cls2


def generalizations(e: Equation) -> List[Equation]:
    """All generalizations of ground ``e``, with variables named A, B, ... left to right."""
    if not (is_ground(e.lhs) and is_ground(e.rhs)):
        raise ValueError(f"example is not ground: {e}")
    names = _names(e.node_count() + 1)
    seen = {}
    for (lhs, rhs), _ in _args_anti_instances((e.lhs, e.rhs), (), names):
        g = Equation(lhs, rhs)
        seen.setdefault(canonical(g), None)
    return list(seen)


def restricted_generalizations(e: Equation, constructors=BUILTIN_CONSTRUCTORS) -> List[Equation]:
    return [g for g in generalizations(e) if is_program_legal(g, constructors)]


def initial_population(dataset: Dataset, min_size: int, rng: random.Random) -> List[Program]:
    """One-equation programs from every restricted generalization of the basic examples.

    Each distinct equation appears once; the pool is then padded by uniform
    sampling with replacement until it holds ``min_size`` programs.
    """
    if min_size < 1:
        raise ValueError("min_size must be positive")
    pool = {}
    for ex in dataset.positive_basic:
        for g in restricted_generalizations(ex):
            pool.setdefault(g, None)
    if not pool:
        raise EmptyPool("no example yields a restricted generalization")
    programs = [Program((g,)) for g in pool]
    population = list(programs)
    while len(population) < min_size:
        population.append(programs[rng.randrange(len(programs))])
    return population
