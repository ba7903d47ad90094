"""Bounded eager rewriting of ground terms.

Two routes compute the same thing:

* :func:`rewrite_step` performs one leftmost-innermost step on a term and is
  the literal definition; :func:`normalize_by_steps` iterates it.
* :class:`Evaluator` is the production path.  It evaluates arguments before
  trying rules at a node, which visits redexes in exactly leftmost-innermost
  order, and keeps Peano numerals as Python ints while doing so.

Rules are tried in order: the program's equations first, then background
knowledge, the first matching rule wins.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .terms import (
    BUILTIN_CONSTRUCTORS,
    SUCC,
    ZERO,
    App,
    Equation,
    Occurrence,
    Program,
    Term,
    Var,
    apply,
    match,
    replace_at,
)

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))


@dataclass(frozen=True)
class EvalBudget:
    max_rewrite_steps: int = 500
    max_redex_searches: int = 500

    def __post_init__(self):
        if self.max_rewrite_steps < 1 or self.max_redex_searches < 1:
            raise ValueError("budget bounds must be positive")

    @property
    def step_limit(self) -> int:
        # every successful normalization ends with one search that finds nothing
        return min(self.max_rewrite_steps, self.max_redex_searches - 1)


DEFAULT_BUDGET = EvalBudget()

NORMAL_FORM = "normal_form"
STUCK = "stuck"
BUDGET_EXHAUSTED = "budget_exhausted"


@dataclass(frozen=True)
class EvalOutcome:
    status: str
    term: Optional[Term]
    steps: int

    @property
    def ok(self) -> bool:
        return self.status == NORMAL_FORM


def rules_of(p: Program, bk: Optional[Program] = None) -> Tuple[Equation, ...]:
    return tuple(p.equations) + (tuple(bk.equations) if bk is not None else ())


def defined_names(rules: Iterable[Equation]) -> Dict[str, None]:
    return {e.lhs.name: None for e in rules if type(e.lhs) is App}


# ---------------------------------------------------------------------------
# reference route


def find_redex(rules: Sequence[Equation], t: Term) -> Optional[Tuple[Occurrence, int, Dict[str, Term]]]:
    """Leftmost-innermost redex: the first redex in post-order."""
    return _find(rules, t, ())


def _find(rules, t, path):
    if type(t) is Var:
        return None
    for i, a in enumerate(t.args, 1):
        hit = _find(rules, a, path + (i,))
        if hit is not None:
            return hit
    for k, rule in enumerate(rules):
        sigma = match(rule.lhs, t)
        if sigma is not None:
            return path, k, sigma
    return None


def rewrite_step(rules: Sequence[Equation], t: Term) -> Optional[Tuple[Term, int, Occurrence]]:
    """One leftmost-innermost step ``(new term, rule index, occurrence)`` or None."""
    hit = find_redex(rules, t)
    if hit is None:
        return None
    u, k, sigma = hit
    return replace_at(t, u, apply(sigma, rules[k].rhs)), k, u


def normalize_by_steps(p: Program, bk: Optional[Program], t: Term,
                       budget: EvalBudget = DEFAULT_BUDGET) -> EvalOutcome:
    """Normalization by literally iterating :func:`rewrite_step`."""
    rules = rules_of(p, bk)
    searches = budget.max_redex_searches
    steps = 0
    while True:
        if searches == 0:
            return EvalOutcome(BUDGET_EXHAUSTED, None, steps)
        searches -= 1
        res = rewrite_step(rules, t)
        if res is None:
            return _final(t, steps, defined_names(rules))
        if steps == budget.max_rewrite_steps:
            return EvalOutcome(BUDGET_EXHAUSTED, None, steps)
        t = res[0]
        steps += 1


def _final(t: Term, steps: int, defined: Dict[str, None]) -> EvalOutcome:
    if _mentions(t, defined):
        return EvalOutcome(STUCK, t, steps)
    return EvalOutcome(NORMAL_FORM, t, steps)


def _mentions(t: Term, names: Dict[str, None]) -> bool:
    if type(t) is Var:
        return False
    if t.name in names:
        return True
    return any(_mentions(a, names) for a in t.args)


# ---------------------------------------------------------------------------
# fast route

Value = Union[int, App]


class _Exhausted(Exception):
    pass


def to_value(t: Term) -> Value:
    """Ground term to evaluator value: numerals become ints."""
    if type(t) is Var:
        raise ValueError(f"term is not ground: variable {t.name}")
    if t.name == "0" and not t.args:
        return 0
    args = tuple(to_value(a) for a in t.args)
    if t.name == SUCC and len(args) == 1 and type(args[0]) is int:
        return args[0] + 1
    return App(t.name, args)


def to_term(v: Value) -> Term:
    if type(v) is int:
        t: Term = ZERO
        for _ in range(v):
            t = App(SUCC, (t,))
        return t
    if not v.args:
        return v
    return App(v.name, tuple(to_term(a) for a in v.args))


def _match_value(p: Term, v: Value, env: dict) -> bool:
    if type(p) is Var:
        bound = env.get(p.name)
        if bound is None:
            env[p.name] = v
            return True
        return bound == v
    name = p.name
    if name == "0" and not p.args:
        return type(v) is int and v == 0
    if type(v) is int:
        if name == SUCC and len(p.args) == 1:
            return v > 0 and _match_value(p.args[0], v - 1, env)
        return False
    if v.name != name or len(v.args) != len(p.args):
        return False
    for pa, va in zip(p.args, v.args):
        if not _match_value(pa, va, env):
            return False
    return True


class Evaluator:
    """Compiled rule table for repeated normalization under one budget.

    Completed calls are memoized together with the number of steps they took,
    so step accounting (and therefore every outcome) is identical to plain
    evaluation.  A call that re-enters itself with identical arguments can
    never finish and is reported as budget exhaustion straight away.
    ``shared_memo`` lets several evaluators reuse results for symbols whose
    rules they have in common (background knowledge).
    """

    def __init__(self, rules: Sequence[Equation], budget: EvalBudget = DEFAULT_BUDGET,
                 shared_memo: Optional[dict] = None, shared_names: Iterable[str] = ()):
        self.rules = tuple(rules)
        self.budget = budget
        self.limit = budget.step_limit
        table: Dict[str, List[Tuple[Tuple[Term, ...], Term]]] = {}
        for e in self.rules:
            if type(e.lhs) is not App:
                raise ValueError(f"rule with variable lhs: {e}")
            if e.lhs.name in BUILTIN_CONSTRUCTORS:
                raise ValueError(f"rule redefines constructor {e.lhs.name}: {e}")
            table.setdefault(e.lhs.name, []).append((e.lhs.args, e.rhs))
        self.table = {k: tuple(v) for k, v in table.items()}
        self.steps = 0
        self.memo: dict = {}
        self.shared_memo = shared_memo if shared_memo is not None else {}
        self.shared_names = frozenset(shared_names)
        self.active: set = set()

    @classmethod
    def for_program(cls, p: Program, bk: Optional[Program] = None,
                    budget: EvalBudget = DEFAULT_BUDGET) -> "Evaluator":
        return cls(rules_of(p, bk), budget)

    def _ev(self, t: Term, env: dict) -> Value:
        if type(t) is Var:
            return env[t.name]
        name, args = t
        if not args:
            if name == "0":
                return 0
            vals: tuple = ()
        elif name == SUCC and len(args) == 1:
            v = self._ev(args[0], env)
            return v + 1 if type(v) is int else App(SUCC, (v,))
        else:
            vals = tuple([self._ev(a, env) for a in args])
        rules = self.table.get(name)
        if rules is None:
            return App(name, vals)
        key = (name, vals)
        memo = self.shared_memo if name in self.shared_names else self.memo
        hit = memo.get(key)
        if hit is not None:
            self.steps += hit[1]
            if self.steps > self.limit:
                raise _Exhausted
            return hit[0]
        n = len(vals)
        for pats, rhs in rules:
            if len(pats) != n:
                continue
            b: dict = {}
            for pa, va in zip(pats, vals):
                if not _match_value(pa, va, b):
                    break
            else:
                if key in self.active:
                    raise _Exhausted
                start = self.steps
                self.steps += 1
                if self.steps > self.limit:
                    raise _Exhausted
                self.active.add(key)
                try:
                    v = self._ev(rhs, b)
                finally:
                    self.active.discard(key)
                memo[key] = (v, self.steps - start)
                return v
        v = App(name, vals)
        memo[key] = (v, 0)
        return v

    def value(self, t: Term) -> Optional[Value]:
        """Normal form of ground ``t`` as a value, or None if the budget runs out."""
        self.steps = 0
        self.active.clear()
        try:
            return self._ev(t, {})
        except _Exhausted:
            b = self.budget
            self.steps = min(b.max_rewrite_steps, b.max_redex_searches)
            return None

    def normalize(self, t: Term) -> EvalOutcome:
        v = self.value(t)
        if v is None:
            return EvalOutcome(BUDGET_EXHAUSTED, None, self.steps)
        return _final(to_term(v), self.steps, self.table)

    def deduces(self, e: Equation) -> bool:
        v = self.value(e.lhs)
        return v is not None and v == to_value(e.rhs)


def normalize(p: Program, bk: Optional[Program], t: Term,
              budget: EvalBudget = DEFAULT_BUDGET) -> EvalOutcome:
    rules = rules_of(p, bk)
    if any(type(e.lhs) is not App or e.lhs.name in BUILTIN_CONSTRUCTORS for e in rules):
        return normalize_by_steps(p, bk, t, budget)
    return Evaluator(rules, budget).normalize(t)


def deduces(p: Program, bk: Optional[Program], e: Equation,
            budget: EvalBudget = DEFAULT_BUDGET) -> bool:
    """Whether the program normalizes ``e.lhs`` to exactly ``e.rhs``."""
    out = normalize(p, bk, e.lhs, budget)
    return out.ok and out.term == e.rhs
