"""Variation operators over programs (ordered equation lists).

Every operator takes its parents, an :class:`OperatorContext` and a
``random.Random`` and returns an :class:`OperatorOutcome`.  Offspring always
satisfy the program invariants of the context: program-legal equations whose
lhs arguments are constructor terms, at most ``max_equation_nodes`` nodes per
equation and the basic/recursive equation caps.  Candidates that break an
invariant are dropped; when nothing survives the parent is returned unchanged
with ``applied=False``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .terms import (
    BUILTIN_CONSTRUCTORS,
    App,
    Equation,
    FreshVars,
    Occurrence,
    Program,
    Symbol,
    Term,
    Var,
    apply,
    canonical,
    occurrences,
    rename_fresh,
    replace_at,
    subterm_at,
    symbols,
    unify,
    variables,
)

# the equation lhs = rhs is handled as the term =(lhs, rhs); these two
# occurrences are never touched by subtree operators
_PROTECTED = {(), (1,)}


@dataclass(frozen=True)
class OperatorContext:
    defined: Dict[str, int]
    constructors: Dict[str, int] = field(default_factory=lambda: {"0": 0, "s": 1})
    background: Program = field(default_factory=Program)
    max_equation_nodes: int = 30
    max_basic: int = 3
    max_recursive: int = 3
    gp_depth: int = 2

    @classmethod
    def for_dataset(cls, dataset, **limits) -> "OperatorContext":
        constructors = {"0": 0, "s": 1}
        constructors.update(dataset.constructors())
        return cls(dataset.defined_symbols(), constructors, dataset.background, **limits)

    def scope(self, p: Program) -> Dict[str, int]:
        """Defined symbols visible to ``p``: context symbols plus its own lhs roots."""
        out = dict(self.defined)
        for name, arity in p.defined_symbols().items():
            out.setdefault(name, arity)
        return out

    def equation_ok(self, e: Equation, defined: Dict[str, int]) -> bool:
        lhs = e.lhs
        if type(lhs) is not App or not lhs.args or lhs.name in BUILTIN_CONSTRUCTORS:
            return False
        if e.node_count() > self.max_equation_nodes:
            return False
        for arg in lhs.args:
            if any(s.name in defined for s in symbols(arg)):
                return False
        return not e.orphans()

    def program_ok(self, p: Program) -> bool:
        if not p.equations:
            return False
        defined = self.scope(p)
        if not all(self.equation_ok(e, defined) for e in p.equations):
            return False
        n_rec = sum(1 for e in p.equations if e.is_recursive())
        return n_rec <= self.max_recursive and len(p.equations) - n_rec <= self.max_basic


@dataclass
class OperatorOutcome:
    offspring: List[Program]
    applied: bool


def _unchanged(p: Program) -> OperatorOutcome:
    return OperatorOutcome([p], False)


def _finish(parent: Program, candidates: Sequence[Program], ctx: OperatorContext) -> OperatorOutcome:
    kept = []
    for c in candidates:
        c = c.canonical()
        if ctx.program_ok(c):
            kept.append(c)
    if not kept:
        return _unchanged(parent)
    return OperatorOutcome(kept, True)


def _with(p: Program, i: int, e: Equation) -> Program:
    eqs = list(p.equations)
    eqs[i] = e
    return Program(tuple(eqs))


def _pick_equation(p: Program, eligible: Callable[[Equation], bool], rng: random.Random) -> Optional[int]:
    idx = [i for i, e in enumerate(p.equations) if eligible(e)]
    return rng.choice(idx) if idx else None


def repair_orphans(e: Equation, rng: random.Random) -> Optional[Equation]:
    """Replace each orphan rhs variable by a random lhs variable (None if impossible)."""
    orphans = e.orphans()
    if not orphans:
        return e
    lhs_vars = variables(e.lhs)
    if not lhs_vars:
        return None
    sigma = {x: Var(rng.choice(lhs_vars)) for x in orphans}
    return Equation(e.lhs, apply(sigma, e.rhs))


# ---------------------------------------------------------------------------
# equation-list operators


def global_xover(p1: Program, p2: Program, ctx: OperatorContext, rng: random.Random) -> OperatorOutcome:
    """Exchange one equation between the parents, inserting each at a random position."""
    if not p1.equations or not p2.equations:
        return _unchanged(p1)
    kinds = []
    for flag in (False, True):
        if any(e.is_recursive() == flag for e in p1) and any(e.is_recursive() == flag for e in p2):
            kinds.append(flag)
    if kinds:
        flag = rng.choice(kinds)
        i = rng.choice([k for k, e in enumerate(p1) if e.is_recursive() == flag])
        j = rng.choice([k for k, e in enumerate(p2) if e.is_recursive() == flag])
    else:
        i = rng.randrange(len(p1))
        j = rng.randrange(len(p2))
    e1, e2 = p1.equations[i], p2.equations[j]
    rest1 = list(p1.equations[:i] + p1.equations[i + 1:])
    rest2 = list(p2.equations[:j] + p2.equations[j + 1:])
    rest1.insert(rng.randint(0, len(rest1)), e2)
    rest2.insert(rng.randint(0, len(rest2)), e1)
    return _finish(p1, [Program(tuple(rest1)), Program(tuple(rest2))], ctx)


def global_swap(p: Program, ctx: OperatorContext, rng: random.Random) -> OperatorOutcome:
    if len(p) < 2:
        return _unchanged(p)
    i, j = rng.sample(range(len(p)), 2)
    eqs = list(p.equations)
    eqs[i], eqs[j] = eqs[j], eqs[i]
    return _finish(p, [Program(tuple(eqs))], ctx)


# ---------------------------------------------------------------------------
# intra-equation operators


def _eq_occurrences(e: Equation, keep: Callable[[Term, Occurrence], bool]) -> List[Occurrence]:
    t = e.as_term()
    return [u for u in occurrences(t) if u and keep(subterm_at(t, u), u)]


def _set_symbol(t: Term, name: str) -> App:
    return App(name, t.args)


def internal_swap(p: Program, ctx: OperatorContext, rng: random.Random) -> OperatorOutcome:
    """Swap two distinct arguments of a call with arity >= 2."""
    def wide(t, u):
        return type(t) is App and len(t.args) >= 2

    i = _pick_equation(p, lambda e: bool(_eq_occurrences(e, wide)), rng)
    if i is None:
        return _unchanged(p)
    e = p.equations[i]
    u = rng.choice(_eq_occurrences(e, wide))
    t = e.as_term()
    node = subterm_at(t, u)
    a, b = rng.sample(range(len(node.args)), 2)
    args = list(node.args)
    args[a], args[b] = args[b], args[a]
    new = Equation.from_term(replace_at(t, u, App(node.name, tuple(args))))
    return _finish(p, [_with(p, i, new)], ctx)


def functional_swap(p: Program, ctx: OperatorContext, rng: random.Random) -> OperatorOutcome:
    """Replace a call symbol by another defined symbol of the same arity.

    When the new symbol already occurs in the equation (outside the lhs root)
    the two occurrences trade symbols.
    """
    scope = ctx.scope(p)

    def alternatives(name: str, arity: int) -> List[str]:
        return [f for f, n in scope.items() if n == arity and f != name]

    def swappable(t, u):
        return (type(t) is App and u != (1,) and t.name in scope
                and scope[t.name] == len(t.args) and bool(alternatives(t.name, len(t.args))))

    i = _pick_equation(p, lambda e: bool(_eq_occurrences(e, swappable)), rng)
    if i is None:
        return _unchanged(p)
    e = p.equations[i]
    u = rng.choice(_eq_occurrences(e, swappable))
    t = e.as_term()
    node = subterm_at(t, u)
    other = rng.choice(alternatives(node.name, len(node.args)))
    partners = _eq_occurrences(
        e, lambda s, v: type(s) is App and v != (1,) and s.name == other and len(s.args) == len(node.args))
    t = replace_at(t, u, _set_symbol(node, other))
    if partners:
        v = rng.choice(partners)
        t = replace_at(t, v, _set_symbol(subterm_at(t, v), node.name))
    return _finish(p, [_with(p, i, Equation.from_term(t))], ctx)


def functional_rename(p: Program, ctx: OperatorContext, rng: random.Random) -> OperatorOutcome:
    """Move a unary wrapper ``h`` from one argument of a call to another.

    ``g(.., h(x), .., y, ..)`` becomes ``g(.., x, .., h(y), ..)``.
    """
    def wrapped_args(t) -> List[int]:
        return [k for k, a in enumerate(t.args) if type(a) is App and len(a.args) == 1]

    def qualifies(t, u):
        return type(t) is App and len(t.args) >= 2 and bool(wrapped_args(t))

    i = _pick_equation(p, lambda e: bool(_eq_occurrences(e, qualifies)), rng)
    if i is None:
        return _unchanged(p)
    e = p.equations[i]
    u = rng.choice(_eq_occurrences(e, qualifies))
    t = e.as_term()
    node = subterm_at(t, u)
    a = rng.choice(wrapped_args(node))
    b = rng.choice([k for k in range(len(node.args)) if k != a])
    wrapper = node.args[a]
    args = list(node.args)
    args[a] = wrapper.args[0]
    args[b] = App(wrapper.name, (node.args[b],))
    new = Equation.from_term(replace_at(t, u, App(node.name, tuple(args))))
    return _finish(p, [_with(p, i, new)], ctx)


# ---------------------------------------------------------------------------
# equalization and composition


def _preprocess(e: Equation, rng: random.Random) -> Equation:
    """Randomly re-point constants and rhs variables at lhs variables.

    Each lhs constant argument, rhs constant and rhs variable occurrence is
    independently replaced, with probability 0.5, by a uniformly chosen lhs
    variable.
    """
    lhs_vars = variables(e.lhs)
    if not lhs_vars:
        return e

    def redo(t: Term, in_lhs: bool, top: bool) -> Term:
        if type(t) is Var:
            if not in_lhs and rng.random() < 0.5:
                return Var(rng.choice(lhs_vars))
            return t
        if not t.args:
            if not top and rng.random() < 0.5:
                return Var(rng.choice(lhs_vars))
            return t
        return App(t.name, tuple(redo(a, in_lhs, False) for a in t.args))

    return Equation(redo(e.lhs, True, True), redo(e.rhs, False, False))


def equalization_candidates(receptor: Equation, emitter: Equation, rng: random.Random,
                            preprocess: bool = True) -> List[Equation]:
    """New equations obtained by planting the emitter's lhs into the receptor's rhs.

    The emitter is renamed apart; every receptor rhs occurrence that unifies
    with the emitter rhs yields one candidate, whose orphan variables are then
    mapped to random receptor lhs variables.
    """
    fresh = FreshVars(avoid=receptor.variables())
    emitter = rename_fresh(emitter, fresh)
    if preprocess:
        receptor = _preprocess(receptor, rng)
        emitter = _preprocess(emitter, rng)
    out = []
    for w in occurrences(receptor.rhs):
        if unify(subterm_at(receptor.rhs, w), emitter.rhs) is None:
            continue
        cand = repair_orphans(Equation(receptor.lhs, replace_at(receptor.rhs, w, emitter.lhs)), rng)
        if cand is not None:
            out.append(cand)
    return out


def _plant(base: Sequence[Equation], candidates: Sequence[Equation], rng: random.Random) -> List[Program]:
    merged = list(dict.fromkeys(canonical(e) for e in base))
    out = []
    for cand in candidates:
        cand = canonical(cand)
        if cand in merged:
            continue
        eqs = list(merged)
        eqs.insert(rng.randint(0, len(eqs)), cand)
        out.append(Program(tuple(eqs)))
    return out


def equalization(p1: Program, p2: Program, ctx: OperatorContext, rng: random.Random) -> OperatorOutcome:
    if not p1.equations or not p2.equations:
        return _unchanged(p1)
    receptor = rng.choice(p1.equations)
    emitter = rng.choice(p2.equations)
    cands = equalization_candidates(receptor, emitter, rng)
    return _finish(p1, _plant(p1.equations + p2.equations, cands, rng), ctx)


def composition(p: Program, ctx: OperatorContext, rng: random.Random) -> OperatorOutcome:
    """Equalization with a background-knowledge equation as emitter.

    Background equations stay global and are not copied into the offspring.
    """
    if not p.equations or not ctx.background.equations:
        return _unchanged(p)
    receptor = rng.choice(p.equations)
    emitter = rng.choice(ctx.background.equations)
    cands = equalization_candidates(receptor, emitter, rng)
    return _finish(p, _plant(p.equations, cands, rng), ctx)


# ---------------------------------------------------------------------------
# classic GP operators


def random_tree(method: str, depth: int, functions: Sequence[Symbol], terminals: Sequence[Term],
                rng: random.Random) -> Term:
    """Random tree with at most ``depth`` node levels (exactly, for ``full``)."""
    if method not in ("full", "grow"):
        raise ValueError(f"unknown method {method!r}")
    if depth < 1:
        raise ValueError("depth must be positive")
    if not terminals:
        raise ValueError("no terminals to build leaves from")
    if depth == 1 or not functions:
        return rng.choice(terminals)
    if method == "full":
        f = rng.choice(functions)
    else:
        k = rng.randrange(len(functions) + len(terminals))
        if k >= len(functions):
            return terminals[k - len(functions)]
        f = functions[k]
    return App(f.name, tuple(random_tree(method, depth - 1, functions, terminals, rng)
                             for _ in range(f.arity)))


def ramped_half_and_half(n: int, max_depth: int, functions: Sequence[Symbol], terminals: Sequence[Term],
                         rng: random.Random) -> List[Term]:
    """``n`` trees cycling depths 1..max_depth and alternating full/grow."""
    out = []
    for k in range(n):
        d = 1 + (k // 2) % max_depth
        out.append(random_tree("full" if k % 2 == 0 else "grow", d, functions, terminals, rng))
    return out


def _subtree_points(e: Equation) -> List[Occurrence]:
    return [u for u in occurrences(e.as_term()) if u not in _PROTECTED]


def _replace_in_equation(e: Equation, u: Occurrence, s: Term) -> Equation:
    return Equation.from_term(replace_at(e.as_term(), u, s))


def gp_xover(p1: Program, p2: Program, ctx: OperatorContext, rng: random.Random) -> OperatorOutcome:
    """Swap random subtrees between one equation of each parent."""
    if not p1.equations or not p2.equations:
        return _unchanged(p1)
    i = rng.randrange(len(p1))
    j = rng.randrange(len(p2))
    e1, e2 = p1.equations[i], p2.equations[j]
    u1 = rng.choice(_subtree_points(e1))
    u2 = rng.choice(_subtree_points(e2))
    s1 = subterm_at(e1.as_term(), u1)
    s2 = subterm_at(e2.as_term(), u2)
    out = []
    for p, k, e, u, s in ((p1, i, e1, u1, s2), (p2, j, e2, u2, s1)):
        new = repair_orphans(_replace_in_equation(e, u, s), rng)
        if new is not None:
            out.append(_with(p, k, new))
    return _finish(p1, out, ctx)


def gp_mutation(p: Program, ctx: OperatorContext, rng: random.Random,
                depth_cap: Optional[int] = None) -> OperatorOutcome:
    """Replace a random subtree by a grown tree.

    Inside the lhs the tree uses constructors, lhs variables and one fresh
    variable; in the rhs it may also call any defined symbol in scope.
    """
    if not p.equations:
        return _unchanged(p)
    depth_cap = depth_cap or ctx.gp_depth
    i = rng.randrange(len(p))
    e = p.equations[i]
    u = rng.choice(_subtree_points(e))
    lhs_vars = [Var(x) for x in variables(e.lhs)]
    constructor_syms = [Symbol(n, a) for n, a in ctx.constructors.items() if a > 0]
    constants = [App(n) for n, a in ctx.constructors.items() if a == 0]
    if u[0] == 1:
        fresh = FreshVars(avoid=e.variables())()
        functions, terminals = constructor_syms, constants + lhs_vars + [fresh]
    else:
        defined = [Symbol(n, a) for n, a in ctx.scope(p).items() if a > 0]
        functions, terminals = constructor_syms + defined, constants + lhs_vars
    if not terminals:
        return _unchanged(p)
    tree = random_tree("grow", depth_cap, functions, terminals, rng)
    new = repair_orphans(_replace_in_equation(e, u, tree), rng)
    if new is None:
        return _unchanged(p)
    return _finish(p, [_with(p, i, new)], ctx)


# ---------------------------------------------------------------------------
# registry

BINARY = "binary"
UNARY = "unary"
WITH_BACKGROUND = "background"

OPERATORS: Dict[str, Tuple[str, Callable[..., OperatorOutcome]]] = {
    "global_xover": (BINARY, global_xover),
    "global_swap": (UNARY, global_swap),
    "internal_swap": (UNARY, internal_swap),
    "equalization": (BINARY, equalization),
    "composition": (WITH_BACKGROUND, composition),
    "functional_swap": (UNARY, functional_swap),
    "functional_rename": (UNARY, functional_rename),
    "gp_xover": (BINARY, gp_xover),
    "gp_mutation": (UNARY, gp_mutation),
}

OPERATOR_NAMES: Tuple[str, ...] = tuple(OPERATORS)
GP_OPERATOR_NAMES: Tuple[str, ...] = ("gp_xover", "gp_mutation")


def apply_operator(name: str, parent: Program, mate: Optional[Program], ctx: OperatorContext,
                   rng: random.Random) -> OperatorOutcome:
    kind, fn = OPERATORS[name]
    if kind == BINARY:
        return fn(parent, mate if mate is not None else parent, ctx, rng)
    return fn(parent, ctx, rng)
