"""First-order terms, occurrences, substitutions, matching and unification.

Terms are immutable named tuples so that equality and hashing are structural
and cheap.  A variable is ``Var(name)``; an application is ``App(name, args)``
where ``args`` is a tuple of terms.  Constants are applications with no
arguments.  Occurrences are tuples of 1-based argument indices; the empty
tuple is the root occurrence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, NamedTuple, Optional, Tuple, Union


class Symbol(NamedTuple):
    name: str
    arity: int

    def __str__(self) -> str:
        return f"{self.name}/{self.arity}"


class Var(NamedTuple):
    name: str

    def __str__(self) -> str:
        return self.name


class App(NamedTuple):
    name: str
    args: Tuple["Term", ...] = ()

    @property
    def symbol(self) -> Symbol:
        return Symbol(self.name, len(self.args))

    def __str__(self) -> str:
        from .syntax import print_term

        return print_term(self)


Term = Union[Var, App]
Occurrence = Tuple[int, ...]
Substitution = Dict[str, Term]

ROOT: Occurrence = ()

ZERO = App("0")
NIL = App("[]")
SUCC = "s"
CONS = "•"

#: Constructors that are built into the language.
BUILTIN_CONSTRUCTORS: Dict[str, int] = {"0": 0, SUCC: 1, CONS: 2, "[]": 0}


class InvalidOccurrence(ValueError):
    """Raised when an occurrence does not address a subterm."""


def is_var(t: Term) -> bool:
    return type(t) is Var


def succ(t: Term) -> App:
    return App(SUCC, (t,))


def cons(head: Term, tail: Term) -> App:
    return App(CONS, (head, tail))


# ---------------------------------------------------------------------------
# structure


def node_count(t: Term) -> int:
    if type(t) is Var:
        return 1
    return 1 + sum(node_count(a) for a in t.args)


def depth(t: Term) -> int:
    """Number of node levels; a leaf has depth 1."""
    if type(t) is Var or not t.args:
        return 1
    return 1 + max(depth(a) for a in t.args)


def variables(t: Term) -> List[str]:
    """Variable names of ``t`` in left-to-right order of first appearance."""
    seen: Dict[str, None] = {}
    _collect_vars(t, seen)
    return list(seen)


def _collect_vars(t: Term, seen: Dict[str, None]) -> None:
    if type(t) is Var:
        seen[t.name] = None
    else:
        for a in t.args:
            _collect_vars(a, seen)


def is_ground(t: Term) -> bool:
    if type(t) is Var:
        return False
    return all(is_ground(a) for a in t.args)


def symbols(t: Term) -> Iterator[Symbol]:
    """Function symbols of ``t`` in pre-order, with repetitions."""
    if type(t) is App:
        yield t.symbol
        for a in t.args:
            yield from symbols(a)


def occurrences(t: Term) -> List[Occurrence]:
    """All occurrences of ``t`` in pre-order (lexicographic) order."""
    out: List[Occurrence] = []
    _walk(t, (), out, include_vars=True)
    return out


def non_var_occurrences(t: Term) -> List[Occurrence]:
    out: List[Occurrence] = []
    _walk(t, (), out, include_vars=False)
    return out


def _walk(t: Term, path: Occurrence, out: List[Occurrence], include_vars: bool) -> None:
    if type(t) is Var:
        if include_vars:
            out.append(path)
        return
    out.append(path)
    for i, a in enumerate(t.args, 1):
        _walk(a, path + (i,), out, include_vars)


def subterm_at(t: Term, u: Occurrence) -> Term:
    for i in u:
        if type(t) is Var or not 1 <= i <= len(t.args):
            raise InvalidOccurrence(f"occurrence {format_occurrence(u)} not in term")
        t = t.args[i - 1]
    return t


def replace_at(t: Term, u: Occurrence, s: Term) -> Term:
    if not u:
        return s
    i = u[0]
    if type(t) is Var or not 1 <= i <= len(t.args):
        raise InvalidOccurrence(f"occurrence {format_occurrence(u)} not in term")
    args = list(t.args)
    args[i - 1] = replace_at(args[i - 1], u[1:], s)
    return App(t.name, tuple(args))


def format_occurrence(u: Occurrence) -> str:
    return ".".join(map(str, u)) if u else "Λ"


# ---------------------------------------------------------------------------
# substitutions


def apply(sigma: Substitution, t: Term) -> Term:
    if not sigma:
        return t
    return _apply(sigma, t)


def _apply(sigma: Substitution, t: Term) -> Term:
    if type(t) is Var:
        return sigma.get(t.name, t)
    if not t.args:
        return t
    return App(t.name, tuple([_apply(sigma, a) for a in t.args]))


def compose(delta: Substitution, sigma: Substitution) -> Substitution:
    """Substitution equal to applying ``sigma`` first and then ``delta``."""
    out: Substitution = {}
    for x, s in sigma.items():
        s = apply(delta, s)
        if s != Var(x):
            out[x] = s
    for x, s in delta.items():
        if x not in sigma and s != Var(x):
            out[x] = s
    return out


def match(pattern: Term, subject: Term) -> Optional[Substitution]:
    """One-way matching: ``sigma`` with ``apply(sigma, pattern) == subject``."""
    sigma: Substitution = {}
    return sigma if _match(pattern, subject, sigma) else None


def _match(p: Term, s: Term, sigma: Substitution) -> bool:
    if type(p) is Var:
        bound = sigma.get(p.name)
        if bound is None:
            sigma[p.name] = s
            return True
        return bound == s
    if type(s) is Var or p.name != s.name or len(p.args) != len(s.args):
        return False
    for pa, sa in zip(p.args, s.args):
        if not _match(pa, sa, sigma):
            return False
    return True


def unify(t: Term, s: Term) -> Optional[Substitution]:
    """Most general unifier of ``t`` and ``s`` (idempotent), or None."""
    sigma: Substitution = {}
    stack = [(t, s)]
    while stack:
        a, b = stack.pop()
        a = _walk_binding(a, sigma)
        b = _walk_binding(b, sigma)
        if a == b:
            continue
        if type(a) is Var:
            if _occurs(a.name, b, sigma):
                return None
            sigma[a.name] = b
        elif type(b) is Var:
            if _occurs(b.name, a, sigma):
                return None
            sigma[b.name] = a
        elif a.name != b.name or len(a.args) != len(b.args):
            return None
        else:
            stack.extend(zip(a.args, b.args))
    # resolve triangular form into an idempotent substitution
    return {x: _resolve(v, sigma) for x, v in sigma.items()}


def _walk_binding(t: Term, sigma: Substitution) -> Term:
    while type(t) is Var and t.name in sigma:
        t = sigma[t.name]
    return t


def _occurs(x: str, t: Term, sigma: Substitution) -> bool:
    t = _walk_binding(t, sigma)
    if type(t) is Var:
        return t.name == x
    return any(_occurs(x, a, sigma) for a in t.args)


def _resolve(t: Term, sigma: Substitution) -> Term:
    t = _walk_binding(t, sigma)
    if type(t) is Var or not t.args:
        return t
    return App(t.name, tuple(_resolve(a, sigma) for a in t.args))


class FreshVars:
    """Generator of variable names that do not clash with ``avoid``."""

    def __init__(self, avoid: Iterable[str] = (), prefix: str = "N"):
        self.avoid = set(avoid)
        self.prefix = prefix
        self.counter = 0

    def __call__(self) -> Var:
        while True:
            self.counter += 1
            name = f"{self.prefix}{self.counter}"
            if name not in self.avoid:
                self.avoid.add(name)
                return Var(name)


# ---------------------------------------------------------------------------
# equations and programs


@dataclass(frozen=True)
class Equation:
    lhs: Term
    rhs: Term

    def __str__(self) -> str:
        from .syntax import print_equation

        return print_equation(self)

    @property
    def root(self) -> Optional[Symbol]:
        return self.lhs.symbol if type(self.lhs) is App else None

    def variables(self) -> List[str]:
        seen: Dict[str, None] = {}
        _collect_vars(self.lhs, seen)
        _collect_vars(self.rhs, seen)
        return list(seen)

    def orphans(self) -> List[str]:
        lhs_vars = set(variables(self.lhs))
        return [x for x in variables(self.rhs) if x not in lhs_vars]

    def node_count(self) -> int:
        return node_count(self.lhs) + node_count(self.rhs)

    def is_recursive(self) -> bool:
        root = self.root
        return root is not None and root in symbols(self.rhs)

    def as_term(self) -> App:
        return App("=", (self.lhs, self.rhs))

    @staticmethod
    def from_term(t: Term) -> "Equation":
        if type(t) is not App or t.name != "=" or len(t.args) != 2:
            raise ValueError("not an equation term")
        return Equation(t.args[0], t.args[1])

    def substitute(self, sigma: Substitution) -> "Equation":
        return Equation(apply(sigma, self.lhs), apply(sigma, self.rhs))


def is_program_legal(eq: Equation, constructors: Iterable[str] = BUILTIN_CONSTRUCTORS) -> bool:
    """Lhs rooted at a non-constant, non-constructor symbol and no orphan variables."""
    lhs = eq.lhs
    if type(lhs) is Var or not lhs.args or lhs.name in constructors:
        return False
    return not eq.orphans()


def rename_fresh(eq: Equation, fresh: FreshVars) -> Equation:
    """Consistently replace every variable of ``eq`` by a fresh one."""
    sigma: Substitution = {x: fresh() for x in eq.variables()}
    return eq.substitute(sigma)


def canonical_names() -> Iterator[str]:
    """A, B, ..., Z, AA, AB, ..."""
    letters = [chr(c) for c in range(ord("A"), ord("Z") + 1)]
    for c in letters:
        yield c
    width = 2
    while True:
        for idx in range(len(letters) ** width):
            name = ""
            for _ in range(width):
                idx, r = divmod(idx, len(letters))
                name = letters[r] + name
            yield name
        width += 1


def canonical(eq: Equation) -> Equation:
    """Rename variables to A, B, C, ... in order of first appearance."""
    names = eq.variables()
    sigma: Substitution = {}
    for x, new in zip(names, canonical_names()):
        if x != new:
            sigma[x] = Var(new)
    return eq.substitute(sigma) if sigma else eq


@dataclass(frozen=True)
class Program:
    """An ordered list of equations.

    Rule priority during rewriting follows list order.  The split into basic
    (non-recursive) and recursive equations is derived from each equation.
    """

    equations: Tuple[Equation, ...] = ()

    def __post_init__(self):
        if not isinstance(self.equations, tuple):
            object.__setattr__(self, "equations", tuple(self.equations))

    def __len__(self) -> int:
        return len(self.equations)

    def __iter__(self) -> Iterator[Equation]:
        return iter(self.equations)

    def __str__(self) -> str:
        return "; ".join(str(e) for e in self.equations)

    @property
    def basic(self) -> Tuple[Equation, ...]:
        return tuple(e for e in self.equations if not e.is_recursive())

    @property
    def recursive(self) -> Tuple[Equation, ...]:
        return tuple(e for e in self.equations if e.is_recursive())

    def defined_symbols(self) -> Dict[str, int]:
        out: Dict[str, int] = {}
        for e in self.equations:
            if type(e.lhs) is App:
                out.setdefault(e.lhs.name, len(e.lhs.args))
        return out

    def canonical(self) -> "Program":
        return Program(tuple(canonical(e) for e in self.equations))
