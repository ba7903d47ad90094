"""Datasets of input/output examples and their text file format.

A dataset file holds ground equations in three sections::

    % comments start with a percent sign
    #basic
    sum_n(0) = 0
    sum_n(1) = 1
    #extra
    sum_n(2) = 3; sum_n(3) = 6
    #background
    sum(N,0) = N
    sum(N,s(M)) = s(sum(N,M))

Equations are separated by newlines or ``;``.  The target symbol is the lhs
root of the basic examples.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Tuple, Union

from .syntax import ParseError, parse_equations, print_equation
from .terms import (
    BUILTIN_CONSTRUCTORS,
    App,
    Equation,
    Program,
    Symbol,
    is_ground,
    is_program_legal,
    symbols,
)

SECTIONS = ("basic", "extra", "background")


class DatasetError(ValueError):
    """Dataset content violates the dataset invariants."""


@dataclass(frozen=True)
class Dataset:
    positive_basic: Tuple[Equation, ...]
    positive_extra: Tuple[Equation, ...] = ()
    background: Program = field(default_factory=Program)
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "positive_basic", tuple(self.positive_basic))
        object.__setattr__(self, "positive_extra", tuple(self.positive_extra))

    @property
    def target(self) -> Symbol:
        if not self.positive_basic:
            raise DatasetError("dataset has no basic examples")
        return self.positive_basic[0].lhs.symbol

    @property
    def examples(self) -> Tuple[Equation, ...]:
        """Set union of the basic and extra examples, in order."""
        return tuple(dict.fromkeys(self.positive_basic + self.positive_extra))

    def defined_symbols(self) -> Dict[str, int]:
        """Target symbol followed by the background knowledge's defined symbols."""
        out = {self.target.name: self.target.arity}
        for name, arity in self.background.defined_symbols().items():
            out.setdefault(name, arity)
        return out

    def constructors(self) -> Dict[str, int]:
        """Constructor symbols occurring in the examples and background knowledge."""
        defined = self.defined_symbols()
        out: Dict[str, int] = {}
        terms = [t for e in self.examples + self.background.equations for t in (e.lhs, e.rhs)]
        for t in terms:
            for sym in symbols(t):
                if sym.name not in defined:
                    out.setdefault(sym.name, sym.arity)
        return out

    def validate(self) -> "Dataset":
        if not self.positive_basic:
            raise DatasetError("dataset has no basic examples")
        target = self.target
        if target.name in BUILTIN_CONSTRUCTORS or target.arity == 0:
            raise DatasetError(f"target {target} must be a non-constant function")
        defined = self.defined_symbols()
        for e in self.examples:
            if not (is_ground(e.lhs) and is_ground(e.rhs)):
                raise DatasetError(f"example is not ground: {e}")
            if e.lhs.symbol != target:
                raise DatasetError(f"example not rooted at {target}: {e}")
            if any(s.name in defined for s in symbols(e.rhs)):
                raise DatasetError(f"example rhs is not a constructor term: {e}")
        for e in self.background:
            if not is_program_legal(e):
                raise DatasetError(f"background equation is not program-legal: {e}")
        return self


def parse_dataset(text: str, name: str = "") -> Dataset:
    sections: Dict[str, List[Equation]] = {s: [] for s in SECTIONS}
    current = None
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.split("%", 1)[0].strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            key = stripped[1:].strip().lower()
            if key not in sections:
                raise ParseError(f"unknown section {stripped!r}", lineno, 1)
            current = key
            continue
        if current is None:
            raise ParseError("equation outside of a section", lineno, 1)
        try:
            sections[current].extend(parse_equations(line))
        except ParseError as exc:
            raise ParseError(str(exc).split(": ", 1)[1], lineno, exc.column) from None
    ds = Dataset(tuple(sections["basic"]), tuple(sections["extra"]),
                 Program(tuple(sections["background"])), name)
    return ds.validate()


def load_dataset(path: Union[str, Path]) -> Dataset:
    path = Path(path)
    return parse_dataset(path.read_text(encoding="utf-8"), name=path.stem)


def dump_dataset(ds: Dataset, numeral_sugar: bool = True) -> str:
    lines = []
    if ds.name:
        lines.append(f"% {ds.name}")
    for section, eqs in zip(SECTIONS, (ds.positive_basic, ds.positive_extra, ds.background.equations)):
        lines.append(f"#{section}")
        # background rules keep the s(...) form so patterns stay readable
        sugar = numeral_sugar and section != "background"
        lines.extend(print_equation(e, sugar) for e in eqs)
    return "\n".join(lines) + "\n"
