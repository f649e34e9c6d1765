"""Syntax tree of model files.

Expressions are kept as tuples of terms ``(coefficient, ((name, exponent), ...))``
with the factors in the order written, so that graded signs are applied only
when an expression is placed in an algebra.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Set, Tuple, Union

Factor = Tuple[str, int]
Term = Tuple[Fraction, Tuple[Factor, ...]]
Expr = Tuple[Term, ...]


def _merge_factors(factors: Iterable[Factor]) -> Tuple[Factor, ...]:
    merged: List[Factor] = []
    for name, exponent in factors:
        if merged and merged[-1][0] == name:
            merged[-1] = (name, merged[-1][1] + exponent)
        else:
            merged.append((name, exponent))
    return tuple(f for f in merged if f[1] != 0)


def expr_sum(*parts: Expr) -> Expr:
    """Sum of expressions; equal factor lists are combined and zero terms dropped."""
    order: List[Tuple[Factor, ...]] = []
    totals: Dict[Tuple[Factor, ...], Fraction] = {}
    for part in parts:
        for coefficient, factors in part:
            if factors not in totals:
                order.append(factors)
                totals[factors] = Fraction(0)
            totals[factors] += coefficient
    return tuple((totals[f], f) for f in order if totals[f] != 0)


def expr_product(a: Expr, b: Expr) -> Expr:
    return expr_sum(tuple((ca * cb, _merge_factors(fa + fb)) for ca, fa in a for cb, fb in b))


def expr_scale(a: Expr, factor: Fraction) -> Expr:
    return expr_sum(tuple((c * factor, f) for c, f in a))


def expr_constant(value: Fraction) -> Expr:
    return expr_sum(((Fraction(value), ()),))


def expr_name(name: str) -> Expr:
    return ((Fraction(1), ((name, 1),)),)


def expr_names(a: Expr) -> Set[str]:
    return {name for _, factors in a for name, _ in factors}


@dataclass
class Position:
    line: int
    column: int


@dataclass
class GeneratorDecl:
    name: str
    degree: int
    position: Optional[Position] = field(default=None, compare=False)


@dataclass
class Assignment:
    """``name = expr``, or ``d name = expr`` inside algebra and module blocks."""

    name: str
    expr: Expr
    position: Optional[Position] = field(default=None, compare=False)


@dataclass
class ConfigDecl:
    weight_cutoff: Optional[int] = None
    degree_window: Optional[Tuple[int, int]] = None
    seed: Optional[int] = None
    base_length: Optional[int] = None
    max_solve_dim: Optional[int] = None
    position: Optional[Position] = field(default=None, compare=False)

    KEYS = ("weight_cutoff", "degree_window", "seed", "base_length", "max_solve_dim")


@dataclass
class AlgebraDecl:
    name: str
    generators: List[GeneratorDecl] = field(default_factory=list)
    differentials: List[Assignment] = field(default_factory=list)
    position: Optional[Position] = field(default=None, compare=False)


@dataclass
class ModuleDecl:
    """A cell module. Declared degrees are bracket-algebra degrees; module degrees subtract ``shift``."""

    name: str
    base: str
    shift: int = 0
    generators: List[GeneratorDecl] = field(default_factory=list)
    differentials: List[Assignment] = field(default_factory=list)
    position: Optional[Position] = field(default=None, compare=False)


@dataclass
class BracketEntry:
    word: Tuple[str, ...]
    expr: Expr
    position: Optional[Position] = field(default=None, compare=False)


@dataclass
class AnchorEntry:
    word: Tuple[str, ...]
    target: str
    expr: Expr
    position: Optional[Position] = field(default=None, compare=False)


@dataclass
class BracketsDecl:
    name: str
    module: str
    brackets: List[BracketEntry] = field(default_factory=list)
    anchors: List[AnchorEntry] = field(default_factory=list)
    position: Optional[Position] = field(default=None, compare=False)


@dataclass
class MapDecl:
    """``map`` between algebras, or ``morphism`` between CE complexes when ``kind == "morphism"``."""

    kind: str
    name: str
    source: str
    target: str
    images: List[Assignment] = field(default_factory=list)
    position: Optional[Position] = field(default=None, compare=False)


Declaration = Union[ConfigDecl, AlgebraDecl, ModuleDecl, BracketsDecl, MapDecl]


@dataclass
class ModelFile:
    declarations: List[Declaration] = field(default_factory=list)

    @property
    def config(self) -> Optional[ConfigDecl]:
        found = [d for d in self.declarations if isinstance(d, ConfigDecl)]
        return found[-1] if found else None

    def named(self, kind) -> List:
        return [d for d in self.declarations if isinstance(d, kind)]

    def find(self, name: str):
        for d in self.declarations:
            if getattr(d, "name", None) == name:
                return d
        return None
