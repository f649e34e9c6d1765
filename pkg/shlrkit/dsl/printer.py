"""Canonical text of model files.

Printing a parsed file and parsing the result gives back the same tree, and
printing that tree again gives the same text.
"""

from fractions import Fraction
from typing import List

from shlrkit.dsl.model import (
    AlgebraDecl,
    BracketsDecl,
    ConfigDecl,
    Expr,
    MapDecl,
    ModelFile,
    ModuleDecl,
)

INDENT = "  "


def _coefficient(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _term(coefficient: Fraction, factors) -> str:
    parts = [name if exponent == 1 else f"{name}^{exponent}" for name, exponent in factors]
    if coefficient != 1 or not parts:
        parts.insert(0, _coefficient(coefficient))
    return "*".join(parts)


def format_expression(expr: Expr) -> str:
    """Expression text such as ``"3/2*x^2*e - y"``; the empty sum is ``"0"``."""
    if not expr:
        return "0"
    out = ""
    for k, (coefficient, factors) in enumerate(expr):
        if coefficient < 0:
            out += ("-" if k == 0 else " - ") + _term(-coefficient, factors)
        else:
            out += ("" if k == 0 else " + ") + _term(coefficient, factors)
    return out


def _config(decl: ConfigDecl) -> List[str]:
    lines = ["config {"]
    for key in ConfigDecl.KEYS:
        value = getattr(decl, key)
        if value is None:
            continue
        if isinstance(value, tuple):
            value = f"{value[0]}:{value[1]}"
        lines.append(f"{INDENT}{key} = {value};")
    lines.append("}")
    return lines


def _statements(decl) -> List[str]:
    lines = [f"{INDENT}{g.name} : {g.degree};" for g in decl.generators]
    lines += [f"{INDENT}d {a.name} = {format_expression(a.expr)};" for a in decl.differentials]
    return lines


def _block(decl) -> List[str]:
    if isinstance(decl, ConfigDecl):
        return _config(decl)
    if isinstance(decl, AlgebraDecl):
        return [f"algebra {decl.name} {{"] + _statements(decl) + ["}"]
    if isinstance(decl, ModuleDecl):
        shift = f" shift {decl.shift}" if decl.shift else ""
        return [f"module {decl.name} over {decl.base}{shift} {{"] + _statements(decl) + ["}"]
    if isinstance(decl, BracketsDecl):
        lines = [f"brackets {decl.name} on {decl.module} {{"]
        for entry in decl.brackets:
            lines.append(f"{INDENT}[{', '.join(entry.word)}] = {format_expression(entry.expr)};")
        for entry in decl.anchors:
            lines.append(
                f"{INDENT}anchor({', '.join(entry.word)})({entry.target}) = {format_expression(entry.expr)};"
            )
        return lines + ["}"]
    if isinstance(decl, MapDecl):
        lines = [f"{decl.kind} {decl.name} : {decl.source} -> {decl.target} {{"]
        lines += [f"{INDENT}{a.name} = {format_expression(a.expr)};" for a in decl.images]
        return lines + ["}"]
    raise TypeError(f"cannot print {type(decl).__name__}")


def print_model(model: ModelFile) -> str:
    """Canonical text: one block per declaration, separated by blank lines."""
    return "\n\n".join("\n".join(_block(decl)) for decl in model.declarations) + "\n"
