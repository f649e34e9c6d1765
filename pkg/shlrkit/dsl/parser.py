"""Parser of model files.

Grammar (``#`` starts a comment)::

    model      : { block }
    block      : config | algebra | module | brackets | map | morphism
    config     : "config" "{" { key "=" int [":" int] ";" } "}"
    algebra    : "algebra" NAME "{" { NAME ":" int ";" | "d" NAME "=" expr ";" } "}"
    module     : "module" NAME "over" NAME ["shift" int] "{" ...as algebra... "}"
    brackets   : "brackets" NAME "on" NAME "{" { bracket | anchor } "}"
    bracket    : "[" NAME {"," NAME} "]" "=" expr ";"
    anchor     : "anchor" "(" NAME {"," NAME} ")" "(" NAME ")" "=" expr ";"
    map        : "map" NAME ":" NAME "->" NAME "{" { NAME "=" expr ";" } "}"
    morphism   : "morphism" NAME ":" NAME "->" NAME "{" { NAME "=" expr ";" } "}"
    expr       : ["-"] term { ("+" | "-") term }
    term       : factor { "*" factor }
    factor     : (NAME | int ["/" int] | "(" expr ")") ["^" int]

After parsing, every name is resolved against the declarations above it.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Set, Tuple

import ply.yacc as yacc

from shlrkit.dsl.lexer import ModelLexer, column
from shlrkit.dsl.model import (
    AlgebraDecl,
    AnchorEntry,
    Assignment,
    BracketEntry,
    BracketsDecl,
    ConfigDecl,
    Expr,
    GeneratorDecl,
    MapDecl,
    ModelFile,
    ModuleDecl,
    Position,
    expr_constant,
    expr_name,
    expr_names,
    expr_product,
    expr_scale,
    expr_sum,
)
from shlrkit.errors import ModelError, UndeclaredNameError

GROUND = "k"


class _Grammar:
    tokens = ModelLexer.tokens

    def __init__(self, data: str):
        self.data = data

    def _pos(self, p, i: int) -> Position:
        return Position(p.lineno(i), column(self.data, p.lexpos(i)))

    def p_model(self, p):
        """model : blocks"""
        p[0] = ModelFile(p[1])

    def p_blocks(self, p):
        """blocks : blocks block
        | empty"""
        p[0] = p[1] + [p[2]] if len(p) == 3 else []

    def p_block(self, p):
        """block : config
        | algebra
        | module
        | brackets
        | map
        | morphism"""
        p[0] = p[1]

    def p_empty(self, p):
        """empty :"""

    def p_signed(self, p):
        """signed : INT
        | MINUS INT"""
        p[0] = p[1] if len(p) == 2 else -p[2]

    # config

    def p_config(self, p):
        """config : CONFIG LBRACE config_entries RBRACE"""
        decl = ConfigDecl(position=self._pos(p, 1))
        for key, value, position in p[3]:
            if key not in ConfigDecl.KEYS:
                raise ModelError(f"unknown config key {key!r}", position.line, position.column)
            if getattr(decl, key) is not None:
                raise ModelError(f"duplicate config key {key!r}", position.line, position.column)
            if (key == "degree_window") != isinstance(value, tuple):
                raise ModelError(f"bad value for {key!r}", position.line, position.column)
            setattr(decl, key, value)
        p[0] = decl

    def p_config_entries(self, p):
        """config_entries : config_entries config_entry
        | empty"""
        p[0] = p[1] + [p[2]] if len(p) == 3 else []

    def p_config_entry(self, p):
        """config_entry : NAME EQUALS signed SEMI
        | NAME EQUALS signed COLON signed SEMI"""
        value = p[3] if len(p) == 5 else (p[3], p[5])
        p[0] = (p[1], value, self._pos(p, 1))

    # algebras and modules

    def p_algebra(self, p):
        """algebra : ALGEBRA NAME LBRACE statements RBRACE"""
        gens, diffs = p[4]
        p[0] = AlgebraDecl(p[2], gens, diffs, self._pos(p, 2))

    def p_module(self, p):
        """module : MODULE NAME OVER NAME shift LBRACE statements RBRACE"""
        gens, diffs = p[7]
        p[0] = ModuleDecl(p[2], p[4], p[5], gens, diffs, self._pos(p, 2))

    def p_shift(self, p):
        """shift : SHIFT signed
        | empty"""
        p[0] = p[2] if len(p) == 3 else 0

    def p_statements(self, p):
        """statements : statements generator
        | statements differential
        | empty"""
        if len(p) == 2:
            p[0] = ([], [])
            return
        gens, diffs = p[1]
        (gens if isinstance(p[2], GeneratorDecl) else diffs).append(p[2])
        p[0] = (gens, diffs)

    def p_generator(self, p):
        """generator : NAME COLON signed SEMI"""
        p[0] = GeneratorDecl(p[1], p[3], self._pos(p, 1))

    def p_differential(self, p):
        """differential : D NAME EQUALS expr SEMI"""
        p[0] = Assignment(p[2], p[4], self._pos(p, 2))

    # brackets

    def p_brackets(self, p):
        """brackets : BRACKETS NAME ON NAME LBRACE bracket_entries RBRACE"""
        entries = p[6]
        p[0] = BracketsDecl(
            p[2],
            p[4],
            [e for e in entries if isinstance(e, BracketEntry)],
            [e for e in entries if isinstance(e, AnchorEntry)],
            self._pos(p, 2),
        )

    def p_bracket_entries(self, p):
        """bracket_entries : bracket_entries bracket_entry
        | empty"""
        p[0] = p[1] + [p[2]] if len(p) == 3 else []

    def p_bracket_entry(self, p):
        """bracket_entry : LBRACKET names RBRACKET EQUALS expr SEMI
        | ANCHOR LPAREN names RPAREN LPAREN NAME RPAREN EQUALS expr SEMI"""
        if len(p) == 7:
            p[0] = BracketEntry(tuple(p[2]), p[5], self._pos(p, 1))
        else:
            p[0] = AnchorEntry(tuple(p[3]), p[6], p[9], self._pos(p, 1))

    def p_names(self, p):
        """names : NAME
        | names COMMA NAME"""
        p[0] = [p[1]] if len(p) == 2 else p[1] + [p[3]]

    # maps

    def p_map(self, p):
        """map : MAP NAME COLON NAME ARROW NAME LBRACE assignments RBRACE"""
        p[0] = MapDecl("map", p[2], p[4], p[6], p[8], self._pos(p, 2))

    def p_morphism(self, p):
        """morphism : MORPHISM NAME COLON NAME ARROW NAME LBRACE assignments RBRACE"""
        p[0] = MapDecl("morphism", p[2], p[4], p[6], p[8], self._pos(p, 2))

    def p_assignments(self, p):
        """assignments : assignments assignment
        | empty"""
        p[0] = p[1] + [p[2]] if len(p) == 3 else []

    def p_assignment(self, p):
        """assignment : NAME EQUALS expr SEMI"""
        p[0] = Assignment(p[1], p[3], self._pos(p, 1))

    # expressions

    def p_expr_sum(self, p):
        """expr : expr PLUS term
        | expr MINUS term"""
        p[0] = expr_sum(p[1], p[3] if p[2] == "+" else expr_scale(p[3], Fraction(-1)))

    def p_expr_term(self, p):
        """expr : term
        | MINUS term"""
        p[0] = p[1] if len(p) == 2 else expr_scale(p[2], Fraction(-1))

    def p_term(self, p):
        """term : term TIMES factor
        | factor"""
        p[0] = p[1] if len(p) == 2 else expr_product(p[1], p[3])

    def p_factor(self, p):
        """factor : atom
        | atom CARET INT"""
        if len(p) == 2:
            p[0] = p[1]
            return
        result = expr_constant(Fraction(1))
        for _ in range(p[3]):
            result = expr_product(result, p[1])
        p[0] = result

    def p_atom_name(self, p):
        """atom : NAME"""
        p[0] = expr_name(p[1])

    def p_atom_number(self, p):
        """atom : INT
        | INT SLASH INT"""
        if len(p) == 4 and p[3] == 0:
            raise ModelError("division by zero", p.lineno(3), column(self.data, p.lexpos(3)))
        p[0] = expr_constant(Fraction(p[1]) if len(p) == 2 else Fraction(p[1], p[3]))

    def p_atom_group(self, p):
        """atom : LPAREN expr RPAREN"""
        p[0] = p[2]

    def p_error(self, t):
        if t is None:
            raise ModelError("unexpected end of input")
        raise ModelError(f"unexpected {t.value!r}", t.lineno, column(self.data, t.lexpos))


_PARSERS: Dict[str, Tuple[_Grammar, object]] = {}


def _parse(text: str, start: str):
    if start not in _PARSERS:
        grammar = _Grammar("")
        table = yacc.yacc(module=grammar, start=start, write_tables=False, debug=False, errorlog=yacc.NullLogger())
        _PARSERS[start] = (grammar, table)
    grammar, table = _PARSERS[start]
    grammar.data = text
    return table.parse(text, lexer=ModelLexer().build(), tracking=True)


def parse_expression(text: str) -> Expr:
    """Parse a single expression such as ``"2*x*y - 1/2*z^2"``."""
    return _parse(text, "expr")


@dataclass
class _Scope:
    """Names visible while resolving one file."""

    algebras: Dict[str, Set[str]] = field(default_factory=lambda: {GROUND: set()})
    modules: Dict[str, Set[str]] = field(default_factory=dict)
    module_base: Dict[str, str] = field(default_factory=dict)
    pairs: Dict[str, str] = field(default_factory=dict)
    declared: Set[str] = field(default_factory=set)


def _undeclared(what: str, name: str, position: Optional[Position]) -> UndeclaredNameError:
    if position is None:
        return UndeclaredNameError(f"undeclared {what} {name!r}")
    return UndeclaredNameError(f"undeclared {what} {name!r}", position.line, position.column)


def _check_expr(expr: Expr, allowed: Set[str], position: Optional[Position]) -> None:
    for name in sorted(expr_names(expr)):
        if name not in allowed:
            raise _undeclared("generator", name, position)


def _declare_generators(gens: List[GeneratorDecl], taken: Set[str], positive_ok: bool) -> Set[str]:
    names: Set[str] = set()
    for g in gens:
        if g.name in names or g.name in taken:
            raise ModelError(f"duplicate generator {g.name!r}", g.position.line, g.position.column)
        if g.degree > 0 and not positive_ok:
            raise ModelError(
                f"algebra generator {g.name!r} has positive degree {g.degree}", g.position.line, g.position.column
            )
        names.add(g.name)
    return names


def _check_differentials(diffs: List[Assignment], own: Set[str], allowed: Set[str]) -> None:
    seen: Set[str] = set()
    for a in diffs:
        if a.name not in own:
            raise _undeclared("generator", a.name, a.position)
        if a.name in seen:
            raise ModelError(f"duplicate differential for {a.name!r}", a.position.line, a.position.column)
        seen.add(a.name)
        _check_expr(a.expr, allowed, a.position)


def _scope_of(scope: _Scope, name: str, position: Optional[Position]) -> Set[str]:
    """All generator names of an algebra, module or bracket declaration."""
    if name in scope.algebras:
        return scope.algebras[name]
    if name in scope.pairs:
        name = scope.pairs[name]
    if name in scope.modules:
        return scope.modules[name] | scope.algebras[scope.module_base[name]]
    raise _undeclared("object", name, position)


def resolve(model: ModelFile) -> None:
    """Check declaration order, names, duplicates and algebra degrees.

    Raises:
        ModelError: On duplicates or positive algebra degrees.
        UndeclaredNameError: On a name used before its declaration.
    """
    scope = _Scope()
    for decl in model.declarations:
        if isinstance(decl, ConfigDecl):
            continue
        if decl.name in scope.declared or decl.name == GROUND:
            raise ModelError(f"duplicate declaration {decl.name!r}", decl.position.line, decl.position.column)
        if isinstance(decl, AlgebraDecl):
            own = _declare_generators(decl.generators, set(), positive_ok=False)
            _check_differentials(decl.differentials, own, own)
            scope.algebras[decl.name] = own
        elif isinstance(decl, ModuleDecl):
            if decl.base not in scope.algebras:
                raise _undeclared("algebra", decl.base, decl.position)
            base = scope.algebras[decl.base]
            own = _declare_generators(decl.generators, base, positive_ok=True)
            _check_differentials(decl.differentials, own, own | base)
            scope.modules[decl.name] = own
            scope.module_base[decl.name] = decl.base
        elif isinstance(decl, BracketsDecl):
            if decl.module not in scope.modules:
                raise _undeclared("module", decl.module, decl.position)
            own = scope.modules[decl.module]
            base = scope.algebras[scope.module_base[decl.module]]
            for entry in decl.brackets:
                for name in entry.word:
                    if name not in own:
                        raise _undeclared("module generator", name, entry.position)
                _check_expr(entry.expr, own | base, entry.position)
            for entry in decl.anchors:
                for name in entry.word:
                    if name not in own:
                        raise _undeclared("module generator", name, entry.position)
                if entry.target not in base:
                    raise _undeclared("base generator", entry.target, entry.position)
                _check_expr(entry.expr, base, entry.position)
            scope.pairs[decl.name] = decl.module
        elif isinstance(decl, MapDecl):
            if decl.kind == "map" and decl.source not in scope.algebras:
                raise _undeclared("algebra", decl.source, decl.position)
            if decl.kind == "map" and decl.target not in scope.algebras:
                raise _undeclared("algebra", decl.target, decl.position)
            source = _scope_of(scope, decl.source, decl.position)
            target = _scope_of(scope, decl.target, decl.position)
            seen: Set[str] = set()
            for a in decl.images:
                if a.name not in source:
                    raise _undeclared("generator", a.name, a.position)
                if a.name in seen:
                    raise ModelError(f"duplicate image for {a.name!r}", a.position.line, a.position.column)
                seen.add(a.name)
                _check_expr(a.expr, target, a.position)
        scope.declared.add(decl.name)


@dataclass
class ModelParser:
    """Parses and resolves model files."""

    logger: logging.Logger = field(init=False, repr=False)

    def __post_init__(self):
        self.logger = logging.getLogger(self.__class__.__name__)

    def parse(self, text: str) -> ModelFile:
        model = _parse(text, "model")
        resolve(model)
        self.logger.debug(f"parsed {len(model.declarations)} declarations")
        return model


def parse_model(text: str) -> ModelFile:
    """Parse model text into a resolved syntax tree.

    Raises:
        ModelError: On syntax errors, duplicates or positive algebra degrees.
        UndeclaredNameError: On undeclared names.
    """
    return ModelParser().parse(text)
