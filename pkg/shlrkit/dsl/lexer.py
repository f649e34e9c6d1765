"""Tokens of the model-file language."""

import ply.lex as lex

from shlrkit.errors import ModelError

RESERVED = {
    "config": "CONFIG",
    "algebra": "ALGEBRA",
    "module": "MODULE",
    "over": "OVER",
    "shift": "SHIFT",
    "brackets": "BRACKETS",
    "on": "ON",
    "anchor": "ANCHOR",
    "map": "MAP",
    "morphism": "MORPHISM",
    "d": "D",
}


def column(data: str, lexpos: int) -> int:
    return lexpos - data.rfind("\n", 0, lexpos)


class ModelLexer:
    tokens = [
        "NAME",
        "INT",
        "LBRACE",
        "RBRACE",
        "LBRACKET",
        "RBRACKET",
        "LPAREN",
        "RPAREN",
        "COLON",
        "SEMI",
        "COMMA",
        "EQUALS",
        "PLUS",
        "MINUS",
        "TIMES",
        "SLASH",
        "CARET",
        "ARROW",
    ] + sorted(set(RESERVED.values()))

    t_LBRACE = r"\{"
    t_RBRACE = r"\}"
    t_LBRACKET = r"\["
    t_RBRACKET = r"\]"
    t_LPAREN = r"\("
    t_RPAREN = r"\)"
    t_COLON = r":"
    t_SEMI = r";"
    t_COMMA = r","
    t_EQUALS = r"="
    t_PLUS = r"\+"
    t_ARROW = r"->"
    t_MINUS = r"-"
    t_TIMES = r"\*"
    t_SLASH = r"/"
    t_CARET = r"\^"

    t_ignore = " \t\r"
    t_ignore_COMMENT = r"\#[^\n]*"

    def t_NAME(self, t):
        r"[A-Za-z_][A-Za-z0-9_]*"
        t.type = RESERVED.get(t.value, "NAME")
        return t

    def t_INT(self, t):
        r"\d+"
        t.value = int(t.value)
        return t

    def t_newline(self, t):
        r"\n+"
        t.lexer.lineno += len(t.value)

    def t_error(self, t):
        raise ModelError(f"unexpected character {t.value[0]!r}", t.lineno, column(t.lexer.lexdata, t.lexpos))

    def build(self):
        return lex.lex(module=self)
