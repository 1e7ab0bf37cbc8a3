"""Propositional ILGL formulas: AST, ASCII parser, and printer.

Connectives, tightest-binding first: ``|>`` (layering conjunction), ``&``,
``|``, and the implication family ``->``, ``-|>``, ``<|-``.  ``|>`` is
non-associative (chains must be parenthesized), implications are
right-associative with themselves, and mixing two different implication
operators at one level requires parentheses.  ``~ f`` is accepted as sugar
for ``f -> bot``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

ATOM_RE = re.compile(r"[a-z][a-zA-Z0-9_]*\Z")


@dataclass(frozen=True)
class Atom:
    name: str

    def __post_init__(self) -> None:
        if not ATOM_RE.match(self.name):
            raise ValueError(f"bad atom name: {self.name!r}")


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Imp:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class LayerConj:
    """The layering conjunction: non-commutative, non-associative."""

    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class ImpRight:
    """Right residual of layering: receiver composes on the left."""

    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class ImpLeft:
    """Left residual of layering: receiver composes on the right."""

    left: "Formula"
    right: "Formula"


Formula = Union[Atom, Top, Bot, And, Or, Imp, LayerConj, ImpRight, ImpLeft]

TOP = Top()
BOT = Bot()

BINARY_NODES = (And, Or, Imp, LayerConj, ImpRight, ImpLeft)
IMP_NODES = (Imp, ImpRight, ImpLeft)


class ParseError(Exception):
    """Syntax error carrying the byte offset and the expected-token set."""

    def __init__(self, message: str, offset: int, expected: tuple = ()):
        self.offset = offset
        self.expected = tuple(expected)
        detail = f"{message} at offset {offset}"
        if self.expected:
            detail += " (expected " + ", ".join(self.expected) + ")"
        super().__init__(detail)


# Tokens are (kind, text, offset); kind is the operator/keyword itself for
# fixed tokens, "ident" for atoms, "end" at EOF.
_FIXED = ("-|>", "<|-", "|>", "->", "&", "|", "~", "(", ")")
_KEYWORDS = ("top", "bot")


def tokenize(text: str) -> list:
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        for op in _FIXED:
            if text.startswith(op, i):
                tokens.append((op, op, i))
                i += len(op)
                break
        else:
            if c.isalpha():
                j = i + 1
                while j < n and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                word = text[i:j]
                if word in _KEYWORDS:
                    tokens.append((word, word, i))
                elif ATOM_RE.match(word):
                    tokens.append(("ident", word, i))
                else:
                    raise ParseError(
                        f"bad identifier {word!r}", i, ("identifier",)
                    )
                i = j
            else:
                raise ParseError(f"unexpected character {c!r}", i)
    tokens.append(("end", "", n))
    return tokens


_IMP_OPS = ("->", "-|>", "<|-")
_IMP_CLASS = {"->": Imp, "-|>": ImpRight, "<|-": ImpLeft}
_UNIT_EXPECTED = ("identifier", "top", "bot", "~", "(")


class _Parser:
    def __init__(self, tokens: list):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> tuple:
        return self.tokens[self.pos]

    def take(self) -> tuple:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str) -> tuple:
        tok = self.peek()
        if tok[0] != kind:
            raise ParseError(f"unexpected {tok[1]!r}", tok[2], (kind,))
        return self.take()

    def form(self) -> Formula:
        # Collect the whole implication chain, then fold right-associatively.
        # A chain mixing two operator spellings is rejected outright.
        parts = [self.disj()]
        ops = []
        while self.peek()[0] in _IMP_OPS:
            ops.append(self.take())
            parts.append(self.disj())
        if not ops:
            return parts[0]
        if len({kind for kind, _, _ in ops}) > 1:
            raise ParseError(
                "mixing different implication operators requires parentheses",
                ops[1][2],
            )
        cls = _IMP_CLASS[ops[0][0]]
        f = parts[-1]
        for g in reversed(parts[:-1]):
            f = cls(g, f)
        return f

    def disj(self) -> Formula:
        f = self.conj()
        while self.peek()[0] == "|":
            self.take()
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.layer()
        while self.peek()[0] == "&":
            self.take()
            f = And(f, self.layer())
        return f

    def layer(self) -> Formula:
        f = self.unit()
        if self.peek()[0] == "|>":
            self.take()
            f = LayerConj(f, self.unit())
            if self.peek()[0] == "|>":
                raise ParseError(
                    "chained non-associative operator '|>'", self.peek()[2]
                )
        return f

    def unit(self) -> Formula:
        kind, text, off = self.peek()
        if kind == "ident":
            self.take()
            return Atom(text)
        if kind == "top":
            self.take()
            return TOP
        if kind == "bot":
            self.take()
            return BOT
        if kind == "~":
            self.take()
            return Imp(self.unit(), BOT)
        if kind == "(":
            self.take()
            f = self.form()
            self.expect(")")
            return f
        raise ParseError(f"unexpected {text or 'end of input'!r}", off,
                         _UNIT_EXPECTED)


def parse(text: str) -> Formula:
    """Parse ``text`` into a Formula, raising ParseError on any flaw."""
    parser = _Parser(tokenize(text))
    f = parser.form()
    kind, tok, off = parser.peek()
    if kind != "end":
        raise ParseError(f"trailing input {tok!r}", off, ("end of input",))
    return f


# Precedence levels used by the printer; higher binds tighter.
_LEVEL_IMP, _LEVEL_OR, _LEVEL_AND, _LEVEL_LAYER, _LEVEL_UNIT = range(5)


def _level(f: Formula) -> int:
    if isinstance(f, IMP_NODES):
        return _LEVEL_IMP
    if isinstance(f, Or):
        return _LEVEL_OR
    if isinstance(f, And):
        return _LEVEL_AND
    if isinstance(f, LayerConj):
        return _LEVEL_LAYER
    return _LEVEL_UNIT


_OP_TEXT = {Imp: "->", ImpRight: "-|>", ImpLeft: "<|-", And: "&", Or: "|",
            LayerConj: "|>"}


def render(f: Formula) -> str:
    """Print ``f`` with minimal parentheses; parse(render(f)) == f."""
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Top):
        return "top"
    if isinstance(f, Bot):
        return "bot"
    op = _OP_TEXT[type(f)]
    if isinstance(f, IMP_NODES):
        left = _wrap(f.left, _LEVEL_OR)
        if isinstance(f.right, IMP_NODES) and type(f.right) is not type(f):
            right = "(" + render(f.right) + ")"
        else:
            right = render(f.right)
    elif isinstance(f, Or):
        left = _wrap(f.left, _LEVEL_OR)
        right = _wrap(f.right, _LEVEL_AND)
    elif isinstance(f, And):
        left = _wrap(f.left, _LEVEL_AND)
        right = _wrap(f.right, _LEVEL_LAYER)
    else:
        left = _wrap(f.left, _LEVEL_UNIT)
        right = _wrap(f.right, _LEVEL_UNIT)
    return f"{left} {op} {right}"


def _wrap(f: Formula, min_level: int) -> str:
    text = render(f)
    if _level(f) < min_level:
        return "(" + text + ")"
    return text


def subformulas(f: Formula) -> list:
    """All distinct subformulas of ``f`` (including ``f``), in post-order."""
    seen: dict = {}

    def walk(g: Formula) -> None:
        if isinstance(g, BINARY_NODES):
            walk(g.left)
            walk(g.right)
        if g not in seen:
            seen[g] = None

    walk(f)
    return list(seen)


def atoms(f: Formula) -> list:
    """Atom names occurring in ``f``, sorted."""
    return sorted({g.name for g in subformulas(f) if isinstance(g, Atom)})
