"""Abstract syntax, value domain, latent typing, and surface rendering.

Shared by the parser, interpreter, translator, and generator.  Values are
exact rationals represented as plain ``int`` wherever possible and promoted
to ``fractions.Fraction`` only when a denominator appears, so exact-match
labels are canonical and generation stays fast.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Optional, Union

from .config import Case, GenConfig, BASE_CONFIG
from .errors import NonAlphabeticStart

Value = Union[int, Fraction]


class Op(Enum):
    ADD = 0
    SUB = 1
    MUL = 2
    MOD = 3


class LatentClass(Enum):
    A = "A"
    B = "B"
    C = "C"


class RenderLang(Enum):
    LOLA = "lola"
    MEME = "meme"
    TOKEN_MIX = "mixed"


# -- abstract syntax ---------------------------------------------------------

@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class VarRef:
    name: str


@dataclass(frozen=True)
class Group:
    lhs: "Expr"
    op: Op
    rhs: "Expr"


Expr = Union[Const, VarRef, Group]


@dataclass(frozen=True)
class Assign:
    target: str
    rhs: Expr


@dataclass(frozen=True)
class PrintStmt:
    target: str


@dataclass(frozen=True)
class Bare:
    name: str


Statement = Union[Assign, PrintStmt, Bare]


@dataclass(frozen=True)
class Module:
    """One generated paragraph: assignment statements plus a print.

    ``tags`` records the surface dialect of each operator and bracket token
    in source order (for text that mixes dialects); it does not participate
    in structural equality.
    """

    statements: tuple[Statement, ...]
    tags: tuple[tuple[str, str], ...] = field(default=(), compare=False)


def depth(expr: Expr) -> int:
    """Max Group nesting; constants and variable references have depth 0."""
    if isinstance(expr, Group):
        return 1 + max(depth(expr.lhs), depth(expr.rhs))
    return 0


def names_in(expr: Expr) -> set[str]:
    if isinstance(expr, VarRef):
        return {expr.name}
    if isinstance(expr, Group):
        return names_in(expr.lhs) | names_in(expr.rhs)
    return set()


# -- dialect symbol tables ----------------------------------------------------

_OP_ORDER = (Op.ADD, Op.SUB, Op.MUL, Op.MOD)


@dataclass(frozen=True)
class Dialect:
    name: str
    operators: dict  # Op -> symbol
    inverse: dict  # symbol -> Op
    open_group: str
    close_group: str
    case: Case


@dataclass(frozen=True)
class Syntax:
    lola: Dialect
    meme: Dialect

    @classmethod
    def from_config(cls, cfg: GenConfig) -> "Syntax":
        def make(name, ops, grouping, case):
            table = dict(zip(_OP_ORDER, ops))
            return Dialect(name, table, {s: o for o, s in table.items()},
                           grouping[0], grouping[1], case)

        return cls(
            lola=make("lola", cfg.operators_lola, cfg.grouping_lola, cfg.case_lola),
            meme=make("meme", cfg.operators_meme, cfg.grouping_meme, cfg.case_meme),
        )

    def dialect(self, lang: RenderLang) -> Dialect:
        return self.lola if lang is RenderLang.LOLA else self.meme


DEFAULT_SYNTAX = Syntax.from_config(BASE_CONFIG)


def surface_symbol(op: Op, lang: RenderLang, syntax: Syntax = DEFAULT_SYNTAX) -> str:
    """The dialect's surface symbol for an operator kind (bijective per dialect)."""
    return syntax.dialect(lang).operators[op]


# -- latent typing ------------------------------------------------------------

def latent_type_of(name: str, cfg_or_bounds) -> LatentClass:
    """Classify a name by its case-folded first character.

    Accepts a GenConfig or an ``(a, b)`` boundary pair.  Classes partition the
    alphabet half-open: [0, a) -> A, [a, b) -> B, [b, 26) -> C.
    """
    if isinstance(cfg_or_bounds, GenConfig):
        a, b = cfg_or_bounds.latent_boundaries()
    else:
        a, b = cfg_or_bounds
        if b == -1:
            b = 26
    if not name or not name[0].isalpha():
        raise NonAlphabeticStart(f"name {name!r} does not start with a letter")
    i = ord(name[0].lower()) - ord("a")
    if i < a:
        return LatentClass.A
    if i < b:
        return LatentClass.B
    return LatentClass.C


# -- value rendering ----------------------------------------------------------

def render_value(v: Value) -> str:
    """Canonical output string: exact decimal when the reduced denominator is
    2^a * 5^b, otherwise ``num/den``."""
    if isinstance(v, int):
        return str(v)
    num, den = v.numerator, v.denominator
    if den == 1:
        return str(num)
    twos = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    fives = 0
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{v.numerator}/{v.denominator}"
    digits = max(twos, fives)
    scaled = abs(num) * 10 ** digits // v.denominator
    text = str(scaled).rjust(digits + 1, "0")
    sign = "-" if num < 0 else ""
    return f"{sign}{text[:-digits]}.{text[-digits:]}"


def value_from_string(text: str) -> Value:
    """Inverse of render_value (accepts decimals and num/den forms)."""
    f = Fraction(text)
    return int(f) if f.denominator == 1 else f


# -- module rendering ---------------------------------------------------------

NameFilter = Callable[[str, int, str], str]


def render_module(
    module: Module,
    lang: RenderLang,
    rng: Optional[random.Random] = None,
    syntax: Syntax = DEFAULT_SYNTAX,
    name_filter: Optional[NameFilter] = None,
) -> str:
    """Render a module to canonical text.

    TOKEN_MIX draws the dialect of every operator token and every bracket
    token independently (opening and closing brackets separately), so output
    like ``(2@3}`` is possible; it requires ``rng``.  ``name_filter``, when
    given, maps every rendered name occurrence and receives
    (name, statement_index, role) with role one of target/operand/print/bare.
    """
    mixing = lang is RenderLang.TOKEN_MIX
    if mixing and rng is None:
        raise ValueError("TOKEN_MIX rendering needs an rng")
    base = syntax.lola if lang is not RenderLang.MEME else syntax.meme

    def pick() -> Dialect:
        if not mixing:
            return base
        return syntax.lola if rng.random() < 0.5 else syntax.meme

    def emit_name(name: str, idx: int, role: str) -> str:
        return name_filter(name, idx, role) if name_filter else name

    def emit_expr(expr: Expr, idx: int, out: list[str]) -> None:
        if isinstance(expr, Const):
            out.append(str(expr.value))
        elif isinstance(expr, VarRef):
            out.append(emit_name(expr.name, idx, "operand"))
        else:
            out.append(pick().open_group)
            emit_expr(expr.lhs, idx, out)
            out.append(f" {pick().operators[expr.op]} ")
            emit_expr(expr.rhs, idx, out)
            out.append(pick().close_group)

    parts: list[str] = []
    for idx, stmt in enumerate(module.statements):
        out: list[str] = []
        if isinstance(stmt, Assign):
            out.append(emit_name(stmt.target, idx, "target"))
            out.append(" = ")
            emit_expr(stmt.rhs, idx, out)
        elif isinstance(stmt, PrintStmt):
            out.append("print(")
            out.append(emit_name(stmt.target, idx, "print"))
            out.append(")")
        else:
            out.append(emit_name(stmt.name, idx, "bare"))
        parts.append("".join(out))
    return ";".join(parts)
