"""Tokenizer and recursive-descent parser for module text.

Accepts exactly the canonical text emitted by rendering (and the same text
with extra spacing).  Strict modes reject the other dialect's symbols; mixed
mode accepts both alphabets as aliases of the same operator kinds and lets an
opening bracket of one dialect be closed by the other's, recording per-token
dialect tags on the result.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .errors import DialectError, LexError, ModuleSyntaxError
from .lang import (Assign, Bare, Const, Group, Module, Op, PrintStmt, Syntax,
                   DEFAULT_SYNTAX, VarRef)


class Accept(Enum):
    LOLA_ONLY = "lola"
    MEME_ONLY = "meme"
    ANY_MIXED = "mixed"


class TokenKind(Enum):
    NAME = "name"
    INTEGER = "integer"
    OP = "op"
    OPEN = "open"
    CLOSE = "close"
    ASSIGN = "assign"
    SEMICOLON = "semicolon"
    PRINT = "print"
    LPAREN_CALL = "lparen_call"
    RPAREN_CALL = "rparen_call"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    lexeme: str
    offset: int
    op: Optional[Op] = None
    lang: Optional[str] = None


_SCAN = re.compile(r"[ \t\r\n]+|[A-Za-z][A-Za-z0-9_]*|[0-9]+|.")


def tokenize(text: str, accept: Accept = Accept.ANY_MIXED,
             syntax: Syntax = DEFAULT_SYNTAX) -> list[Token]:
    ops = {}
    opens = {}
    closes = {}
    for dialect in (syntax.lola, syntax.meme):
        for op, sym in dialect.operators.items():
            ops[sym] = (op, dialect.name)
        opens[dialect.open_group] = dialect.name
        closes[dialect.close_group] = dialect.name
    allowed = {Accept.LOLA_ONLY: "lola", Accept.MEME_ONLY: "meme"}.get(accept)

    tokens: list[Token] = []
    call_state = 0  # 0 normal, 1 after print, 2 after call-open, 3 after call name
    for m in _SCAN.finditer(text):
        lexeme = m.group(0)
        offset = m.start()
        if lexeme[0] in " \t\r\n":
            continue
        if lexeme[0].isalpha():
            if lexeme == "print":
                tokens.append(Token(TokenKind.PRINT, lexeme, offset))
                call_state = 1
                continue
            tokens.append(Token(TokenKind.NAME, lexeme, offset))
            call_state = 3 if call_state == 2 else 0
            continue
        if lexeme[0].isdigit():
            tokens.append(Token(TokenKind.INTEGER, lexeme, offset))
            call_state = 0
            continue
        if call_state == 1 and lexeme == "(":
            tokens.append(Token(TokenKind.LPAREN_CALL, lexeme, offset))
            call_state = 2
            continue
        if call_state == 3 and lexeme == ")":
            tokens.append(Token(TokenKind.RPAREN_CALL, lexeme, offset))
            call_state = 0
            continue
        call_state = 0
        if lexeme == "=":
            tokens.append(Token(TokenKind.ASSIGN, lexeme, offset))
        elif lexeme == ";":
            tokens.append(Token(TokenKind.SEMICOLON, lexeme, offset))
        elif lexeme in ops:
            op, lang = ops[lexeme]
            if allowed and lang != allowed:
                raise DialectError(f"offset {offset}: {lexeme!r} is a {lang} symbol")
            tokens.append(Token(TokenKind.OP, lexeme, offset, op=op, lang=lang))
        elif lexeme in opens:
            lang = opens[lexeme]
            if allowed and lang != allowed:
                raise DialectError(f"offset {offset}: {lexeme!r} is a {lang} bracket")
            tokens.append(Token(TokenKind.OPEN, lexeme, offset, lang=lang))
        elif lexeme in closes:
            lang = closes[lexeme]
            if allowed and lang != allowed:
                raise DialectError(f"offset {offset}: {lexeme!r} is a {lang} bracket")
            tokens.append(Token(TokenKind.CLOSE, lexeme, offset, lang=lang))
        else:
            raise LexError(f"offset {offset}: unknown character {lexeme!r}")
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.tags: list[tuple[str, str]] = []

    def peek(self) -> Optional[Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, kind: TokenKind) -> Token:
        tok = self.peek()
        if tok is None or tok.kind is not kind:
            got = "end of input" if tok is None else f"{tok.lexeme!r} at offset {tok.offset}"
            raise ModuleSyntaxError(f"expected {kind.value}, got {got}")
        self.pos += 1
        return tok

    def statement(self):
        tok = self.peek()
        if tok is None:
            raise ModuleSyntaxError("expected a statement, got end of input")
        if tok.kind is TokenKind.PRINT:
            self.take(TokenKind.PRINT)
            self.take(TokenKind.LPAREN_CALL)
            name = self.take(TokenKind.NAME)
            self.take(TokenKind.RPAREN_CALL)
            return PrintStmt(name.lexeme)
        name = self.take(TokenKind.NAME)
        nxt = self.peek()
        if nxt is not None and nxt.kind is TokenKind.ASSIGN:
            self.take(TokenKind.ASSIGN)
            return Assign(name.lexeme, self.expr())
        return Bare(name.lexeme)

    def expr(self):
        tok = self.peek()
        if tok is None:
            raise ModuleSyntaxError("expected an expression, got end of input")
        if tok.kind is TokenKind.INTEGER:
            self.pos += 1
            return Const(int(tok.lexeme))
        if tok.kind is TokenKind.NAME:
            self.pos += 1
            return VarRef(tok.lexeme)
        if tok.kind is TokenKind.OPEN:
            self.pos += 1
            self.tags.append(("open", tok.lang))
            lhs = self.expr()
            op_tok = self.take(TokenKind.OP)
            self.tags.append((op_tok.op.name.lower(), op_tok.lang))
            rhs = self.expr()
            close = self.take(TokenKind.CLOSE)
            self.tags.append(("close", close.lang))
            return Group(lhs, op_tok.op, rhs)
        raise ModuleSyntaxError(f"unexpected {tok.lexeme!r} at offset {tok.offset}")


def parse_module(text: str, accept: Accept = Accept.ANY_MIXED,
                 syntax: Syntax = DEFAULT_SYNTAX) -> Module:
    """Parse one module (';'-separated statements, normally ending in print)."""
    parser = _Parser(tokenize(text, accept, syntax))
    statements = [parser.statement()]
    while parser.peek() is not None:
        parser.take(TokenKind.SEMICOLON)
        if parser.peek() is None:
            break  # tolerate one trailing separator
        statements.append(parser.statement())
    return Module(tuple(statements), tuple(parser.tags))


@dataclass
class WellFormedReport:
    violations: list[str] = field(default_factory=list)
    unbound: list[tuple[int, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations and not self.unbound


def check_wellformed(module: Module, globals_names: frozenset | set = frozenset()
                     ) -> WellFormedReport:
    """Report unbound references and print-placement problems."""
    report = WellFormedReport()
    assigned: set[str] = set()
    print_positions = []
    for idx, stmt in enumerate(module.statements):
        if isinstance(stmt, Assign):
            stack = [stmt.rhs]
            while stack:
                e = stack.pop()
                if isinstance(e, VarRef):
                    if e.name not in assigned and e.name not in globals_names:
                        report.unbound.append((idx, e.name))
                elif isinstance(e, Group):
                    stack.append(e.rhs)
                    stack.append(e.lhs)
            assigned.add(stmt.target)
        elif isinstance(stmt, PrintStmt):
            print_positions.append(idx)
            if stmt.target not in assigned and stmt.target not in globals_names:
                report.unbound.append((idx, stmt.target))
    if not print_positions:
        report.violations.append("no print statement")
    else:
        if len(print_positions) > 1:
            report.violations.append("more than one print statement")
        if print_positions[-1] != len(module.statements) - 1:
            report.violations.append("print is not the last statement")
    for idx, name in report.unbound:
        report.violations.append(f"statement {idx}: {name} is unbound")
    return report
