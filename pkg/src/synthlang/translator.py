"""Source-to-source normalization between dialects.

Translation parses the source (so symbols inside names can never be
corrupted), converts every name to the target dialect's case convention, and
re-renders canonically with the target dialect's operator and bracket
symbols.  Case conversion never touches a name's first character, so latent
classes are invariant under translation.
"""

from __future__ import annotations

from dataclasses import replace

from .config import Case
from .errors import NameCollision
from .lang import (Assign, Bare, Group, Module, PrintStmt, RenderLang, Syntax,
                   DEFAULT_SYNTAX, VarRef, render_module)
from .parser import Accept, parse_module


def to_camel(name: str) -> str:
    """Drop each underscore and uppercase the character following it."""
    out = []
    upper_next = False
    for ch in name:
        if ch == "_":
            upper_next = True
        elif upper_next:
            out.append(ch.upper())
            upper_next = False
        else:
            out.append(ch)
    return "".join(out)


def to_snake(name: str) -> str:
    """Insert an underscore before each interior uppercase letter and lower it."""
    out = [name[0]]
    for ch in name[1:]:
        if ch.isupper():
            out.append("_")
            out.append(ch.lower())
        else:
            out.append(ch)
    return "".join(out)


def convert_name(name: str, case: Case) -> str:
    return to_camel(name) if case is Case.CAMEL else to_snake(name)


def _module_names(module: Module) -> set[str]:
    names: set[str] = set()
    for stmt in module.statements:
        if isinstance(stmt, Assign):
            names.add(stmt.target)
            stack = [stmt.rhs]
            while stack:
                e = stack.pop()
                if isinstance(e, VarRef):
                    names.add(e.name)
                elif isinstance(e, Group):
                    stack.append(e.lhs)
                    stack.append(e.rhs)
        elif isinstance(stmt, PrintStmt):
            names.add(stmt.target)
        else:
            names.add(stmt.name)
    return names


def rename_module(module: Module, mapping: dict[str, str]) -> Module:
    def map_expr(e):
        if isinstance(e, VarRef):
            return VarRef(mapping[e.name])
        if isinstance(e, Group):
            return Group(map_expr(e.lhs), e.op, map_expr(e.rhs))
        return e

    statements = []
    for stmt in module.statements:
        if isinstance(stmt, Assign):
            statements.append(Assign(mapping[stmt.target], map_expr(stmt.rhs)))
        elif isinstance(stmt, PrintStmt):
            statements.append(PrintStmt(mapping[stmt.target]))
        else:
            statements.append(Bare(mapping[stmt.name]))
    return replace(module, statements=tuple(statements), tags=())


def translate(text: str, src: Accept, dst: RenderLang,
              syntax: Syntax = DEFAULT_SYNTAX) -> str:
    """Translate one module between dialects (or normalize mixed text)."""
    if dst is RenderLang.TOKEN_MIX:
        raise ValueError("translation target must be a single dialect")
    module = parse_module(text, src, syntax)
    case = syntax.dialect(dst).case
    mapping = {name: convert_name(name, case) for name in _module_names(module)}
    by_target: dict[str, str] = {}
    for source, target in sorted(mapping.items()):
        if target in by_target and by_target[target] != source:
            raise NameCollision(f"{by_target[target]!r} and {source!r} both map to {target!r}")
        by_target[target] = source
    return render_module(rename_module(module, mapping), dst, syntax=syntax)
