"""Reference semantics: evaluate a module to its printed value.

This is the label oracle for every emitted corpus.  Arithmetic is exact:
values stay ``int`` until a division introduces a denominator, then promote
to ``Fraction``.  Latent modification applies to a variable reference exactly
when it is a direct operand inside a grouped expression; a bare-copy
right-hand side and the print target read the stored value unmodified.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

from .config import GenConfig, LatentMod
from .errors import DivisionByZero, GlobalReassignment, ModuleSyntaxError, UnboundVariable
from .lang import (Assign, Bare, Const, Group, LatentClass, Module, Op,
                   PrintStmt, Value, VarRef, latent_type_of)


@dataclass
class Environment:
    """Canonical global bindings; module-local scope is created per evaluation."""

    globals: Mapping[str, Value] = field(default_factory=dict)


@dataclass(frozen=True)
class LatentRules:
    """Latent thresholds and per-class value modification, applied with
    probability ``apply_probability`` (1.0 makes evaluation deterministic)."""

    char_a: int = 23
    char_b: int = 26
    mod_a: LatentMod = LatentMod.TIMES_TWO
    mod_b: LatentMod = LatentMod.DIV_TWO
    mod_c: LatentMod = LatentMod.DIV_TWO
    apply_probability: float = 1.0

    @classmethod
    def from_config(cls, cfg: GenConfig) -> "LatentRules":
        a, b = cfg.latent_boundaries()
        return cls(a, b, cfg.latent_modification_a, cfg.latent_modification_b,
                   cfg.latent_modification_c, cfg.latent_apply_probability)

    @classmethod
    def none(cls) -> "LatentRules":
        return cls(mod_a=LatentMod.NONE, mod_b=LatentMod.NONE, mod_c=LatentMod.NONE)

    def modification(self, name: str) -> LatentMod:
        cls_ = latent_type_of(name, (self.char_a, self.char_b))
        if cls_ is LatentClass.A:
            return self.mod_a
        if cls_ is LatentClass.B:
            return self.mod_b
        return self.mod_c


def _norm(v: Value) -> Value:
    if isinstance(v, Fraction) and v.denominator == 1:
        return v.numerator
    return v


def _apply_mod(v: Value, mod: LatentMod) -> Value:
    if mod is LatentMod.TIMES_TWO:
        return v * 2
    if mod is LatentMod.DIV_TWO:
        if isinstance(v, int):
            return v // 2 if v % 2 == 0 else Fraction(v, 2)
        return _norm(v / 2)
    return v


def floor_mod(a: Value, b: Value) -> Value:
    """a - b * floor(a / b); exact on rationals, b must be nonzero."""
    if b == 0:
        raise DivisionByZero("mod by zero")
    if isinstance(a, int) and isinstance(b, int):
        return a % b
    return _norm(a - b * (a // b))


@dataclass(frozen=True)
class EvalResult:
    printed: Value
    trace: tuple


def evaluate(
    module: Module,
    env: Environment,
    latent: LatentRules,
    rng: Optional[random.Random] = None,
    strict_globals: bool = False,
) -> EvalResult:
    """Execute statements in order and return the printed value plus a
    per-statement trace (stored value for assigns, None for bare tokens).

    ``strict_globals`` rejects any assignment that would give a global a
    value different from its canonical one.
    """
    p = latent.apply_probability
    if 0.0 < p < 1.0 and rng is None:
        raise ValueError("probabilistic latent rules need an rng")

    scope: dict[str, Value] = {}
    globals_ = env.globals

    def lookup(name: str) -> Value:
        if name in scope:
            return scope[name]
        if name in globals_:
            return globals_[name]
        raise UnboundVariable(name)

    def operand(expr) -> Value:
        if isinstance(expr, Const):
            return expr.value
        if isinstance(expr, VarRef):
            v = lookup(expr.name)
            if p >= 1.0 or (p > 0.0 and rng.random() < p):
                v = _apply_mod(v, latent.modification(expr.name))
            return v
        return group(expr)

    def group(expr: Group) -> Value:
        lhs = operand(expr.lhs)
        rhs = operand(expr.rhs)
        op = expr.op
        if op is Op.ADD:
            return _norm(lhs + rhs)
        if op is Op.SUB:
            return _norm(lhs - rhs)
        if op is Op.MUL:
            return _norm(lhs * rhs)
        return floor_mod(lhs, rhs)

    printed: Optional[Value] = None
    seen_print = False
    trace: list = []
    for stmt in module.statements:
        if isinstance(stmt, Assign):
            rhs = stmt.rhs
            if isinstance(rhs, Const):
                value: Value = rhs.value
            elif isinstance(rhs, VarRef):
                value = lookup(rhs.name)  # bare copy: no latent modification
            else:
                value = group(rhs)
            if strict_globals and stmt.target in globals_ \
                    and value != globals_[stmt.target]:
                raise GlobalReassignment(stmt.target)
            scope[stmt.target] = value
            trace.append(value)
        elif isinstance(stmt, PrintStmt):
            printed = lookup(stmt.target)
            seen_print = True
            trace.append(printed)
        else:
            trace.append(None)
    if not seen_print:
        raise ModuleSyntaxError("module has no print statement")
    return EvalResult(printed, tuple(trace))


def live_slice(module: Module) -> frozenset:
    """Indices of statements the printed value depends on.

    Computed syntactically by backward dependency closure from the print
    target; a later assignment to the same name kills earlier definitions.
    Bare tokens and assignments outside the closure are dead.
    """
    print_idx = None
    for i in range(len(module.statements) - 1, -1, -1):
        if isinstance(module.statements[i], PrintStmt):
            print_idx = i
            break
    if print_idx is None:
        raise ModuleSyntaxError("module has no print statement")

    live = {print_idx}
    needed = {module.statements[print_idx].target}
    for i in range(print_idx - 1, -1, -1):
        stmt = module.statements[i]
        if isinstance(stmt, Assign) and stmt.target in needed:
            live.add(i)
            needed.discard(stmt.target)
            stack = [stmt.rhs]
            while stack:
                e = stack.pop()
                if isinstance(e, VarRef):
                    needed.add(e.name)
                elif isinstance(e, Group):
                    stack.append(e.lhs)
                    stack.append(e.rhs)
    return frozenset(live)
