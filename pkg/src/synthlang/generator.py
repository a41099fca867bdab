"""Random synthesis of names, global tables, statements, and labeled samples.

Every name is minted as a unique lowercase skeleton plus a set of marked
interior positions; the camel surface uppercases the marked characters and
the snake surface precedes them with underscores.  Skeleton uniqueness makes
surfaces unique in both dialects and keeps dialect translation collision-free
by construction.

Globals that must reach an appearance quota arrive as per-sample "mandated"
skeleton lists (scheduled by the corpus builder); the statement builder
consumes them eagerly at operand slots and escalates expression shapes when
the remaining statements could not otherwise host them.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

from .config import Case, GenConfig, LocalNameScope, NoiseMode
from .errors import (DivisionByZero, ExhaustedNamespace, QuotaInfeasible,
                     RegenerationLimitExceeded, UnboundVariable)
from .interpreter import Environment, LatentRules, evaluate, live_slice
from .lang import (Assign, Bare, Const, Group, Module, Op, PrintStmt,
                   RenderLang, Syntax, VarRef, render_module, render_value)
from . import rngstream

_LOWER = "abcdefghijklmnopqrstuvwxyz"
_ARITH_OPS = (Op.ADD, Op.SUB, Op.MUL, Op.MOD)
_NOISE_OPS = (Op.ADD, Op.SUB, Op.MUL)
_NAME_TOKEN = re.compile(r"[A-Za-z][A-Za-z0-9_]*")
_CONST_LEAF_P = 0.35
_RETRY_LIMIT = 1000

# Statement-form weights (assert = re-assert a global to its canonical value).
FORM_WEIGHTS = {
    "train": (("assert", 0.15), ("const", 0.15), ("copy", 0.25), ("expr", 0.45)),
    "test_with_globals": (("const", 0.12), ("copy", 0.28), ("expr", 0.60)),
    "test_no_globals": (("const", 0.20), ("copy", 0.25), ("expr", 0.55)),
}
_GLOBAL_OPERAND_P = {"train": 0.5, "test_with_globals": 0.6, "test_no_globals": 0.0}


class Mode(Enum):
    TRAIN = "train"
    TEST_WITH_GLOBALS = "test_with_globals"
    TEST_NO_GLOBALS = "test_no_globals"


@dataclass(frozen=True)
class NameEntry:
    skeleton: str
    marks: tuple[int, ...]
    camel: str
    snake: str

    def surface(self, case: Case) -> str:
        return self.camel if case is Case.CAMEL else self.snake


def _make_entry(skeleton: str, marks: tuple[int, ...]) -> NameEntry:
    camel = list(skeleton)
    snake = []
    mark_set = set(marks)
    for i, ch in enumerate(skeleton):
        if i in mark_set:
            camel[i] = ch.upper()
            snake.append("_")
        snake.append(ch)
    return NameEntry(skeleton, marks, "".join(camel), "".join(snake))


@dataclass(frozen=True)
class GlobalEntry:
    name: NameEntry
    value: int


@dataclass
class NamePool:
    """Unique global and local names plus their canonical values."""

    globals: dict[str, GlobalEntry]
    global_order: tuple[str, ...]
    locals_shared: tuple[NameEntry, ...]
    surface_values: dict[str, int]
    global_surfaces: frozenset[str]


def _first_char(rng: random.Random, cfg: GenConfig) -> str:
    a, b = cfg.latent_boundaries()
    ranges = {"A": (0, a), "B": (a, b), "C": (b, 26)}
    pa, pb = cfg.latent_variable_probability
    u = rng.random()
    want = "A" if u < pa else ("B" if u < pa + pb else "C")
    # An empty class range falls through to its collapsed neighbour.
    for cls in {"A": "ABC", "B": "BCA", "C": "CBA"}[want]:
        lo, hi = ranges[cls]
        if hi > lo:
            return _LOWER[rng.randrange(lo, hi)]
    raise ExhaustedNamespace("all latent character ranges are empty")


def mint_name(rng: random.Random, cfg: GenConfig, taken: set[str]) -> NameEntry:
    """Mint a unique name; skeleton length is uniform in the configured bounds."""
    for _ in range(_RETRY_LIMIT):
        length = rng.randint(cfg.min_var_length, cfg.max_var_length)
        skeleton = _first_char(rng, cfg) + "".join(
            rng.choices(_LOWER, k=length - 1))
        if skeleton == "print" or skeleton in taken:
            continue
        taken.add(skeleton)
        marks = tuple(i for i in range(1, length)
                      if rng.random() < cfg.var_name_underscore_probability)
        return _make_entry(skeleton, marks)
    raise ExhaustedNamespace(
        f"could not mint a unique name of length "
        f"{cfg.min_var_length}..{cfg.max_var_length} after {_RETRY_LIMIT} tries")


def gen_global_table(rng: random.Random, cfg: GenConfig,
                     taken: Optional[set[str]] = None) -> dict[str, GlobalEntry]:
    """Exactly global_var_count unique globals with uniform integer values."""
    taken = taken if taken is not None else set()
    table: dict[str, GlobalEntry] = {}
    for _ in range(cfg.global_var_count):
        entry = mint_name(rng, cfg, taken)
        value = rng.randint(cfg.min_int_value, cfg.max_int_value)
        table[entry.skeleton] = GlobalEntry(entry, value)
    return table


def build_name_pool(cfg: GenConfig, master_seed: int,
                    globals_stream_index: int = 0,
                    taken: Optional[set[str]] = None) -> NamePool:
    """Global table plus the shared local pool, on their own RNG substreams.

    Passing a shared ``taken`` set keeps skeletons unique across several
    pools (segmented layouts mint one namespace)."""
    taken = taken if taken is not None else set()
    g_rng = rngstream.substream(master_seed, rngstream.STREAM_GLOBALS,
                                globals_stream_index)
    table = gen_global_table(g_rng, cfg, taken)
    l_rng = rngstream.substream(master_seed, rngstream.STREAM_LOCALS,
                                globals_stream_index)
    shared = tuple(mint_name(l_rng, cfg, taken)
                   for _ in range(cfg.local_var_count))
    surface_values: dict[str, int] = {}
    for entry in table.values():
        surface_values[entry.name.camel] = entry.value
        surface_values[entry.name.snake] = entry.value
    return NamePool(
        globals=table,
        global_order=tuple(table),
        locals_shared=shared,
        surface_values=surface_values,
        global_surfaces=frozenset(surface_values),
    )


def inject_typos(name: str, rng: random.Random, rate: float) -> str:
    """With probability ``rate``, apply one interior substitution or adjacent
    transposition; the first character is always preserved."""
    if rate <= 0.0 or len(name) < 2:
        return name
    if rng.random() >= rate:
        return name
    swappable = [i for i in range(1, len(name) - 1) if name[i] != name[i + 1]]
    if swappable and rng.random() < 0.5:
        i = rng.choice(swappable)
        return name[:i] + name[i + 1] + name[i] + name[i + 2:]
    pos = rng.randrange(1, len(name))
    current = name[pos]
    pool = [c for c in _LOWER if c != current]
    return name[:pos] + rng.choice(pool) + name[pos + 1:]


class _Reject(Exception):
    """Internal: this sample draw is unusable, try the next substream."""


@dataclass(frozen=True)
class Sample:
    id: str
    input: str
    output: str
    lang: str
    mode: str
    globals_used: tuple[str, ...]
    noise_indices: tuple[int, ...]
    typo_indices: tuple[int, ...]
    seed: int

    def record(self) -> dict:
        return {
            "id": self.id,
            "input": self.input,
            "output": self.output,
            "lang": self.lang,
            "mode": self.mode,
            "globals_used": list(self.globals_used),
            "noise_indices": list(self.noise_indices),
            "typo_indices": list(self.typo_indices),
            "seed": self.seed,
        }


def _weighted(rng: random.Random, pairs) -> str:
    u = rng.random()
    acc = 0.0
    for label, w in pairs:
        acc += w
        if u < acc:
            return label
    return pairs[-1][0]


def _shape(rng: random.Random, depth: int):
    """Expression skeleton of exactly ``depth`` nesting; leaves are None."""
    if depth == 0:
        return None
    deep = _shape(rng, depth - 1)
    other = _shape(rng, rng.randrange(depth))
    return (deep, other) if rng.random() < 0.5 else (other, deep)


def _full_shape(depth: int):
    if depth == 0:
        return None
    sub = _full_shape(depth - 1)
    return (sub, sub)


def _leaf_count(shape) -> int:
    if shape is None:
        return 1
    return _leaf_count(shape[0]) + _leaf_count(shape[1])


class _SampleBuilder:
    def __init__(self, rng: random.Random, cfg: GenConfig, pool: NamePool,
                 mode: Mode, case: Case, syntax: Syntax,
                 mandated: Sequence[str]):
        self.rng = rng
        self.cfg = cfg
        self.pool = pool
        self.mode = mode
        self.case = case
        self.syntax = syntax
        self.mandate = list(mandated)
        self.mandate_pos = 0
        self.tracked: list[str] = []
        self.tracked_set: set[str] = set()
        self.tracked_locals: list[str] = []
        self.global_operands = 0
        if cfg.local_name_scope is LocalNameScope.SHARED_POOL:
            self.local_entries = pool.locals_shared
        else:
            taken = set(pool.globals)
            self.local_entries = tuple(
                mint_name(rng, cfg, taken) for _ in range(cfg.local_var_count))
        self.local_surfaces = tuple(e.surface(case) for e in self.local_entries)

    # -- name draws -----------------------------------------------------

    def _mandate_left(self) -> int:
        return len(self.mandate) - self.mandate_pos

    def _pop_mandate(self) -> str:
        skel = self.mandate[self.mandate_pos]
        self.mandate_pos += 1
        self.global_operands += 1
        return self.pool.globals[skel].name.surface(self.case)

    def _random_global(self) -> str:
        skel = self.pool.global_order[self.rng.randrange(len(self.pool.global_order))]
        self.global_operands += 1
        return self.pool.globals[skel].name.surface(self.case)

    def _operand_name(self) -> Optional[str]:
        """A readable name for an operand slot, or None for a constant."""
        has_globals = bool(self.pool.global_order) \
            and self.mode is not Mode.TEST_NO_GLOBALS
        want_global = has_globals \
            and self.rng.random() < _GLOBAL_OPERAND_P[self.mode.value]
        if want_global:
            return self._random_global()
        if self.tracked_locals:
            return self.rng.choice(self.tracked_locals)
        if has_globals:
            return self._random_global()
        return None

    def _leaf(self) -> "Const | VarRef":
        if self._mandate_left():
            return VarRef(self._pop_mandate())
        if self.rng.random() < _CONST_LEAF_P:
            return Const(self._const())
        name = self._operand_name()
        return VarRef(name) if name else Const(self._const())

    def _const(self) -> int:
        return self.rng.randint(self.cfg.min_int_value, self.cfg.max_int_value)

    def _local_target(self) -> str:
        return self.rng.choice(self.local_surfaces)

    def _track(self, surface: str, is_local: bool) -> None:
        if surface not in self.tracked_set:
            self.tracked_set.add(surface)
            self.tracked.append(surface)
            if is_local:
                self.tracked_locals.append(surface)

    # -- statement forms --------------------------------------------------

    def _fill_shape(self, shape) -> "Group":
        leaves: list = []

        def build(node):
            if node is None:
                slot = len(leaves)
                leaves.append(None)
                return ("leaf", slot)
            return ("group", build(node[0]), build(node[1]))

        skeleton = build(shape)
        order = list(range(len(leaves)))
        self.rng.shuffle(order)
        for idx in order:
            leaves[idx] = self._leaf()

        def realize(node):
            if node[0] == "leaf":
                return leaves[node[1]]
            op = _ARITH_OPS[self.rng.randrange(4)]
            return Group(realize(node[1]), op, realize(node[2]))

        return realize(skeleton)

    def _statement(self, index: int) -> Assign:
        cfg = self.cfg
        n = cfg.statement_count
        max_leaves = 2 ** cfg.expression_max_depth
        later_capacity = (n - index - 1) * max_leaves
        need_now = max(0, self._mandate_left() - later_capacity)
        if need_now > max_leaves:
            raise QuotaInfeasible(
                f"{self._mandate_left()} mandated globals cannot fit in "
                f"{n - index} statements")

        if need_now > 1:
            form = "expr"
        elif need_now == 1 and self.rng.random() < 0.3:
            form = "assert" if self.mode is Mode.TRAIN else "copy"
        else:
            form = _weighted(self.rng, FORM_WEIGHTS[self.mode.value])

        if form == "assert":
            if not self.pool.global_order or self.mode is not Mode.TRAIN:
                form = "const"
            else:
                if self._mandate_left():
                    surface = self._pop_mandate()
                    self.global_operands -= 1  # target, not operand
                    skel = self.mandate[self.mandate_pos - 1]
                else:
                    skel = self.rng.choice(self.pool.global_order)
                    surface = self.pool.globals[skel].name.surface(self.case)
                self._track(surface, is_local=False)
                return Assign(surface, Const(self.pool.globals[skel].value))

        if form == "copy":
            name = self._pop_mandate() if self._mandate_left() else self._operand_name()
            if name is not None:
                target = self._local_target()
                self._track(target, is_local=True)
                return Assign(target, VarRef(name))
            form = "const"

        if form == "const" and need_now == 0:
            target = self._local_target()
            self._track(target, is_local=True)
            return Assign(target, Const(self._const()))

        depth = self.rng.randint(cfg.expression_min_depth, cfg.expression_max_depth)
        shape = _shape(self.rng, depth)
        if _leaf_count(shape) < need_now:
            shape = _full_shape(cfg.expression_max_depth)
        rhs = self._fill_shape(shape)
        target = self._local_target()
        self._track(target, is_local=True)
        return Assign(target, rhs)

    def build(self) -> tuple[Module, list[int]]:
        statements: list = [self._statement(i)
                            for i in range(self.cfg.statement_count)]
        if self._mandate_left():
            raise QuotaInfeasible("mandated globals left over after all statements")
        statements.append(PrintStmt(self.rng.choice(self.tracked)))
        noise = self._insert_noise(statements)
        if self.mode is Mode.TEST_WITH_GLOBALS and self.global_operands == 0:
            raise _Reject
        return Module(tuple(statements)), noise

    # -- noise -------------------------------------------------------------

    def _noise_rhs(self, bound_before: list[str]):
        candidates = list(bound_before)
        if self.mode is not Mode.TEST_NO_GLOBALS and self.pool.global_order:
            use_global = self.rng.random() < 0.5
        else:
            use_global = False
        def operand():
            if use_global and self.rng.random() < 0.5:
                return VarRef(self._random_global())
            if candidates and self.rng.random() < 0.7:
                return VarRef(self.rng.choice(candidates))
            return Const(self._const())
        if self.rng.random() < 0.4:
            return Const(self._const())
        op = _NOISE_OPS[self.rng.randrange(3)]
        return Group(operand(), op, operand())

    def _insert_noise(self, statements: list) -> list[int]:
        cfg = self.cfg
        if cfg.noise_mode is NoiseMode.OFF or self.rng.random() >= cfg.noise_probability:
            return []
        n_assign = len(statements) - 1
        if cfg.noise_mode is NoiseMode.BARE_TOKEN:
            pos = 0 if self.rng.random() < 0.5 else n_assign
            statements.insert(pos, Bare(self.rng.choice(self.tracked)))
            return [pos]
        for _ in range(8):
            pos = self.rng.randrange(n_assign + 1)
            bound_before = [s.target for s in statements[:pos]
                            if isinstance(s, Assign)]
            target = self._local_target()
            candidate = Assign(target, self._noise_rhs(bound_before))
            trial = statements[:pos] + [candidate] + statements[pos:]
            if pos not in live_slice(Module(tuple(trial))):
                statements.insert(pos, candidate)
                return [pos]
        return []


def gen_sample(rng: random.Random, cfg: GenConfig, pool: NamePool, mode: Mode,
               *, dialect: RenderLang = RenderLang.LOLA,
               token_mix: bool = False,
               mandated: Sequence[str] = (),
               syntax: Optional[Syntax] = None,
               sample_id: str = "0", seed: int = 0) -> Sample:
    """One generation attempt; raises _Reject when the draw is unusable."""
    syntax = syntax or Syntax.from_config(cfg)
    case = syntax.dialect(dialect).case
    builder = _SampleBuilder(rng, cfg, pool, mode, case, syntax, mandated)
    module, noise_indices = builder.build()

    env = Environment({} if mode is Mode.TEST_NO_GLOBALS else pool.surface_values)
    latent = LatentRules.from_config(cfg)
    try:
        result = evaluate(module, env, latent, rng=rng, strict_globals=True)
    except (DivisionByZero, UnboundVariable) as exc:
        raise _Reject from exc

    typo_indices: list[int] = []
    name_filter = None
    if cfg.typo_probability > 0:
        live = live_slice(module)

        def name_filter(name: str, stmt_idx: int, role: str) -> str:
            if role == "print" or (role == "target" and stmt_idx in live):
                return name
            mutated = inject_typos(name, rng, cfg.typo_probability)
            if mutated != name and stmt_idx not in typo_indices:
                typo_indices.append(stmt_idx)
            return mutated

    render_lang = RenderLang.TOKEN_MIX if token_mix else dialect
    text = render_module(module, render_lang, rng=rng, syntax=syntax,
                         name_filter=name_filter)

    globals_used = sorted(
        {t for t in _NAME_TOKEN.findall(text) if t in pool.global_surfaces})
    return Sample(
        id=sample_id,
        input=text,
        output=render_value(result.printed),
        lang=render_lang.value,
        mode=mode.value,
        globals_used=tuple(globals_used),
        noise_indices=tuple(noise_indices),
        typo_indices=tuple(typo_indices),
        seed=seed,
    )


def generate_sample(cfg: GenConfig, pool: NamePool, mode: Mode, stream: int,
                    index: int, *, master_seed: Optional[int] = None,
                    dialect: RenderLang = RenderLang.LOLA,
                    token_mix: bool = False,
                    mandated: Sequence[str] = (),
                    syntax: Optional[Syntax] = None,
                    sample_id: Optional[str] = None,
                    retry_start: int = 0) -> tuple[Sample, int]:
    """Deterministic sample for (master_seed, stream, index): rejections move
    to the next retry substream, so results never depend on other samples."""
    master = cfg.master_seed if master_seed is None else master_seed
    retry = retry_start
    while retry < _RETRY_LIMIT:
        seed = rngstream.derive_seed(master, stream, index, retry)
        rng = random.Random(seed)
        try:
            sample = gen_sample(
                rng, cfg, pool, mode, dialect=dialect, token_mix=token_mix,
                mandated=mandated, syntax=syntax,
                sample_id=sample_id if sample_id is not None else str(index),
                seed=seed)
            return sample, retry
        except _Reject:
            retry += 1
    raise RegenerationLimitExceeded(
        f"sample {index} rejected {_RETRY_LIMIT} times; degenerate config")
