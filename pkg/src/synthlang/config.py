"""Generation configuration: the one knob surface for every other module.

Config documents are UTF-8 key-value text using upper snake case key names
(``STATEMENT_COUNT: 5``).  The loader also tolerates the Python-dict framing
those keys are conventionally published in (``"STATEMENT_COUNT": 5,`` lines
inside ``{ ... }``, ``#`` comments, ``int(1e5)`` values), so existing config
dictionaries paste in unchanged.  Unknown keys are rejected.
"""

from __future__ import annotations

import ast
import re
from dataclasses import dataclass, fields, replace
from enum import Enum

from .errors import ConfigParseError, InvalidConfig, UnknownKey


class Language(Enum):
    LOLA = "LOLA"
    MEME = "MEME"
    MIXED_HALF = "MIXED_HALF"


class Case(Enum):
    CAMEL = "camel"
    SNAKE = "snake"


class LatentMod(Enum):
    TIMES_TWO = "*2"
    DIV_TWO = "/2"
    NONE = ""


class LocalNameScope(Enum):
    SHARED_POOL = "SHARED_POOL"
    FRESH_PER_SAMPLE = "FRESH_PER_SAMPLE"


class NoiseMode(Enum):
    OFF = "OFF"
    DEAD_STATEMENT = "DEAD_STATEMENT"
    BARE_TOKEN = "BARE_TOKEN"


class GlobalLayout(Enum):
    DISTRIBUTED = "DISTRIBUTED"
    LOCAL = "LOCAL"


@dataclass(frozen=True)
class GenConfig:
    """Every generation knob, with documented defaults.

    ``latent_char_a`` / ``latent_char_b`` are 0-based offsets from 'a' that
    bound the latent classes half-open: first characters with index in
    [0, a) are class A, [a, b) class B, [b, 26) class C.  The sentinel
    ``latent_char_b = -1`` collapses B and C (B runs to the end of the
    alphabet).
    """

    language: Language = Language.LOLA
    operators_lola: tuple[str, ...] = ("+", "-", "*", "%")
    operators_meme: tuple[str, ...] = ("|", "!", "@", "/")
    grouping_lola: tuple[str, str] = ("(", ")")
    grouping_meme: tuple[str, str] = ("{", "}")
    case_lola: Case = Case.CAMEL
    case_meme: Case = Case.SNAKE
    var_name_underscore_probability: float = 0.5
    latent_char_a: int = 23
    latent_char_b: int = 26
    latent_variable_probability: tuple[float, float] = (0.3, 0.4)
    latent_modification_a: LatentMod = LatentMod.TIMES_TWO
    latent_modification_b: LatentMod = LatentMod.DIV_TWO
    latent_modification_c: LatentMod = LatentMod.DIV_TWO
    latent_apply_probability: float = 1.0
    global_var_count: int = 1000
    local_var_count: int = 10
    local_name_scope: LocalNameScope = LocalNameScope.SHARED_POOL
    statement_count: int = 5
    expression_min_depth: int = 1
    expression_max_depth: int = 2
    min_var_length: int = 3
    max_var_length: int = 10
    min_int_value: int = 1
    max_int_value: int = 100
    dataset_size: int = 100_000
    test_dataset_size: int = 10_000
    global_variables_num_appearance: int = 1000
    typo_probability: float = 0.0
    noise_mode: NoiseMode = NoiseMode.OFF
    noise_probability: float = 0.3
    global_layout: GlobalLayout = GlobalLayout.DISTRIBUTED
    segment_token_budget: int = 1_000_000
    master_seed: int = 0
    test_token_mix: bool = False
    use_faker: bool = False

    def latent_boundaries(self) -> tuple[int, int]:
        """(a, b) with the -1 sentinel resolved to the end of the alphabet."""
        b = 26 if self.latent_char_b == -1 else self.latent_char_b
        return self.latent_char_a, b


BASE_CONFIG = GenConfig()


# -- key codecs ---------------------------------------------------------------

def _enum_codec(enum_cls):
    def dec(v, key):
        if not isinstance(v, str):
            raise ConfigParseError(f"{key}: expected a string")
        norm = v.strip().upper().replace("-", "_")
        for member in enum_cls:
            if member.value.upper() == norm or member.name == norm:
                return member
        raise ConfigParseError(f"{key}: unknown value {v!r}")

    return dec, lambda m: m.value


def _mod_dec(v, key):
    if not isinstance(v, str):
        raise ConfigParseError(f"{key}: expected a string")
    norm = v.strip().lower()
    table = {"*2": LatentMod.TIMES_TWO, "/2": LatentMod.DIV_TWO,
             "": LatentMod.NONE, "none": LatentMod.NONE}
    if norm not in table:
        raise ConfigParseError(f"{key}: unknown modification {v!r}")
    return table[norm]


def _int_dec(v, key):
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigParseError(f"{key}: expected an integer, got {v!r}")
    return v


def _float_dec(v, key):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigParseError(f"{key}: expected a number, got {v!r}")
    return float(v)


def _bool_dec(v, key):
    if not isinstance(v, bool):
        raise ConfigParseError(f"{key}: expected a boolean, got {v!r}")
    return v


def _symbols_dec(n):
    def dec(v, key):
        if not isinstance(v, (list, tuple)) or len(v) != n \
                or not all(isinstance(s, str) for s in v):
            raise ConfigParseError(f"{key}: expected {n} symbol strings")
        return tuple(v)

    return dec


def _pair_dec(v, key):
    if not isinstance(v, (list, tuple)) or len(v) != 2 \
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v):
        raise ConfigParseError(f"{key}: expected a pair of numbers")
    return (float(v[0]), float(v[1]))


_lang_dec, _lang_enc = _enum_codec(Language)
_case_dec, _case_enc = _enum_codec(Case)
_scope_dec, _scope_enc = _enum_codec(LocalNameScope)
_noise_dec, _noise_enc = _enum_codec(NoiseMode)
_layout_dec, _layout_enc = _enum_codec(GlobalLayout)

_list_enc = lambda v: repr(list(v))
_str_enc = lambda v: repr(v)

# key -> (field name, decoder, encoder). Order is the serialization order.
_KEYS: dict[str, tuple] = {
    "LANGUAGE": ("language", _lang_dec, lambda m: repr(m.value)),
    "OPERATORS_LOLA": ("operators_lola", _symbols_dec(4), _list_enc),
    "OPERATORS_MEME": ("operators_meme", _symbols_dec(4), _list_enc),
    "GROUPING_LOLA": ("grouping_lola", _symbols_dec(2), _list_enc),
    "GROUPING_MEME": ("grouping_meme", _symbols_dec(2), _list_enc),
    "CASE_LOLA": ("case_lola", _case_dec, lambda m: repr(m.value)),
    "CASE_MEME": ("case_meme", _case_dec, lambda m: repr(m.value)),
    "VAR_NAME_UNDERSCORE_PROBABILITY":
        ("var_name_underscore_probability", _float_dec, repr),
    "LATENT_CARACTER_ASCII_A": ("latent_char_a", _int_dec, repr),
    "LATENT_CARACTER_ASCII_B": ("latent_char_b", _int_dec, repr),
    # Terminal boundary marker in published configs; the class layout is fully
    # determined by A and B, so the value is accepted and ignored.
    "LATENT_CARACTER_ASCII_C": (None, _int_dec, None),
    "LATENT_VARIABLE_PROBABILITY":
        ("latent_variable_probability", _pair_dec, lambda v: repr(tuple(v))),
    "LATENT_TYPE_A_MODIFICATION":
        ("latent_modification_a", _mod_dec, lambda m: repr(m.value)),
    "LATENT_TYPE_B_MODIFICATION":
        ("latent_modification_b", _mod_dec, lambda m: repr(m.value)),
    "LATENT_TYPE_C_MODIFICATION":
        ("latent_modification_c", _mod_dec, lambda m: repr(m.value)),
    "LATENT_APPLY_PROBABILITY": ("latent_apply_probability", _float_dec, repr),
    "GLOBAL_VAR_COUNT": ("global_var_count", _int_dec, repr),
    "LOCAL_VAR_COUNT": ("local_var_count", _int_dec, repr),
    "LOCAL_NAME_SCOPE": ("local_name_scope", _scope_dec, lambda m: repr(m.value)),
    "STATEMENT_COUNT": ("statement_count", _int_dec, repr),
    "EXPRESSION_MIN_DEPTH": ("expression_min_depth", _int_dec, repr),
    "EXPRESSION_MAX_DEPTH": ("expression_max_depth", _int_dec, repr),
    "MIN_VAR_LENGTH": ("min_var_length", _int_dec, repr),
    "MAX_VAR_LENGTH": ("max_var_length", _int_dec, repr),
    "MIN_INT_VALUE": ("min_int_value", _int_dec, repr),
    "MAX_INT_VALUE": ("max_int_value", _int_dec, repr),
    "DATASET_SIZE": ("dataset_size", _int_dec, repr),
    "TEST_DATASET_SIZE": ("test_dataset_size", _int_dec, repr),
    "GLOBAL_VARIABLES_NUM_APPEARANCE":
        ("global_variables_num_appearance", _int_dec, repr),
    "TYPO_PROBABILITY": ("typo_probability", _float_dec, repr),
    "NOISE_MODE": ("noise_mode", _noise_dec, lambda m: repr(m.value)),
    "NOISE_PROBABILITY": ("noise_probability", _float_dec, repr),
    "GLOBAL_LAYOUT": ("global_layout", _layout_dec, lambda m: repr(m.value)),
    "SEGMENT_TOKEN_BUDGET": ("segment_token_budget", _int_dec, repr),
    "MASTER_SEED": ("master_seed", _int_dec, repr),
    "TEST_TOKEN_MIX": ("test_token_mix", _bool_dec, repr),
    "USE_FAKER": ("use_faker", _bool_dec, repr),
}

_FIELD_TO_KEY = {f: k for k, (f, _, _) in _KEYS.items() if f}

_KEY_LINE = re.compile(
    r"""^\s*(?:"(?P<dq>[A-Z][A-Z_0-9]*)"|'(?P<sq>[A-Z][A-Z_0-9]*)'|(?P<bare>[A-Z][A-Z_0-9]*))\s*:\s*(?P<value>.+)$"""
)
_INT_CALL = re.compile(r"int\(\s*([0-9eE.+-]+)\s*\)")
_SKIP_LINE = re.compile(r"^\s*(?:[A-Za-z_][A-Za-z_0-9]*\s*=\s*)?\{\s*$|^\s*\}\s*,?\s*$")


def _strip_comment(line: str) -> str:
    quote = None
    for i, ch in enumerate(line):
        if quote:
            if ch == quote:
                quote = None
        elif ch in "'\"":
            quote = ch
        elif ch == "#":
            return line[:i]
    return line


def _parse_value(text: str, key: str):
    text = text.strip()
    if text.endswith(","):
        text = text[:-1].rstrip()
    text = _INT_CALL.sub(lambda m: str(int(float(m.group(1)))), text)
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError) as exc:
        raise ConfigParseError(f"{key}: cannot parse value {text!r}") from exc


def load_config(text: str) -> GenConfig:
    """Parse a config document and return a validated GenConfig.

    Absent keys take their documented defaults; unknown keys raise
    UnknownKey; invariant violations raise InvalidConfig.
    """
    overrides: dict[str, object] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line or _SKIP_LINE.match(line):
            continue
        m = _KEY_LINE.match(line)
        if m is None:
            raise ConfigParseError(f"line {line_no}: not a KEY: value line: {raw.strip()!r}")
        key = m.group("dq") or m.group("sq") or m.group("bare")
        if key not in _KEYS:
            raise UnknownKey(f"line {line_no}: unknown key {key!r}")
        field, dec, _ = _KEYS[key]
        value = dec(_parse_value(m.group("value"), key), key)
        if field is None:
            continue
        if field in overrides:
            raise ConfigParseError(f"line {line_no}: duplicate key {key!r}")
        overrides[field] = value
    cfg = replace(BASE_CONFIG, **overrides)
    ensure_valid(cfg)
    return cfg


def serialize(cfg: GenConfig) -> str:
    """Canonical key-value document; load_config(serialize(c)) == c."""
    lines = []
    for key, (field, _, enc) in _KEYS.items():
        if field is None:
            continue
        lines.append(f"{key}: {enc(getattr(cfg, field))}")
    return "\n".join(lines) + "\n"


@dataclass
class ValidationReport:
    errors: list[str]
    warnings: list[str]

    @property
    def ok(self) -> bool:
        return not self.errors


def validate(cfg: GenConfig) -> ValidationReport:
    """Check every config invariant; returns all violations, never raises."""
    errors: list[str] = []
    warnings: list[str] = []

    def prob(field):
        v = getattr(cfg, field)
        if not 0.0 <= v <= 1.0:
            errors.append(f"{_FIELD_TO_KEY[field]}: probability must be in [0, 1]")

    if cfg.min_var_length < 2:
        errors.append("MIN_VAR_LENGTH: must be >= 2")
    if cfg.min_var_length > cfg.max_var_length:
        errors.append("MIN_VAR_LENGTH: must be <= MAX_VAR_LENGTH")
    if cfg.min_int_value < 1:
        errors.append("MIN_INT_VALUE: must be >= 1")
    if cfg.min_int_value > cfg.max_int_value:
        errors.append("MIN_INT_VALUE: must be <= MAX_INT_VALUE")
    if cfg.expression_min_depth < 1:
        errors.append("EXPRESSION_MIN_DEPTH: must be >= 1")
    if cfg.expression_min_depth > cfg.expression_max_depth:
        errors.append("EXPRESSION_MIN_DEPTH: must be <= EXPRESSION_MAX_DEPTH")
    if cfg.latent_char_b == -1:
        if not 0 <= cfg.latent_char_a <= 26:
            errors.append("LATENT_CARACTER_ASCII_A: must be in [0, 26]")
    elif not 0 <= cfg.latent_char_a <= cfg.latent_char_b <= 26:
        errors.append("LATENT_CARACTER_ASCII_A/B: need 0 <= A <= B <= 26 (or B = -1)")
    pa, pb = cfg.latent_variable_probability
    if not (0.0 <= pa <= 1.0 and 0.0 <= pb <= 1.0):
        errors.append("LATENT_VARIABLE_PROBABILITY: entries must be in [0, 1]")
    elif pa + pb > 1.0 + 1e-12:
        errors.append("LATENT_VARIABLE_PROBABILITY: pA + pB must be <= 1")
    prob("var_name_underscore_probability")
    prob("latent_apply_probability")
    prob("typo_probability")
    prob("noise_probability")

    for key, ops in (("OPERATORS_LOLA", cfg.operators_lola),
                     ("OPERATORS_MEME", cfg.operators_meme)):
        if len(set(ops)) != 4:
            errors.append(f"{key}: need exactly 4 distinct symbols")
        if any(len(s) != 1 for s in ops):
            errors.append(f"{key}: symbols must be single characters")
    if set(cfg.operators_lola) & set(cfg.operators_meme):
        errors.append("OPERATORS_LOLA/MEME: symbol sets must be disjoint")
    grouping = set(cfg.grouping_lola) | set(cfg.grouping_meme)
    if len(grouping) != 4 or any(len(s) != 1 for s in grouping):
        errors.append("GROUPING_LOLA/MEME: need 4 distinct single-character symbols")
    if grouping & (set(cfg.operators_lola) | set(cfg.operators_meme)):
        errors.append("GROUPING_LOLA/MEME: grouping symbols must not be operator symbols")
    reserved = set("=;_") | set("0123456789") | set("abcdefghijklmnopqrstuvwxyz") \
        | set("ABCDEFGHIJKLMNOPQRSTUVWXYZ")
    clashing = (grouping | set(cfg.operators_lola) | set(cfg.operators_meme)) & reserved
    if clashing:
        errors.append(f"operator/grouping symbols clash with literals: {sorted(clashing)}")

    if cfg.global_var_count < 0:
        errors.append("GLOBAL_VAR_COUNT: must be >= 0")
    if cfg.local_var_count < 1:
        errors.append("LOCAL_VAR_COUNT: must be >= 1")
    if cfg.statement_count < 1:
        errors.append("STATEMENT_COUNT: must be >= 1")
    if cfg.dataset_size < 1:
        errors.append("DATASET_SIZE: must be >= 1")
    if cfg.test_dataset_size < 1:
        errors.append("TEST_DATASET_SIZE: must be >= 1")
    if cfg.global_variables_num_appearance < 0:
        errors.append("GLOBAL_VARIABLES_NUM_APPEARANCE: must be >= 0")
    if cfg.global_layout is GlobalLayout.LOCAL and cfg.segment_token_budget < 1:
        errors.append("SEGMENT_TOKEN_BUDGET: must be >= 1 with LOCAL layout")
    if cfg.use_faker:
        errors.append("USE_FAKER: natural-word names are not supported")

    if cfg.typo_probability > 0 and not 0.001 <= cfg.typo_probability <= 0.01:
        warnings.append("TYPO_PROBABILITY: outside the customary 0.001..0.01 range")
    return ValidationReport(errors, warnings)


def ensure_valid(cfg: GenConfig) -> GenConfig:
    report = validate(cfg)
    if not report.ok:
        raise InvalidConfig(report.errors)
    return cfg


def config_as_dict(cfg: GenConfig) -> dict:
    """JSON-friendly snapshot keyed by the document key names."""
    out = {}
    for key, (field, _, _) in _KEYS.items():
        if field is None:
            continue
        v = getattr(cfg, field)
        if isinstance(v, Enum):
            v = v.value
        elif isinstance(v, tuple):
            v = list(v)
        out[key] = v
    return out


__all__ = [name for name in dir() if not name.startswith("_")]


def _check_field_map() -> None:
    mapped = {f for f, _, _ in _KEYS.values() if f}
    declared = {f.name for f in fields(GenConfig)}
    assert mapped == declared, declared ^ mapped


_check_field_map()
