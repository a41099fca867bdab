import pytest

from synthlang.config import (BASE_CONFIG, Case, GenConfig, GlobalLayout,
                              Language, LatentMod, LocalNameScope, NoiseMode,
                              load_config, serialize, validate)
from synthlang.errors import ConfigParseError, InvalidConfig, UnknownKey

# The published base configuration, pasted in its original dict framing.
DRAFT_BASE_TEXT = """
baseconfig = {
    "LANGUAGE": "LOLA",
    "OPERATORS_LOLA": ['+', '-', '*', '%'], #operators used when LANGUAGE is LOLA
    "OPERATORS_MEME": ['|', '!','@','/'], #operators used when LANGUAGE is MEME
    "GROUPING_LOLA": ['(', ')'], #Grouping bracket style used when LANGUAGE is LOLA
    "GROUPING_MEME": ['{', '}'], #Grouping bracket style used when LANGUAGE is MEME
    "CASE_LOLA": 'camel',
    "CASE_MEME": 'snake',
    'VAR_NAME_UNDERSCORE_PROBABILITY':0.5, #Add underscore or capitalize a random char
    'LATENT_CARACTER_ASCII_A':23, #0-23
    'LATENT_CARACTER_ASCII_B':23, #23-26
    'LATENT_CARACTER_ASCII_C':26, #26-26
    'LATENT_VARIABLE_PROBABILITY':(0.3,0.4),
    'LATENT_TYPE_A_MODIFICATION':'*2',
    'LATENT_TYPE_B_MODIFICATION':'/2',
    'LATENT_TYPE_C_MODIFICATION':'/2',
    "GLOBAL_VAR_COUNT": 1000, # number of unique global vars
    "LOCAL_VAR_COUNT": 10, # number of unique local vars
    "STATEMENT_COUNT": 5, # number of statements in one data item
    "EXPRESSION_MIN_DEPTH":1, #min recursions in a statement
    "EXPRESSION_MAX_DEPTH": 2, # max recursions in a statement
    "MIN_VAR_LENGTH": 3, #min string length of variables
    "MAX_VAR_LENGTH": 10, #max string length of variables
    "MIN_INT_VALUE": 1, #min values assigned of variables
    "MAX_INT_VALUE": 100, #max values assigned of variables
    "DATASET_SIZE":int(1e5), #train dataset size
    "TEST_DATASET_SIZE":int(1e4), #test dataset size
    "GLOBAL_VARIABLES_NUM_APPEARANCE":1000, #number of times each global var appears
    "USE_FAKER":False, #use faker to generate variables
}
"""

REVISED_OVERRIDES = """
'LATENT_CARACTER_ASCII_A': 23
'LATENT_CARACTER_ASCII_B': -1
'LATENT_CARACTER_ASCII_C': -1
"GLOBAL_VAR_COUNT": 500
"""


def test_base_text_loads_published_values():
    cfg = load_config(DRAFT_BASE_TEXT)
    assert cfg.statement_count == 5
    assert cfg.min_var_length == 3
    assert cfg.max_var_length == 10
    assert cfg.min_int_value == 1
    assert cfg.max_int_value == 100
    assert cfg.global_var_count == 1000
    assert cfg.local_var_count == 10
    assert cfg.dataset_size == 100_000
    assert cfg.test_dataset_size == 10_000
    assert cfg.global_variables_num_appearance == 1000
    assert cfg.operators_lola == ("+", "-", "*", "%")
    assert cfg.operators_meme == ("|", "!", "@", "/")
    assert cfg.grouping_lola == ("(", ")")
    assert cfg.grouping_meme == ("{", "}")
    assert cfg.case_lola is Case.CAMEL
    assert cfg.case_meme is Case.SNAKE
    assert cfg.var_name_underscore_probability == 0.5
    assert cfg.latent_variable_probability == (0.3, 0.4)
    assert cfg.latent_modification_a is LatentMod.TIMES_TWO
    assert cfg.latent_modification_b is LatentMod.DIV_TWO
    assert cfg.latent_modification_c is LatentMod.DIV_TWO
    assert cfg.use_faker is False


def test_revised_overrides():
    cfg = load_config(REVISED_OVERRIDES)
    assert cfg.global_var_count == 500
    assert cfg.latent_char_b == -1
    assert cfg.latent_boundaries() == (23, 26)


def test_empty_document_gives_defaults():
    assert load_config("") == BASE_CONFIG


def test_defaults_mirror_published_numbers():
    cfg = BASE_CONFIG
    assert (cfg.statement_count, cfg.expression_min_depth,
            cfg.expression_max_depth) == (5, 1, 2)
    assert (cfg.min_var_length, cfg.max_var_length) == (3, 10)
    assert (cfg.min_int_value, cfg.max_int_value) == (1, 100)
    assert (cfg.dataset_size, cfg.test_dataset_size) == (100_000, 10_000)
    assert cfg.global_variables_num_appearance == 1000
    assert cfg.global_var_count == 1000
    assert cfg.local_var_count == 10
    assert cfg.latent_apply_probability == 1.0
    assert cfg.language is Language.LOLA
    assert cfg.noise_mode is NoiseMode.OFF
    assert cfg.local_name_scope is LocalNameScope.SHARED_POOL
    assert cfg.global_layout is GlobalLayout.DISTRIBUTED
    assert cfg.typo_probability == 0.0


def test_negative_count_rejected():
    with pytest.raises(InvalidConfig):
        load_config("GLOBAL_VAR_COUNT: -3")


def test_unknown_key_rejected():
    with pytest.raises(UnknownKey):
        load_config("GLOBAL_VAR_COUNTZ: 3")


def test_duplicate_key_rejected():
    with pytest.raises(ConfigParseError):
        load_config("STATEMENT_COUNT: 5\nSTATEMENT_COUNT: 6")


def test_malformed_value_rejected():
    with pytest.raises(ConfigParseError):
        load_config("STATEMENT_COUNT: five")
    with pytest.raises(ConfigParseError):
        load_config("STATEMENT_COUNT: 5.5")


def test_serialize_round_trip():
    import dataclasses
    cfg = dataclasses.replace(
        BASE_CONFIG, language=Language.MIXED_HALF, master_seed=99,
        noise_mode=NoiseMode.DEAD_STATEMENT, typo_probability=0.005,
        latent_char_b=-1, test_token_mix=True)
    assert load_config(serialize(cfg)) == cfg
    assert load_config(serialize(BASE_CONFIG)) == BASE_CONFIG


def test_validate_base_is_clean():
    report = validate(BASE_CONFIG)
    assert report.ok and not report.warnings


@pytest.mark.parametrize("overrides,needle", [
    (dict(min_var_length=10, max_var_length=3), "MIN_VAR_LENGTH"),
    (dict(latent_variable_probability=(0.7, 0.5)), "LATENT_VARIABLE_PROBABILITY"),
    (dict(expression_min_depth=3), "EXPRESSION_MIN_DEPTH"),
    (dict(min_int_value=0), "MIN_INT_VALUE"),
    (dict(operators_meme=("|", "!", "@", "+")), "disjoint"),
    (dict(grouping_meme=("{", "+")), "GROUPING"),
    (dict(latent_char_a=27), "LATENT_CARACTER"),
    (dict(use_faker=True), "USE_FAKER"),
    (dict(min_var_length=1), "MIN_VAR_LENGTH"),
])
def test_validate_reports_violation(overrides, needle):
    import dataclasses
    report = validate(dataclasses.replace(BASE_CONFIG, **overrides))
    assert not report.ok
    assert any(needle in e for e in report.errors)


def test_typo_range_is_warning_not_error():
    import dataclasses
    report = validate(dataclasses.replace(BASE_CONFIG, typo_probability=0.5))
    assert report.ok
    assert report.warnings
