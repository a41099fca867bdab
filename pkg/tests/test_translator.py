import pytest

from oracle import oracle_evaluate
from synthlang.errors import NameCollision
from synthlang.generator import Mode
from synthlang.interpreter import Environment, LatentRules, evaluate
from synthlang.lang import RenderLang, latent_type_of
from synthlang.parser import Accept, parse_module
from synthlang.translator import to_camel, to_snake, translate


def test_meme_to_lola():
    assert translate("a_b = {1 | 2};print(a_b)", Accept.MEME_ONLY,
                     RenderLang.LOLA) == "aB = (1 + 2);print(aB)"


def test_lola_to_lola_is_identity_on_canonical_text():
    text = "aB = (cDe - 4);fG = aB;print(fG)"
    assert translate(text, Accept.LOLA_ONLY, RenderLang.LOLA) == text


def test_mixed_normalizes_to_lola():
    assert translate("zAb = (2@3};print(zAb)", Accept.ANY_MIXED,
                     RenderLang.LOLA) == "zAb = (2 * 3);print(zAb)"


def test_lola_to_meme():
    assert translate("aB = (cDe - 4);print(aB)", Accept.LOLA_ONLY,
                     RenderLang.MEME) == "a_b = {c_de ! 4};print(a_b)"


@pytest.mark.parametrize("snake,camel", [
    ("a_b", "aB"),
    ("mx_mlp_ai", "mxMlpAi"),
    ("plain", "plain"),
    ("b_h_j_f_l", "bHJFL"),
])
def test_case_conversion_pairs(snake, camel):
    assert to_camel(snake) == camel
    assert to_snake(camel) == snake


def test_case_conversion_preserves_first_character():
    for name in ("xnbolt", "x_nbolt", "xNbolt", "zG"):
        assert to_camel(name)[0] == name[0]
        assert to_snake(name)[0] == name[0]
        assert latent_type_of(to_camel(name), (23, 26)) \
            == latent_type_of(name, (23, 26))


def test_name_collision_detected():
    with pytest.raises(NameCollision):
        translate("a_b = 1;aB = (a_b + 1);print(aB)", Accept.ANY_MIXED,
                  RenderLang.LOLA)


def test_round_trip_lola_meme_lola(module_factory):
    for i in range(0, 400, 2):  # even indices render as lola
        sample, _ = module_factory(i)
        there = translate(sample.input, Accept.LOLA_ONLY, RenderLang.MEME)
        back = translate(there, Accept.MEME_ONLY, RenderLang.LOLA)
        assert back == sample.input


def test_semantic_preservation_small(module_factory):
    rules = LatentRules()
    for i in range(300):
        sample, env = module_factory(i)
        src = Accept.LOLA_ONLY if sample.lang == "lola" else Accept.MEME_ONLY
        before = evaluate(parse_module(sample.input, src), Environment(env),
                          rules).printed
        for dst in (RenderLang.LOLA, RenderLang.MEME):
            moved = translate(sample.input, src, dst)
            after = evaluate(parse_module(moved, Accept.ANY_MIXED),
                             Environment(env), rules).printed
            assert after == before, (sample.input, moved)
