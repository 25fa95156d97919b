import json
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conicbilliards.cli import validate
from conicbilliards.errors import ParseError
from conicbilliards.projbill import OrientedState
from conicbilliards.scalars import format_scalar, parse_scalar
from conicbilliards.scenes import dumps, load, loads, preset, preset_names, save, scene_from_dict

PRESETS = preset_names()


def test_gallery_contents():
    for name in ("type-a-square", "confocal-ellipses", "figd4-triangle", "fig12-quadrilateral",
                 "semi-euclidean-focus-line", "2a1-N1", "2b1", "2c2", "2d"):
        assert name in PRESETS


@pytest.mark.parametrize("name", PRESETS)
def test_round_trip_is_byte_identical(name):
    text = dumps(preset(name))
    assert dumps(loads(text)) == text
    assert text.endswith("\n")


@pytest.mark.parametrize("name", [n for n in PRESETS if n != "type-b-invalid"])
def test_presets_validate_with_expected_degree(name):
    scene = preset(name)
    v = validate(scene)
    assert v.valid, v.messages
    assert v.degree == scene.expected_degree


def test_invalid_preset_reports_condition_three():
    v = validate(preset("type-b-invalid"))
    assert not v.valid and 3 in v.violated


def test_save_and_load(tmp_path):
    path = tmp_path / "scene.json"
    save(preset("figd4-triangle"), path)
    assert dumps(load(path)) == path.read_text()


def test_exact_numbers_survive_as_strings():
    doc = json.loads(dumps(preset("figd4-triangle")))
    assert doc["format"] == "conicbilliards-scene" and doc["version"] == 1
    scene = scene_from_dict(doc)
    assert scene.mu == F(2) and isinstance(scene.mu, F)
    assert scene.states[0].position == (F(-1, 10), F(1, 2))


def _doc(name="confocal-ellipses"):
    return json.loads(dumps(preset(name)))


def test_parse_error_on_malformed_json():
    with pytest.raises(ParseError) as info:
        loads('{\n"format": \n')
    assert info.value.location.startswith("line ")


def test_parse_error_reports_path_of_bad_number():
    doc = _doc()
    doc["billiard"]["pieces"][0]["conic"][1][1] = "1/0"
    with pytest.raises(ParseError) as info:
        scene_from_dict(doc)
    assert info.value.location == "billiard.pieces[0].conic[1][1]"


def test_parse_error_on_missing_field_type():
    doc = _doc()
    del doc["billiard"]["pieces"][0]["field"]["type"]
    with pytest.raises(ParseError) as info:
        scene_from_dict(doc)
    assert info.value.location == "billiard.pieces[0].field"


def test_exactly_one_of_billiard_and_multibilliard():
    doc = _doc()
    doc["multibilliard"] = _doc("type-a-square")["multibilliard"]
    with pytest.raises(ParseError):
        scene_from_dict(doc)
    del doc["multibilliard"], doc["billiard"]
    with pytest.raises(ParseError):
        scene_from_dict(doc)


def test_wrong_format_tag_and_version():
    doc = _doc()
    doc["version"] = 2
    with pytest.raises(ParseError) as info:
        scene_from_dict(doc)
    assert info.value.location == "version"


def test_dual_pencil_field_needs_a_declared_pencil():
    doc = _doc("figd4-triangle")
    del doc["pencil"]
    with pytest.raises(ParseError):
        scene_from_dict(doc)


rationals = st.fractions(min_value=-1000, max_value=1000, max_denominator=500)


@given(rationals)
def test_scalar_text_round_trip(x):
    assert parse_scalar(format_scalar(x)) == x


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_text_round_trip(x):
    y = parse_scalar(format_scalar(x))
    assert y == x


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.tuples(rationals, rationals, rationals, rationals).filter(lambda t: t[2] or t[3]), max_size=4),
    st.integers(min_value=1, max_value=10_000),
    st.integers(min_value=0, max_value=2**31),
    rationals.filter(lambda m: m not in (0, 1)),
)
def test_scene_round_trip_property(states, steps, seed, mu):
    scene = preset("confocal-ellipses")
    scene.states = [OrientedState((a, b), (c, d)) for a, b, c, d in states]
    scene.steps, scene.seed, scene.mu = steps, seed, mu
    text = dumps(scene)
    again = loads(text)
    assert dumps(again) == text
    assert again.mu == mu and again.steps == steps and again.seed == seed
