import json

import pytest

from conicbilliards.cli import main
from conicbilliards.scenes import dumps, preset


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_classify_square_counts_vertices(capsys):
    code, out, _ = run(capsys, "classify", "type-a-square")
    assert code == 0
    assert "pencil type: a" in out
    assert "3 standard, 6 skew" in out


def test_classify_json_lists_catalog(capsys):
    code, out, _ = run(capsys, "classify", "type-a-square", "--json")
    data = json.loads(out)
    labels = {e["label"] for e in data["admissible_vertices"]}
    assert code == 0 and {"M1", "M2", "M3", "K_AB", "K_BD"} <= labels


def test_classify_dual_pencil_lists_lines(capsys):
    code, out, _ = run(capsys, "classify", "fig12-quadrilateral")
    assert code == 0 and "admissible lines:" in out


@pytest.mark.parametrize("name,degree", [("fig12-quadrilateral", 12), ("figd4-triangle", 4), ("confocal-ellipses", 2)])
def test_validate_reports_degree(capsys, name, degree):
    code, out, _ = run(capsys, "validate", name)
    assert code == 0
    assert f"predicted minimal degree: {degree}" in out


def test_validate_invalid_exits_two(capsys):
    code, out, _ = run(capsys, "validate", "type-b-invalid")
    assert code == 2 and "valid: no" in out


def test_integral_exotic_coefficients(capsys):
    code, out, err = run(capsys, "integral", "2a1-N2")
    art = json.loads(out)
    assert code == 0
    assert art["format"] == "conicbilliards-integral"
    assert art["parameters"] == {"c": ["-16/9", "-24"], "kind": "2a1-N2"}
    assert art["degree"] == 10
    assert "max deviation: 0" in err


def test_integral_degree_twelve_with_cross_check(capsys, tmp_path):
    path = tmp_path / "r.json"
    code, out, err = run(capsys, "integral", "fig12-quadrilateral", "--samples", "30", "-o", str(path))
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["degree"] == 12
    assert "proportional" in err and "MISMATCH" not in err
    assert "max deviation: 0" in err


def test_integral_zero_mu_is_an_error(capsys):
    code, _, err = run(capsys, "integral", "fig12-quadrilateral", "--mu", "0")
    assert code == 1 and "ZeroMu" in err


def test_simulate_json_drift(capsys):
    code, out, _ = run(capsys, "simulate", "semi-euclidean-focus-line", "--steps", "100", "--json")
    data = json.loads(out)
    assert code == 0
    run0 = data["runs"][0]
    assert run0["bounces"] == 100 and run0["relative_drift"] <= 1e-8


def test_simulate_stops_at_corner(capsys, tmp_path):
    scene = preset("fig12-quadrilateral")
    corner = scene.billiard.pieces[1].geometry.start.chart()
    start = (scene.states[0].position[0], scene.states[0].position[1])
    doc = json.loads(dumps(scene))
    doc["simulation"]["states"] = [{
        "position": [str(start[0]), str(start[1])],
        "direction": [str(corner[0] - start[0]), str(corner[1] - start[1])],
    }]
    path = tmp_path / "corner.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "simulate", str(path), "--json")
    r = json.loads(out)["runs"][0]
    assert code == 0
    assert r["event"] == "CornerHit" and r["bounces"] == 0


def test_simulate_writes_svg(capsys, tmp_path):
    path = tmp_path / "orbit.svg"
    code, _, _ = run(capsys, "simulate", "confocal-ellipses", "--steps", "20", "--svg", str(path))
    text = path.read_text()
    assert code == 0
    assert "<svg" in text and 'class="boundary"' in text and 'class="orbit"' in text


def test_simulate_random_states(capsys):
    code, out, _ = run(capsys, "simulate", "confocal-ellipses", "--steps", "5", "--random-states", "2",
                       "--seed", "7", "--json")
    assert code == 0 and len(json.loads(out)["runs"]) == 3


def test_presets_listing_and_export(capsys, tmp_path):
    code, out, _ = run(capsys, "presets")
    assert code == 0 and "fig12-quadrilateral" in out.split()
    path = tmp_path / "p.json"
    code, _, _ = run(capsys, "presets", "2d", "-o", str(path))
    assert code == 0 and path.read_text() == dumps(preset("2d"))


def test_malformed_file_exits_one(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"format": "conicbilliards-scene",\n')
    code, _, err = run(capsys, "validate", str(path))
    assert code == 1 and "line" in err


def test_missing_file_exits_one(capsys, tmp_path):
    code, _, _ = run(capsys, "classify", str(tmp_path / "nope.json"))
    assert code == 1


def test_console_entry_point_is_importable():
    from importlib.metadata import entry_points

    eps = [e for e in entry_points(group="console_scripts") if e.name == "conicbilliards"]
    assert eps and eps[0].value == "conicbilliards.cli:main"
