import json
from pathlib import Path

import numpy as np
import pytest

from steiner_cover.calib import _config, builtin, verify
from steiner_cover.families import family_candidate, hexagon_families
from steiner_cover.scene import (
    VERSION,
    SceneError,
    SceneFile,
    candidate_strip,
    dumps,
    fixture_names,
    fixture_scene,
    load,
    load_fixture,
    loads,
    render_svg,
    save,
    to_dict,
)
from steiner_cover.sheets import perimeter

GOLDEN = Path(__file__).parent / "golden"


def test_fixture_names():
    names = fixture_names()
    assert len(names) == 23
    assert names[:3] == ["hexagon-1", "hexagon-2", "hexagon-3"]
    assert "pentagon-5" in names and "square" in names


@pytest.mark.parametrize("name", ["segment", "square", "pentagon-5", "hexagon-10", "triangle-obtuse"])
def test_round_trip_is_stable(name):
    text = dumps(load_fixture(name))
    assert dumps(loads(text)) == text


def test_loaded_fixture_still_verifies():
    sc = load_fixture("pentagon-5")
    E, f = sc.sets[0], sc.fields[0]
    rep = verify(f, E, J=sc.jset("J"))
    assert rep.verdict
    assert perimeter(E) == pytest.approx(sc.meta["perimeter"], abs=1e-9)


def test_hexagon_1_coordinates():
    sc = load_fixture("hexagon-1")
    assert np.allclose(sc.config.points[4], (1, 0))
    assert sc.m == 6 and len(sc.covering().cuts.sigma) == 5


def test_save_load(tmp_path):
    sc = fixture_scene(builtin("triangle-equilateral"))
    p = tmp_path / "t.json"
    save(sc, p)
    back = load(p)
    assert dumps(back) == dumps(sc)
    assert json.loads(p.read_text())["version"] == VERSION


def _doc():
    return to_dict(fixture_scene(builtin("triangle-equilateral")))


def _expect(doc, where):
    text = json.dumps(doc, indent=1)
    with pytest.raises(SceneError) as e:
        loads(text)
    assert e.value.path.startswith(where), str(e.value)
    return e.value


def test_pair_with_equal_labels_rejected():
    d = _doc()
    d["jsets"][0]["pairs"] = [[2, 2]]
    err = _expect(d, "$.jsets[0].pairs[0]")
    assert "i = j" in str(err) and err.line is not None


def test_label_out_of_range():
    d = _doc()
    d["sets"][0]["faces"][0]["label"] = 7
    _expect(d, "$.sets[0].faces[0].label")


def test_missing_witness():
    d = _doc()
    d["sets"][0]["faces"].pop()
    _expect(d, "$.sets[0].faces")


def test_duplicate_witness():
    d = _doc()
    d["sets"][0]["faces"][1]["witness"] = d["sets"][0]["faces"][0]["witness"]
    _expect(d, "$.sets[0].faces[1].witness")


def test_bad_version_and_unknown_key():
    d = _doc()
    d["version"] = "steiner-cover/0"
    _expect(d, "$.version")
    d = _doc()
    d["extra"] = 1
    _expect(d, "$.extra")


def test_self_intersecting_window():
    d = _doc()
    d["fields"][0]["window"] = [[0, 0], [1, 1], [1, 0], [0, 1]]
    _expect(d, "$.fields[0].window")


def test_json_syntax_error_position():
    with pytest.raises(SceneError) as e:
        loads('{"version": "steiner-cover/1",\n  "config": }')
    assert e.value.line == 2


def test_unknown_fixture():
    with pytest.raises(KeyError):
        load_fixture("heptagon")


# ------------------------------------------------------------------ golden SVG


def _golden(name, text):
    assert text == (GOLDEN / name).read_text(encoding="utf-8")


def test_svg_pentagon_panels():
    svg = render_svg(fixture_scene(builtin("pentagon(5)")))
    assert svg.count('<g id="panel') == 5
    _golden("pentagon-5.svg", svg)


def test_svg_config_dots():
    svg = render_svg(SceneFile(_config("hexagon")))
    assert svg.count('<g id="panel') == 1
    _golden("hexagon-config.svg", svg)


def test_svg_family_strip():
    c = _config("hexagon")
    cov = builtin("hexagon-1").cov
    cands = [(f"J{f.index}", family_candidate(c, f, cov).network) for f in hexagon_families()]
    svg = candidate_strip(c, cands, cov.cuts)
    assert svg.count('<g id="panel') == 14
    _golden("hexagon-families.svg", svg)


def test_svg_deterministic():
    sc = load_fixture("square")
    assert render_svg(sc) == render_svg(loads(dumps(sc)))
