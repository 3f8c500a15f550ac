import dataclasses
import json

import numpy as np
import pytest
import weightscope
from weightscope import IndexKind, Role, RoleTag
from weightscope.report import (
    color_range,
    format_number,
    json_safe,
    matrix_document,
    render_heatmap,
    render_profiles,
    write_csv,
    write_json,
    write_matrix_csv,
)

@pytest.fixture
def sim():
    return weightscope.SimilarityMatrix(
        np.array([
            [1.0,   0.25, 0.5],
            [0.25,  1.0,  0.125],
            [0.5,   0.125, 1.0],
        ]),

        kind     = IndexKind.DOCS,
        role     = RoleTag(Role.MlpUp),
        model_id = "tiny",
    )

def test_format_number():
    assert format_number(2 / 3)          == "0.666666667"
    assert format_number(1.0)            == "1"
    assert format_number(np.float32(0.5)) == "0.5"
    assert format_number(1e-12)          == "1e-12"
    assert format_number(7)              == "7"
    assert format_number(np.int64(7))    == "7"
    assert format_number(True)           == "true"
    assert format_number(None)           == "undefined"
    assert format_number("layer")        == "layer"

def test_json_safe():
    @dataclasses.dataclass
    class Point:
        x: float
        y: object

    assert json_safe({
        1:        np.float64(0.5),
        "array":  np.arange(3),
        "kind":   IndexKind.LINEAR_CKA,
        "point":  Point(np.inf, (np.bool_(True), None)),
        "role":   RoleTag(Role.Wq),
    }) == {
        "1":     0.5,
        "array": [0, 1, 2],
        "kind":  "LINEAR_CKA",
        "point": {"x": None, "y": [True, None]},
        "role":  {"role": "Wq", "expert": None},
    }

def test_json_safe_as_dict():
    fit = weightscope.GumbelFit(0.5, 0.01, 3, True, False)

    assert json_safe(fit) == fit.as_dict()

def test_write_csv(tmp_path):
    path = write_csv(tmp_path / "table.csv", ["layer", "value"], [[0, 1 / 3], [1, None]])

    assert path.read_text(encoding="utf-8") == "layer,value\n0,0.333333333\n1,undefined\n"

def test_write_json(tmp_path):
    path = write_json(tmp_path / "doc.json", {"value": np.float64(0.1), "missing": np.nan})

    assert json.loads(path.read_text(encoding="utf-8")) == {"value": 0.1, "missing": None}
    assert path.read_text(encoding="utf-8").endswith("}\n")

def test_write_matrix_csv(tmp_path, sim):
    path = write_matrix_csv(tmp_path / "matrix.csv", sim)

    assert path.read_text(encoding="utf-8").splitlines() == [
        ",0,1,2",
        "0,1,0.25,0.5",
        "1,0.25,1,0.125",
        "2,0.5,0.125,1",
    ]

def test_matrix_document(sim):
    document = matrix_document(sim, gini=0.1)

    assert document["model_id"] == "tiny"
    assert document["role"]     == str(RoleTag(Role.MlpUp))
    assert document["kind"]     == "DOCS"
    assert document["labels"]   == [0, 1, 2]
    assert document["gini"]     == 0.1

    assert json_safe(document)["values"][0] == [1.0, 0.25, 0.5]

def test_color_range():
    assert color_range(np.array([[1.0, 0.25], [0.5, 1.0]])) == (0.25, 0.5)
    assert color_range(np.array([[0.75]]))                  == (0.75, 0.75)

def test_render_heatmap(tmp_path, sim):
    image, sidecar = render_heatmap(tmp_path / "heatmap.png", sim)

    assert image   == tmp_path / "heatmap.png"
    assert sidecar == tmp_path / "heatmap.scale.json"

    assert image.read_bytes().startswith(b"\x89PNG\r\n\x1a\n")

    assert json.loads(sidecar.read_text(encoding="utf-8")) == dict(
        colormap = "viridis",
        vmin     = 0.125,
        vmax     = 0.5,
    )

def test_render_deterministic(tmp_path, sim):
    first,  _ = render_heatmap(tmp_path / "first.png",  sim, title="Heatmap")
    second, _ = render_heatmap(tmp_path / "second.png", sim, title="Heatmap")

    assert first.read_bytes() == second.read_bytes()

    series = {"DOCS": ([0, 1, 2], [0.5, 0.25, 0.125])}

    first  = render_profiles(tmp_path / "first_profile.png",  series, title="Profile", xlabel="d", ylabel="mean")
    second = render_profiles(tmp_path / "second_profile.png", series, title="Profile", xlabel="d", ylabel="mean")

    assert first.read_bytes() == second.read_bytes()
