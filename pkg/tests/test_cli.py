import json

import pytest

from grushin.cli import main
from grushin.documents import load_document, parse_map
from grushin.errors import DocumentError

from conftest import OMEGA, OMEGA_PRIME

IDENTITY = {"alpha": 1, "kind": "conjugated", "expr": {"node": "real_affine", "a": 1}}
SHIFT = {"alpha": 1, "kind": "conjugated", "expr": {"node": "shift", "re": 1}}
JOUKOVSKI = {"alpha": 1, "kind": "conjugated", "expr": {"node": "joukovski"}}
ENTIRE = {"alpha": 2, "kind": "entire", "a": -8, "b": 1}
BOX = {"rects": [["-2", "1", "-1", "1"]]}
STRIP = {"rects": [[1.2, 3, 0.5, 2.5]]}
CUBIC = {"kind": "graph", "y_coeffs": [0, 0, 0, 1], "t0": -1, "t1": 1}
DIAGONAL = {"kind": "graph", "y_coeffs": [0, 1], "t0": -1, "t1": 1}
OFF_AXIS = {"kind": "segment", "p": [1.5, 0.3], "q": [2.5, 0.3]}


@pytest.fixture
def docs(tmp_path):
    def write(name, doc):
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(doc))
        return str(path)

    return {
        "identity": write("identity", IDENTITY),
        "shift": write("shift", SHIFT),
        "joukovski": write("joukovski", JOUKOVSKI),
        "entire": write("entire", ENTIRE),
        "box": write("box", BOX),
        "strip": write("strip", STRIP),
        "omega": write("omega", {"rects": OMEGA}),
        "omega_prime": write("omega_prime", {"rects": OMEGA_PRIME}),
        "cubic": write("cubic", CUBIC),
        "diagonal": write("diagonal", DIAGONAL),
        "off_axis": write("off_axis", OFF_AXIS),
        "bad_rect": write("bad_rect", {"rects": [[0, 1, 0, 1], [3, 2, 0, 1]]}),
        "bad_affine": write("bad_affine", {"alpha": 1, "kind": "conjugated", "expr": {"node": "real_affine", "a": 0}}),
        "extra": write("extra", {"alpha": 1, "kind": "entire", "a": 2, "colour": "red"}),
        "no_alpha": write("no_alpha", {"kind": "entire", "a": 2}),
        "tmp": str(tmp_path),
    }


CASES = [
    ("eval --map {identity} --point 0.5 0.25", 0),
    ("verify --map {identity} --domain {box} --grid 30", 0),
    ("verify --map {shift} --domain {box} --grid 30", 1),
    ("verify --map {bad_affine} --domain {box}", 2),
    ("verify --map {identity} --domain {omega} --grid 3", 2),
    ("length --alpha 1 --curve {cubic}", 0),
    ("length --alpha 0 --curve {cubic}", 2),
    ("admissible --alpha 1 --curve {cubic}", 0),
    ("admissible --alpha 1 --curve {diagonal}", 1),
    ("push-curve --map {joukovski} --curve {off_axis} --samples 9", 0),
    ("distort --map {joukovski} --curve {off_axis}", 0),
    ("distort --map {identity} --curve {diagonal}", 2),
    ("distance --alpha 1 --p 1 0 --q 3 0 --knots 9", 0),
    ("distance --alpha 1 --p 1 0 --q 3 0 --knots 1", 2),
    ("classify-entire --map {entire}", 0),
    ("classify-entire --map {joukovski}", 1),
    ("axis-components --domain {omega}", 0),
    ("axis-components --domain {bad_rect}", 2),
    ("obstruct --domain {omega} --other {omega_prime}", 1),
    ("obstruct --domain {omega} --other {omega}", 0),
    ("grid --map {identity} --domain {box} --resolution 4 --out {tmp}/g.csv", 0),
    ("grid --map {identity} --domain {box} --resolution 0", 2),
    ("grid --map {identity} --domain {box} --out {tmp}/missing/g.csv", 2),
    ("verify --map {tmp}/nope.json --domain {box}", 2),
    ("verify --map {extra} --domain {box}", 2),
]


def run(argv):
    try:
        return main(argv)
    except SystemExit as exc:
        return exc.code


@pytest.mark.parametrize("template,code", CASES)
def test_exit_code_contract(docs, template, code, capsys):
    assert run(template.format(**docs).split()) == code


def test_obstruct_prints_certificate(docs, capsys):
    run(["obstruct", "--domain", docs["omega"], "--other", docs["omega_prime"]])
    out = json.loads(capsys.readouterr().out)
    assert out["obstructed"] and out["certificate"]["right"] == [2, 2, 1, 1]


def test_distance_reports_bounds(docs, capsys):
    run(["distance", "--alpha", "2", "--p", "1", "0", "--q", "3", "0", "--knots", "9"])
    out = json.loads(capsys.readouterr().out)
    assert out["lower_bound"] == 2.0
    assert 2.0 <= out["distance_upper"] <= 2.02


def test_reports_are_byte_identical(docs, capsys):
    argv = ["distance", "--alpha", "1", "--p", "1", "0", "--q", "2", "1", "--knots", "5", "--iterations", "50", "--seed", "3"]
    run(argv)
    first = capsys.readouterr().out
    run(argv)
    assert capsys.readouterr().out == first


def test_output_directory_variable(docs, tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("GRUSHIN_OUTPUT_DIR", str(tmp_path))
    assert run(["--report", "r.json", "grid", "--map", docs["identity"], "--domain", docs["box"], "--resolution", "4"]) == 0
    assert (tmp_path / "grid.csv").exists()
    assert json.loads((tmp_path / "r.json").read_text())["rows"] == 16


@pytest.mark.parametrize(
    "name,field",
    [("bad_rect", "$.rects[1]"), ("bad_affine", "$.expr.a"), ("extra", "$.colour"), ("no_alpha", "$.alpha")],
)
def test_document_errors_name_the_field(docs, name, field):
    kind = "domain" if name == "bad_rect" else "map"
    with pytest.raises(DocumentError) as info:
        load_document(docs[name], kind)
    assert info.value.path == field


def test_malformed_json_reports_line(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text('{"rects":\n  [[0, 1, 0, 1],]\n}')
    with pytest.raises(DocumentError) as info:
        load_document(str(p), "domain")
    assert ":2:" in info.value.path


def test_map_documents_round_trip():
    from grushin import ConjugatedMap, Joukovski, RealAffine, compose

    m = ConjugatedMap(0.5, compose(Joukovski(), RealAffine(2.0, 1.0)))
    again = parse_map(m.to_dict())
    assert again.evaluate(1.3, 0.2) == m.evaluate(1.3, 0.2)


def test_text_format(docs, capsys):
    assert run(["--format", "text", "classify-entire", "--map", docs["entire"]]) == 0
    assert "a: -8.0" in capsys.readouterr().out
