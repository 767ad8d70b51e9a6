"""File formats and the command-line driver."""
import json
import math

import numpy as np
import pytest

import ultratree.io as tio
from ultratree import cli
from ultratree.instances import random_ultrametric, x4
from ultratree.metric import from_entries, validate
from ultratree.represent import build
from ultratree.trees import CapExceededError, node, stalk_node


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return str(p)


def _x4_csv(tmp_path):
    return _write(tmp_path, "x4.csv", tio.format_matrix_csv(x4()))


NOT_ULTRA = [[0.0, 2.0, 1.0], [2.0, 0.0, 1.0], [1.0, 1.0, 0.0]]


# -------------------------------------------------------------------- csv

def test_csv_round_trip_is_exact():
    for seed in range(12):
        for kind in ("dyadic", "uniform"):
            m = random_ultrametric(7, 3, seed, radii_kind=kind)
            back = tio.parse_matrix_csv(tio.format_matrix_csv(m))
            assert back.labels == m.labels
            assert np.array_equal(back.d, m.d)


def test_csv_dyadic_literal_parses_exactly():
    text = "a,b\n0,3/2^2\n3/2^2,0\n"
    m = tio.parse_matrix_csv(text)
    assert m.d[0][1] == 0.75
    text = "a,b\n0, 7 / 2^52 \n7/2^52,0\n"
    m = tio.parse_matrix_csv(text)
    assert m.d[0][1] == math.ldexp(7.0, -52)


def test_csv_dyadic_literal_anchors_nearby_decimals():
    text = ("a,b,c\n"
            "0,3/2^2,0.7500000000000001\n"
            "3/2^2,0,1/2^0\n"
            "0.7500000000000001,1/2^0,0\n")
    m = tio.parse_matrix_csv(text)
    assert m.d[0][1] == 0.75
    assert m.d[0][2] == 0.75


def test_csv_two_close_anchors_stay_distinct():
    big = "1099511627776/2^40"      # 1.0
    bigger = "1099511627777/2^40"   # 1.0 + 2^-40
    text = ("a,b,c\n"
            "0,%s,%s\n"
            "%s,0,%s\n"
            "%s,%s,0\n") % (big, bigger, big, bigger, bigger, bigger)
    m = tio.parse_matrix_csv(text)
    assert m.d[0][1] == 1.0
    assert m.d[0][2] == 1.0 + math.ldexp(1.0, -40)
    assert m.d[0][1] != m.d[0][2]


def test_csv_parse_error_location():
    with pytest.raises(tio.ParseError) as e:
        tio.parse_matrix_csv("a,b\n0,xyz\n0.5,0\n")
    assert e.value.line == 2 and e.value.column == 2
    assert "line 2, cell 2" in str(e.value)


def test_csv_shape_errors():
    with pytest.raises(tio.ParseError):
        tio.parse_matrix_csv("")
    with pytest.raises(tio.ParseError) as e:
        tio.parse_matrix_csv("a,b\n0,1\n")
    assert "data rows" in str(e.value)
    with pytest.raises(tio.ParseError) as e:
        tio.parse_matrix_csv("a,b\n0,1,2\n1,0\n")
    assert "cells" in str(e.value)


# ------------------------------------------------------------------- json

def test_matrix_json_round_trip():
    m = x4()
    back = tio.parse_matrix_json(tio.dumps(tio.matrix_to_json_dict(m)))
    assert back.labels == m.labels
    assert np.array_equal(back.d, m.d)


def test_matrix_json_rejects_unknown_and_bad_version():
    doc = tio.matrix_to_json_dict(x4())
    doc["surprise"] = 1
    with pytest.raises(tio.ParseError) as e:
        tio.matrix_from_json_dict(doc)
    assert "surprise" in str(e.value)
    with pytest.raises(tio.ParseError):
        tio.matrix_from_json_dict({"schema_version": 2, "d": [[0.0]]})
    with pytest.raises(tio.ParseError):
        tio.matrix_from_json_dict({"schema_version": 1})
    with pytest.raises(tio.ParseError):
        tio.parse_matrix_json("{not json")


def test_load_matrix_dispatches_on_extension(tmp_path):
    m = x4()
    p_csv = _write(tmp_path, "m.csv", tio.format_matrix_csv(m))
    p_json = _write(tmp_path, "m.json", tio.dumps(tio.matrix_to_json_dict(m)))
    for p in (p_csv, p_json):
        back = tio.load_matrix(p)
        assert back.labels == m.labels
        assert np.array_equal(back.d, m.d)


def test_tree_json_round_trip():
    rt, _ = build(x4())
    doc = tio.tree_to_json_dict(rt.tree)
    assert doc["schema_version"] == 1
    back = tio.tree_from_json_dict(json.loads(tio.dumps(doc)))
    assert back == rt.tree


def test_tree_json_label_types():
    t_mixed = node({0: stalk_node(), "a": stalk_node(), -3: stalk_node()})
    from ultratree.trees import ExplicitTree
    t = ExplicitTree(root=t_mixed)
    back = tio.tree_from_json_dict(tio.tree_to_json_dict(t))
    assert back == t
    assert {lbl for lbl, _ in back.root.children} == {0, "a", -3}


def test_tree_json_rejects_unknown_node_field():
    with pytest.raises(tio.ParseError):
        tio.tree_from_json_dict(
            {"schema_version": 1,
             "node": {"children": {}, "stalk": True, "color": "red"}})
    with pytest.raises(tio.ParseError):
        tio.tree_from_json_dict({"schema_version": 1})


def test_representing_tree_json():
    rt, _ = build(x4())
    doc = tio.representing_tree_to_json_dict(rt)
    assert doc["schema_version"] == 1
    assert doc["labels"] == ["a", "b", "c", "d"]
    assert doc["schedule"] == rt.schedule.to_json_dict()
    root = doc["node"]
    assert root["members"] == ["a", "b", "c", "d"]
    assert set(root["children"]) == {"0", "3"}
    assert root["children"]["3"]["members"] == ["d"]
    assert root["children"]["3"]["stalk"]
    assert root["children"]["0"]["members"] == ["a", "b", "c"]
    assert root["children"]["0"]["children"]["2"]["members"] == ["c"]


def test_validation_report_json():
    ok = tio.validation_report_to_json_dict(validate(x4()))
    assert ok == {"schema_version": 1, "is_metric": True,
                  "is_ultrametric": True, "witness": None}
    rep = validate(from_entries(NOT_ULTRA, snap=False))
    doc = tio.validation_report_to_json_dict(rep)
    assert doc["is_metric"] and not doc["is_ultrametric"]
    assert doc["witness"]["kind"] == rep.witness.kind
    assert doc["witness"]["points"] == list(rep.witness.points)
    assert doc["witness"]["entries"] == list(rep.witness.entries)


def test_dumps_is_canonical():
    text = tio.dumps({"b": 1, "a": [1.5]})
    assert text == '{\n  "a": [\n    1.5\n  ],\n  "b": 1\n}\n'
    assert tio.dumps({"a": 1, "b": 2}) == tio.dumps({"b": 2, "a": 1})


# -------------------------------------------------------------------- cli

def _run(capsys, argv):
    rc = cli.main(argv)
    out = capsys.readouterr()
    return rc, out.out, out.err


def test_cli_generate_is_deterministic(capsys):
    rc1, out1, _ = _run(capsys, ["generate", "6:3", "--seed", "42"])
    rc2, out2, _ = _run(capsys, ["generate", "6:3", "--seed", "42"])
    rc3, out3, _ = _run(capsys, ["generate", "6:3", "--seed", "43"])
    assert rc1 == rc2 == rc3 == 0
    assert out1 == out2
    assert out1 != out3
    doc = json.loads(out1)
    assert len(doc["labels"]) == 6


def test_cli_generate_default_levels_and_bad_input(capsys):
    rc, out, _ = _run(capsys, ["generate", "5", "--seed", "7"])
    assert rc == 0 and len(json.loads(out)["labels"]) == 5
    for bad in ("abc", "6:3:2", "6:-1"):
        rc, _, err = _run(capsys, ["generate", bad])
        assert rc == 2
        assert err.startswith("error:")


def test_cli_out_extension_picks_format(tmp_path, capsys):
    p_csv = tmp_path / "g.csv"
    rc, _, _ = _run(capsys, ["generate", "4:2", "--seed", "1", "--out", str(p_csv)])
    assert rc == 0
    m = tio.load_matrix(str(p_csv))
    p_json = tmp_path / "g.json"
    rc, _, _ = _run(capsys, ["generate", "4:2", "--seed", "1", "--out", str(p_json)])
    assert rc == 0
    m2 = tio.load_matrix(str(p_json))
    assert m2.labels == m.labels
    assert np.array_equal(m2.d, m.d)
    assert p_csv.read_text().splitlines()[0] == ",".join(m.labels)
    assert json.loads(p_json.read_text())["schema_version"] == 1


def test_cli_validate(tmp_path, capsys):
    rc, out, _ = _run(capsys, ["validate", _x4_csv(tmp_path)])
    assert rc == 0
    assert json.loads(out)["is_ultrametric"] is True

    bad = _write(tmp_path, "bad.json",
                 tio.dumps(tio.matrix_to_json_dict(from_entries(NOT_ULTRA, snap=False))))
    rc, out, _ = _run(capsys, ["validate", bad])
    assert rc == 1
    doc = json.loads(out)
    assert doc["is_metric"] and not doc["is_ultrametric"]
    assert doc["witness"]["kind"]


def test_cli_validate_parse_and_io_errors(tmp_path, capsys):
    broken = _write(tmp_path, "broken.csv", "a,b\n0,zzz\n0.5,0\n")
    rc, _, err = _run(capsys, ["validate", broken])
    assert rc == 2 and err.startswith("error:")
    rc, _, err = _run(capsys, ["validate", str(tmp_path / "missing.json")])
    assert rc == 2 and err.startswith("error:")


def test_cli_coerce(tmp_path, capsys):
    m = random_ultrametric(8, 3, 5, radii_kind="uniform")
    p = _write(tmp_path, "u.json", tio.dumps(tio.matrix_to_json_dict(m)))
    rc, out, _ = _run(capsys, ["coerce", p])
    assert rc == 0
    coerced = tio.parse_matrix_json(out)
    for v in coerced.values:
        if v not in (0.0, 1.0):
            mant, _ = math.frexp(v)
            assert mant == 0.5 and v < 1.0

    bad = _write(tmp_path, "bad.json",
                 tio.dumps(tio.matrix_to_json_dict(from_entries(NOT_ULTRA, snap=False))))
    rc, _, err = _run(capsys, ["coerce", bad])
    assert rc == 1 and err.startswith("error:")


def test_cli_tree(tmp_path, capsys):
    rc, out, _ = _run(capsys, ["tree", _x4_csv(tmp_path)])
    assert rc == 0
    doc = json.loads(out)
    assert doc["newick"] == "(((a:0.25,b:0.25):0.25,c:0.5):0.5,d:1);"
    assert doc["isometry"] is True
    assert doc["clade_size"] == 4
    assert doc["node"]["members"] == ["a", "b", "c", "d"]

    bad = _write(tmp_path, "bad.json",
                 tio.dumps(tio.matrix_to_json_dict(from_entries(NOT_ULTRA, snap=False))))
    rc, _, err = _run(capsys, ["tree", bad])
    assert rc == 1
    assert "not ultrametric" in err


def test_cli_analyze(tmp_path, capsys):
    p = _x4_csv(tmp_path)
    rc, out, _ = _run(capsys, ["analyze", p])
    assert rc == 0
    doc = json.loads(out)
    assert doc["schema_version"] == 1
    assert doc["doubling"]["bruteforce"] == {"verdict": 2, "scope": "exact"}
    rc, out, _ = _run(capsys, ["analyze", p, "--cap-n", "3"])
    assert rc == 0
    assert "skipped: n=4 exceeds cap 3" == json.loads(out)["doubling"]["bruteforce"]["note"]
    rc, _, err = _run(capsys, ["analyze", p, "--cap-n", "0"])
    assert rc == 2 and err.startswith("error:")


def test_cli_cap_exit_code(tmp_path, capsys, monkeypatch):
    def boom(m, cap_n, l_max):
        raise CapExceededError("too big")
    monkeypatch.setattr(cli, "analyze", boom)
    rc, _, err = _run(capsys, ["analyze", _x4_csv(tmp_path)])
    assert rc == 3
    assert "too big" in err


def test_cli_vitali(tmp_path, capsys):
    doc = tio.matrix_to_json_dict(x4())
    doc["requests"] = [{"center": "a", "radius": 0.3},
                       {"center": 2, "radius": 0.3},
                       {"center": "d", "radius": 0.3}]
    p = _write(tmp_path, "v.json", tio.dumps(doc))
    rc, out, _ = _run(capsys, ["vitali", p])
    assert rc == 0
    sel = json.loads(out)["selected"]
    assert sel == [{"center": "a", "radius": 0.3},
                   {"center": "c", "radius": 0.3},
                   {"center": "d", "radius": 0.3}]


def test_cli_vitali_rejections(tmp_path, capsys):
    doc = tio.matrix_to_json_dict(x4())
    doc["extra"] = True
    p = _write(tmp_path, "v1.json", tio.dumps(doc))
    rc, _, err = _run(capsys, ["vitali", p])
    assert rc == 2 and "extra" in err

    doc = tio.matrix_to_json_dict(x4())
    doc["requests"] = [{"center": 0, "radius": 0.3, "shape": "round"}]
    p = _write(tmp_path, "v2.json", tio.dumps(doc))
    rc, _, err = _run(capsys, ["vitali", p])
    assert rc == 2 and "shape" in err

    doc = tio.matrix_to_json_dict(from_entries(NOT_ULTRA, snap=False))
    doc["requests"] = []
    p = _write(tmp_path, "v3.json", tio.dumps(doc))
    rc, _, err = _run(capsys, ["vitali", p])
    assert rc == 1 and "not ultrametric" in err


def test_cli_argument_validation(tmp_path, capsys):
    with pytest.raises(SystemExit) as e:
        cli.main(["frobnicate", "x"])
    assert e.value.code == 2
    capsys.readouterr()
    rc, _, err = _run(capsys, ["validate", _x4_csv(tmp_path), "--horizon", "0"])
    assert rc == 2 and err.startswith("error:")
    rc, _, _ = _run(capsys, ["validate", _x4_csv(tmp_path), "--horizon", "8"])
    assert rc == 0
