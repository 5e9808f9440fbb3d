import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from trusstube.cell import build_cell, solve_closure
from trusstube.export import fmt, read_csv, read_obj, write_csv, write_manifest, write_obj
from trusstube.uniform import compatible_rotations, generate_uniform_mesh


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_fmt_round_trips_doubles(x):
    assert float(fmt(x)) == x


def test_fmt_special_values():
    assert (fmt(math.inf), fmt(-math.inf), fmt(math.nan), fmt(np.int64(7))) == ("inf", "-inf", "nan", "7")


def test_obj_round_trip(tmp_path):
    f = compatible_rotations(build_cell(1.0, solve_closure(1.3)), 0.2)
    mesh = generate_uniform_mesh(f, 3, 2)
    write_obj(tmp_path / "m.obj", mesh, comment="test")
    back = read_obj(tmp_path / "m.obj")
    assert np.array_equal(back.nodes, mesh.nodes)
    assert np.array_equal(back.bars, mesh.bars)
    assert np.array_equal(back.facets, mesh.facets)
    text = (tmp_path / "m.obj").read_text()
    assert text.startswith("# test\nv ")
    assert sum(line.startswith("l ") for line in text.splitlines()) == len(mesh.bars)


def test_csv_round_trip(tmp_path):
    cols = {"a": np.array([0.1, 1 / 3, math.inf]), "b": np.array([1, 2, 3])}
    write_csv(tmp_path / "t.csv", cols)
    back = read_csv(tmp_path / "t.csv")
    assert np.array_equal(back["a"], cols["a"])
    assert np.array_equal(back["b"], cols["b"])
    with pytest.raises(ValueError):
        write_csv(tmp_path / "bad.csv", {"a": [1, 2], "b": [1]})


def test_manifest_is_sorted_json(tmp_path):
    write_manifest(tmp_path / "m.json", {"z": math.inf, "a": np.float64(1.5), "arr": np.arange(2)})
    data = json.loads((tmp_path / "m.json").read_text())
    assert list(data) == sorted(data)
    assert data["a"] == 1.5 and data["arr"] == [0, 1]
