# tests/test_file_utils.py
import json
from enum import Enum

import numpy as np
import pytest

from utils.file_utils import (
    OutputManager, read_key_value_config, records_to_csv, rows_to_csv, to_json, write_text,
)


class Color(Enum):
    RED = "red"


def test_to_json_is_sorted_and_precise():
    text = to_json({"b": 0.1, "a": np.float64(1.0 / 3.0), "c": [np.int64(2), Color.RED]})
    assert text.index('"a"') < text.index('"b"') < text.index('"c"')
    assert "0.33333333333333331" in text
    assert "0.10000000000000001" in text
    assert json.loads(text) == {"a": pytest.approx(1.0 / 3.0), "b": 0.1, "c": [2, "red"]}


def test_to_json_maps_non_finite_to_null():
    data = json.loads(to_json({"x": float("nan"), "y": np.inf, "z": np.array([1.5, np.nan]), "ok": np.bool_(True)}))
    assert data == {"x": None, "y": None, "z": [1.5, None], "ok": True}


def test_records_to_csv_flattens_nested_values():
    text = records_to_csv([{"value": 0.5, "grid": {"n": 3, "lo": [0.0, 1.0]}, "note": None}])
    header, row = text.splitlines()
    assert header == "grid.lo,grid.n,note,value"
    assert row == "0 1,3,,0.5"
    assert records_to_csv([]) == ""


def test_rows_to_csv():
    text = rows_to_csv(("t", "x"), np.array([[0.0, 0.1], [1.0, -2.0]]))
    assert text.splitlines() == ["t,x", "0,0.10000000000000001", "1,-2"]


def test_write_text_to_file_and_stream(tmp_path, capsys):
    target = tmp_path / "nested" / "out.txt"
    write_text("hello\n", str(target))
    assert target.read_text(encoding="utf-8") == "hello\n"
    write_text("to stdout\n")
    assert capsys.readouterr().out == "to stdout\n"


def test_output_manager_paths(tmp_path):
    manager = OutputManager(str(tmp_path / "results"))
    path = manager.get_output_path("run", "csv")
    assert path == tmp_path / "results" / "run.csv"
    assert path.parent.is_dir()
    assert manager.get_output_path("plain") == tmp_path / "results" / "plain"
    with manager.safe_open_file(path) as f:
        f.write("a,b\n")
    assert path.read_text(encoding="utf-8") == "a,b\n"


def test_read_key_value_config(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# комментарий\nconfig = skyrme\n\nb-form = trace  # хвост\ngrid=-2,2,9\n", encoding="utf-8")
    assert read_key_value_config(str(path)) == {"config": "skyrme", "b_form": "trace", "grid": "-2,2,9"}


@pytest.mark.parametrize("content", ["just a line\n", " = 3\n"])
def test_read_key_value_config_errors(tmp_path, content):
    path = tmp_path / "bad.cfg"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(ValueError):
        read_key_value_config(str(path))
