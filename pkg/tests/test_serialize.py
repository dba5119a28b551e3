import csv
import io
import json
import math

import numpy as np
from hypothesis import given, strategies as st

from finsler_iso.serialize import csv_text, dumps, format_float, write_text


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_round_trip(x):
    assert float(format_float(x)) == x


def test_special_values():
    assert format_float(float("nan")) == "null"
    assert format_float(math.inf) == "null"
    assert format_float(2.0) == "2.0"
    assert format_float(0.1) == "0.10000000000000001"


def test_dumps_structure_and_determinism():
    doc = {"b": np.float64(1 / 3), "a": [1, np.int64(2), None, True], "c": np.array([0.5, np.nan])}
    text = dumps(doc)
    assert text == dumps(doc) and text.endswith("\n")
    parsed = json.loads(text)
    assert list(parsed) == ["b", "a", "c"]
    assert parsed["b"] == 1 / 3 and parsed["a"] == [1, 2, None, True] and parsed["c"] == [0.5, None]


def test_csv_text(tmp_path):
    rows = [{"x": 0.1, "flag": False, "z": None}, {"x": 2.0, "flag": True, "z": "s"}]
    text = csv_text(rows)
    assert "\r" not in text
    parsed = list(csv.DictReader(io.StringIO(text)))
    assert parsed[0] == {"x": "0.10000000000000001", "flag": "false", "z": "none"}
    path = write_text(tmp_path / "sub" / "t.csv", text)
    assert path.read_bytes() == text.encode()
