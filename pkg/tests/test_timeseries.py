"""Column-table container: validation, slicing, and lossless file round trips."""

import json

import numpy as np
import pytest

from photonbundles.timeseries import TimeSeries


def make_series():
    t = np.linspace(0.0, 1.0, 5)
    return TimeSeries(
        t,
        {"a": np.array([1.0, 2.0, np.nan, 4.0, 5.0]), "b": t**2},
        metadata={"note": "fixture"},
    )


def test_column_shape_validation():
    with pytest.raises(ValueError):
        TimeSeries(np.arange(4.0), {"a": np.arange(3.0)})


def test_column_access_and_len():
    s = make_series()
    assert len(s) == 5
    assert np.allclose(s.column("b"), s.axis**2)
    with pytest.raises(KeyError):
        s.column("missing")


def test_slice_keeps_boundary_points():
    s = make_series()
    cut = s.slice(0.25, 0.75)
    assert cut.axis[0] == 0.25
    assert cut.axis[-1] == 0.75
    assert len(cut) == 3
    assert cut.axis_name == s.axis_name


def test_csv_round_trip_is_exact(tmp_path):
    s = make_series()
    path = tmp_path / "series.csv"
    s.to_csv(path, provenance={"seed": 7})
    back = TimeSeries.from_csv(path)
    assert np.array_equal(back.axis, s.axis)
    for name in s.columns:
        np.testing.assert_array_equal(back.column(name), s.column(name))


def test_csv_format_details(tmp_path):
    s = make_series()
    path = tmp_path / "series.csv"
    s.to_csv(path, provenance={"seed": 7})
    raw = path.read_bytes().decode()
    lines = raw.split("\r\n")
    head = lines[0].split("\n")
    # provenance comment first, then the header row
    assert head[0].startswith("# provenance: ")
    assert json.loads(head[0].removeprefix("# provenance: ")) == {"seed": 7}
    assert head[1] == "t,a,b"
    # masked point serialized as an empty cell, not as "nan"
    assert lines[3].split(",")[1] == ""


def test_csv_rereading_masked_points(tmp_path):
    s = make_series()
    path = tmp_path / "series.csv"
    s.to_csv(path)
    back = TimeSeries.from_csv(path)
    assert np.isnan(back.column("a")[2])
    assert not np.any(np.isnan(back.column("b")))


def test_json_payload(tmp_path):
    s = make_series()
    path = tmp_path / "series.json"
    s.to_json(path, provenance={"run": "x"})
    payload = json.loads(path.read_text())
    assert payload["axis_name"] == "t"
    assert payload["provenance"] == {"run": "x"}
    assert payload["metadata"] == {"note": "fixture"}
    assert len(payload["columns"]["a"]) == 5


def test_writes_are_deterministic(tmp_path):
    s = make_series()
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    s.to_csv(p1, provenance={"seed": 1})
    s.to_csv(p2, provenance={"seed": 1})
    assert p1.read_bytes() == p2.read_bytes()
