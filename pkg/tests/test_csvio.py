import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from cqed_stirap.csvio import format_number, read_csv, write_csv


def test_format_examples():
    assert format_number(0.1) == "0.1"
    assert format_number(-30.0) == "-30.0"
    assert format_number(1e-20) == "0.00000000000000000001"
    assert format_number(True) == "true"
    assert format_number(np.int64(7)) == "7"
    assert format_number(float("nan")) == "nan"
    assert format_number(-np.inf) == "-inf"
    assert "e" not in format_number(1.2345e300)


@settings(max_examples=300, deadline=None)
@given(st.floats(allow_nan=False, allow_infinity=False))
def test_format_round_trip(x):
    assert float(format_number(x)) == x


def test_file_round_trip(tmp_path):
    rng = np.random.default_rng(7)
    values = rng.normal(size=(20, 3)) * 10.0 ** rng.integers(-12, 12, size=(20, 3))
    path = tmp_path / "x.csv"
    write_csv(path, ["a", "b", "c"], values)
    raw = path.read_bytes()
    assert b"\r" not in raw and raw.endswith(b"\n")
    header, rows = read_csv(path)
    assert header == ["a", "b", "c"]
    assert np.array_equal(np.array(rows), values)
    # 17 significant digits survive the trip as well
    for x in values.ravel():
        assert float(f"{float(format_number(x)):.17g}") == x


def test_mixed_rows(tmp_path):
    path = tmp_path / "m.csv"
    write_csv(path, ["key", "value"], [("x", 1.5), ("flag", False)])
    _, rows = read_csv(path)
    assert rows == [["x", 1.5], ["flag", "false"]]
