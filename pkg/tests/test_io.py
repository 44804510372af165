import json

import numpy as np
import pytest

from fracpoisson.errors import DataError
from fracpoisson.fpp import EventSeries, FppParams, simulate_path
from fracpoisson.io import fmt_float, format_series, parse_series, read_metadata, read_series, write_series
from fracpoisson.stable import UniformSource


def test_csv_arrivals():
    s = parse_series("# {\"seed\": 1}\narrival_time\n0.5\n1.5\n\n4\n")
    assert s.origin == "arrival"
    assert np.array_equal(s.arrivals, [0.5, 1.5, 4.0])
    assert np.array_equal(s.interarrivals, [0.5, 1.0, 2.5])


def test_csv_gaps():
    s = parse_series("interarrival\n0.5\n1e-3\n")
    assert s.origin == "interarrival" and np.array_equal(s.interarrivals, [0.5, 1e-3])


def test_jsonl_both_keys():
    a = parse_series('{"t": 1.0}\n{"t": 2.5}\n')
    g = parse_series('{"interarrival": 1.0}\n{"interarrival": 1.5}\n')
    assert np.array_equal(a.interarrivals, g.interarrivals)
    with pytest.raises(DataError):
        parse_series('{"t": 1.0}\n{"interarrival": 1.5}\n')


@pytest.mark.parametrize("text,line", [
    ("arrival_time\n1.0\nabc\n", 3),
    ("arrival_time\n1.0\n3.0\n2.0\n", 4),
    ("# c\ninterarrival\n1.0\n-2\n", 4),
    ('{"t": 1.0}\n{"t": "x"}\n', 2),
    ('{"t": 1.0}\n{t: 2}\n', 2),
    ('{"t": 1.0}\n{"s": 2}\n', 2),
    ("interarrival\n1.0,2.0\n", 2),
    ("time\n1.0\n", 1),
])
def test_errors_carry_line(text, line):
    with pytest.raises(DataError) as exc:
        parse_series(text)
    assert exc.value.line == line
    assert f"line {line}" in str(exc.value)


def test_empty():
    with pytest.raises(DataError):
        parse_series("# only a comment\n\n")


def test_round_trip_exact(tmp_path):
    s = simulate_path(FppParams(0.6, 3.0), UniformSource(7), n=200)
    for fmt, emit in (("csv", "arrival"), ("jsonl", "arrival"), ("csv", "interarrival"), ("jsonl", "interarrival")):
        path = tmp_path / f"x.{fmt}"
        write_series(s, path, fmt=fmt, emit=emit, metadata={"seed": 7})
        back = read_series(path)
        if emit == "interarrival":
            assert np.array_equal(back.interarrivals, s.interarrivals)
        else:
            assert np.array_equal(back.arrivals, s.arrivals)
        assert read_metadata(path.read_text()) == {"seed": 7}


def test_tiny_gaps_refuse_arrivals():
    s = EventSeries([1e6, 1e-12, 1.0])
    with pytest.raises(DataError):
        format_series(s, "csv", "arrival")
    assert "1.0000000000000001e-12" in format_series(s, "csv", "interarrival") or \
        "9.9999999999999998e-13" in format_series(s, "csv", "interarrival")


def test_format_checks():
    s = EventSeries([1.0])
    with pytest.raises(ValueError):
        format_series(s, "xml")
    with pytest.raises(ValueError):
        format_series(s, "csv", emit="both")


def test_fmt_float_round_trips():
    for x in (0.1, 1 / 3, 1e-300, 123456789.123456789):
        assert float(fmt_float(x)) == x


def test_metadata_absent():
    assert read_metadata("arrival_time\n1\n") is None
    assert read_metadata('# {"a": 1}\narrival_time\n') == {"a": 1}
    assert json.loads(format_series(EventSeries([1.0]), "csv", metadata={"k": 2}).splitlines()[0][2:]) == {"k": 2}
