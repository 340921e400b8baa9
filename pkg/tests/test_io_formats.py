"""Output formats: round-trip floats, canonical JSON, PGM structure."""

import json
import math

import numpy as np
import pytest

from cuspmap.io_formats import csv_text, fmt17, json_text, pgm_bytes


@pytest.mark.parametrize(
    "value",
    [0.1, 1.0 / 3.0, 1e-300, 5e-324, 1.7976931348623157e308, -0.0, 2.0**-52,
     math.pi, 123456789.123456789],
)
def test_fmt17_round_trips(value):
    assert float(fmt17(value)) == value


def test_fmt17_specials():
    assert fmt17(math.inf) == "inf"
    assert fmt17(-math.inf) == "-inf"
    assert fmt17(math.nan) == "nan"


def test_csv_shape_and_determinism():
    text = csv_text(["a", "b"], [(1, 0.1), (2, 0.2)])
    lines = text.split("\n")
    assert lines[0] == "a,b"
    assert text == csv_text(["a", "b"], [(1, 0.1), (2, 0.2)])
    assert text.endswith("\n") and "\r" not in text
    assert float(lines[1].split(",")[1]) == 0.1


def test_json_is_canonical_and_parseable():
    obj = {"b": [1.5, 2, None, True], "a": {"nested": 0.1}, "s": 'quote"backslash\\'}
    text = json_text(obj)
    assert text == json_text(obj)
    parsed = json.loads(text)
    assert parsed["a"]["nested"] == 0.1
    assert parsed["s"] == 'quote"backslash\\'
    assert text.index('"a"') < text.index('"b"')  # sorted keys


def test_json_nonfinite_encoded_as_strings():
    parsed = json.loads(json_text({"v": math.inf, "w": -math.inf}))
    assert parsed["v"] == "inf" and parsed["w"] == "-inf"


def test_pgm_layout():
    data = np.linspace(0.0, 1.0, 12).reshape(3, 4)
    blob = pgm_bytes(data)
    assert blob.startswith(b"P5\n4 3\n255\n")
    pixels = blob.split(b"255\n", 1)[1]
    assert len(pixels) == 12
    assert pixels[0] == 0 and pixels[-1] == 255
    assert pgm_bytes(data) == blob
