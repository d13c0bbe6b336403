import numpy as np
import pytest

from quadstab import io as qio
from quadstab.core import QuadraticModel, random_symmetric
from quadstab.errors import InvalidArgument, InvalidModel


@pytest.mark.parametrize("fmt", ["json", "csv"])
def test_model_round_trip_is_byte_identical(fmt, rng, tmp_path):
    m = QuadraticModel.from_matrix(random_symmetric(3, rng))
    text = qio.dumps_model(m, fmt)
    back = qio.loads_model(text)
    np.testing.assert_array_equal(back.V, m.V)
    assert qio.dumps_model(back, fmt) == text
    path = tmp_path / f"m.{fmt}"
    qio.write_model(m, path)
    assert path.read_text() == text
    assert qio.read_model(path).n_modes == 3


def test_csv_layout():
    text = qio.dumps_model(QuadraticModel(1, np.eye(2)), "csv")
    assert text == "# quadstab V n_modes=1\n1.0,0.0\n0.0,1.0\n"


@pytest.mark.parametrize("text", [
    "",
    "{not json",
    '{"V": [[1, 0], [0, 1]]}',
    '{"n_modes": 2, "V": [[1, 0], [0, 1]]}',
    '{"n_modes": true, "V": [[1, 0], [0, 1]]}',
    '{"n_modes": 1, "V": [["a", 0], [0, 1]]}',
    '{"n_modes": 1, "V": [[1, 2], [0, 1]]}',
    "1,0\n0,1\n",
    "# quadstab V n_modes=1\n1,x\n0,1\n",
    "# quadstab V n_modes=2\n1,0\n0,1\n",
])
def test_malformed_models(text):
    with pytest.raises(InvalidModel):
        qio.loads_model(text)


def test_missing_file_and_bad_format(tmp_path):
    with pytest.raises(InvalidArgument):
        qio.read_model(tmp_path / "absent.json")
    with pytest.raises(InvalidArgument):
        qio.dumps_model(QuadraticModel(1, np.eye(2)), "yaml")


def test_fmt():
    assert qio.fmt(1 / 3) == "0.333333333333"
    assert qio.fmt(True) == "true"
    assert qio.fmt(np.int64(7)) == "7"
    assert qio.fmt(float("nan")) == "nan"
    assert qio.fmt(-float("inf")) == "-inf"
    assert qio.fmt("e") == "e"


def test_json_rounding():
    out = qio.dumps_json({"b": 1 / 3, "a": [np.float64(2 / 3), complex(1, 2)], "c": np.array([1.0])})
    assert out == '{\n  "a": [\n    0.666666666667,\n    [\n      1.0,\n      2.0\n    ]\n  ],\n  "b": 0.333333333333,\n  "c": [\n    1.0\n  ]\n}\n'


def test_csv_table():
    assert qio.dumps_csv(["x", "ok"], [[0.1, True], [2, False]]) == "x,ok\n0.1,true\n2,false\n"
