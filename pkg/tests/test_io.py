import json
import warnings

import numpy as np
import pytest

from mtsolve.instances import pair_tensor, random_m_tensor
from mtsolve.io import FormatError, dumps, format_tensor, parse_tensor, parse_vec, read_tensor, write_tensor


def test_tensor_round_trip(tmp_path, rng):
    A = random_m_tensor(rng, 3, 3, density=0.5)
    p = tmp_path / "a.tns"
    write_tensor(p, A)
    assert read_tensor(p) == A


def test_parse_comments_and_one_based():
    A = parse_tensor("# pair\ntns 4 2 3\n1 1 1 1 1.0\n1 1 1 2 -2  # mixed\n2 2 2 2 1\n")
    assert A == pair_tensor(1)
    assert format_tensor(A).splitlines()[0] == "tns 4 2 3"


@pytest.mark.parametrize(
    "text, where",
    [
        ("", "empty"),
        ("tensor 3 2 1\n1 1 1 1\n", ":1:"),
        ("tns 3 2 2\n1 1 1 1\n", "found 1"),
        ("tns 3 2 1\n1 1 3 1\n", ":2:"),
        ("tns 3 2 1\n1 1 1\n", ":2:"),
        ("tns 3 2 1\n1 1 1 x\n", ":2:"),
        ("tns 3 2 1\n1 1 1 1\n2 2 2 1\n", ":3:"),
        ("tns 3 2 1\n1 1 1 nan\n", ":2:"),
    ],
)
def test_parse_errors(text, where):
    with pytest.raises(FormatError, match=where):
        parse_tensor(text)


def test_duplicates_warn():
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        A = parse_tensor("tns 2 1 2\n1 1 1\n1 1 2\n")
    assert A.values.tolist() == [3.0]
    assert any("duplicate" in str(x.message) for x in w)


def test_parse_vec():
    assert parse_vec("vec 3\n1 2\n3\n").tolist() == [1.0, 2.0, 3.0]
    with pytest.raises(FormatError):
        parse_vec("vec 3\n1 2\n")
    with pytest.raises(FormatError, match=":2:"):
        parse_vec("vec 2\n1 y\n")


def test_dumps_exact_floats():
    x = np.array([1 / 3, 2.0, 1e-300])
    text = dumps({"x": x, "k": np.int64(3), "ok": True, "none": None, "I": [1, 2]})
    back = json.loads(text)
    assert back["x"] == x.tolist()
    assert isinstance(back["x"][1], float)
    assert back["k"] == 3 and back["ok"] is True and back["none"] is None
