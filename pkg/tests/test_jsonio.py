import json

import numpy as np
import pytest

from qencode import patterns as P
from qencode.jsonio import DocumentError, complex_from_json, parse_pattern, pattern_to_doc, to_jsonable

PATTERNS = [
    P.Sparse([(3, 1.0), (5, 0.5 - 0.25j)]),
    P.Step(5, 2.0),
    P.Square(2, 7, 1j),
    P.Walsh(1, 1.0, -2.0),
    P.Fourier([(1, 1.0, 0.0), (3, 0.5, 0.2)]),
    P.Geometric(0.5 + 0.1j, 2),
    P.Hamming(0.3),
    P.Staircase(-0.5),
    P.Dicke(2, 1.5),
    P.Polynomial([0.0, 4.0, -4.0]),
    P.Sum([(1.0, P.Step(4)), (2j, P.Walsh(0))]),
    P.Partition([P.Sparse([(0, 1.0)]), P.Geometric(0.8, 3)]),
    P.Tensor([(P.Step(2), 4), (P.Hamming(0.5), 4)]),
]


@pytest.mark.parametrize("p", PATTERNS, ids=lambda p: p.name)
def test_roundtrip(p):
    doc = json.loads(json.dumps(pattern_to_doc(p)))
    q = parse_pattern(doc)
    assert np.allclose(P.raw_vector(q, 16), P.raw_vector(p, 16))


def test_complex_forms():
    assert complex_from_json(2, "$") == 2
    assert complex_from_json({"re": 1, "im": -2}, "$") == 1 - 2j
    assert complex_from_json({"im": 3}, "$") == 3j
    for bad in (True, "1", {}, {"re": "x"}, {"re": 1, "phase": 2}, None):
        with pytest.raises(DocumentError):
            complex_from_json(bad, "$")


@pytest.mark.parametrize(
    "doc,path",
    [
        ([], "$"),
        ({}, "$"),
        ({"pattern": "nope"}, "$.pattern"),
        ({"pattern": "step"}, "$"),
        ({"pattern": "step", "k_e": 3, "extra": 1}, "$"),
        ({"pattern": "step", "k_e": 3.5}, "$.k_e"),
        ({"pattern": "step", "k_e": True}, "$.k_e"),
        ({"pattern": "sparse", "entries": [[1]]}, "$.entries[0]"),
        ({"pattern": "sparse", "entries": [[1, "a"]]}, "$.entries[0][1]"),
        ({"pattern": "fourier", "modes": [[1, 1]]}, "$.modes[0]"),
        ({"pattern": "dicke", "k": 1, "c": {"re": 1}}, "$.c"),
        ({"pattern": "sum", "terms": [{"weight": 1}]}, "$.terms[0]"),
        ({"pattern": "sum", "terms": [{"of": {"pattern": "walsh"}}]}, "$.terms[0].of"),
        ({"pattern": "tensor", "parts": [{"of": {"pattern": "step", "k_e": 1}}]}, "$.parts[0]"),
        ({"pattern": "partition", "parts": "x"}, "$.parts"),
    ],
)
def test_errors_name_the_field(doc, path):
    with pytest.raises(DocumentError) as e:
        parse_pattern(doc)
    assert e.value.path == path


def test_case_insensitive_names():
    assert parse_pattern({"pattern": "HAMMING", "r": 0.5}) == P.Hamming(0.5)


def test_to_jsonable():
    out = to_jsonable({"a": np.array([1 + 2j, 3.0]), "b": np.int64(4), "c": np.float32(0.5), "d": np.bool_(True), "p": P.Step(2)})
    assert out == {"a": [{"re": 1.0, "im": 2.0}, 3.0], "b": 4, "c": 0.5, "d": True, "p": {"pattern": "step", "k_e": 2, "c": 1.0}}
    json.dumps(out)
