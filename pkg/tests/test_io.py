import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from bornlab.csm import ContextMap, standard_context
from bornlab.io import (
    FormatError,
    context_from_json,
    context_map_from_json,
    context_map_to_json,
    context_to_json,
    dumps,
    matrix_from_csv,
    matrix_from_json,
    matrix_to_csv,
    matrix_to_json,
)

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)
shapes = st.tuples(st.integers(1, 5), st.integers(1, 5))


@given(a=arrays(np.float64, shapes, elements=finite))
def test_real_matrix_round_trip_is_bit_exact(a):
    back = matrix_from_json(json.loads(dumps(matrix_to_json(a))))
    assert back.dtype == np.float64
    np.testing.assert_array_equal(back, a)


@given(a=arrays(np.complex128, shapes, elements=st.complex_numbers(allow_nan=False, allow_infinity=False)))
def test_complex_matrix_round_trip_is_bit_exact(a):
    back = matrix_from_json(json.loads(dumps(matrix_to_json(a))))
    assert back.dtype == np.complex128
    np.testing.assert_array_equal(back, a)


def test_mixed_entries_parse_as_complex():
    m = matrix_from_json({"rows": 1, "cols": 2, "data": [[1, [0.0, 2.0]]]})
    np.testing.assert_array_equal(m, [[1, 2j]])


@pytest.mark.parametrize(
    "doc",
    [
        [],
        {"rows": 1, "cols": 1},
        {"rows": 0, "cols": 1, "data": []},
        {"rows": 2, "cols": 1, "data": [[1]]},
        {"rows": 1, "cols": 2, "data": [[1]]},
        {"rows": 1, "cols": 1, "data": [["x"]]},
        {"rows": 1, "cols": 1, "data": [[True]]},
        {"rows": 1, "cols": 1, "data": [[[1, 2, 3]]]},
        {"rows": 1, "cols": 1, "data": [[1e400]]},
    ],
)
def test_bad_matrix_documents(doc):
    with pytest.raises(FormatError):
        matrix_from_json(doc)


def test_non_finite_values_are_not_serialised():
    with pytest.raises(ValueError):
        matrix_to_json(np.array([[np.nan]]))


@given(a=arrays(np.float64, shapes, elements=finite))
def test_csv_round_trip_is_bit_exact(a):
    np.testing.assert_array_equal(matrix_from_csv(matrix_to_csv(a)), a)


def test_csv_uses_seventeen_significant_digits():
    assert matrix_to_csv([[0.1, 1.0]]) == "0.10000000000000001,1\n"
    with pytest.raises(FormatError):
        matrix_from_csv("1,a\n")


def test_context_and_map_round_trip():
    c = standard_context(3, label="z")
    back = context_from_json(json.loads(dumps(context_to_json(c))))
    assert back.label == "z" and len(back) == 3
    with pytest.raises(FormatError):
        context_from_json({"dim": 2, "label": "z", "projectors": context_to_json(c)["projectors"]})
    h = ContextMap(np.array([[1, 1], [1, -1]]) / np.sqrt(2), "a", "b")
    hb = context_map_from_json(json.loads(dumps(context_map_to_json(h))))
    np.testing.assert_array_equal(hb.unitary, h.unitary)
    assert (hb.source, hb.target) == ("a", "b")
    with pytest.raises(FormatError):
        context_map_from_json({"source": "a"})
