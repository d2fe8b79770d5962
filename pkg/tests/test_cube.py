import io

import numpy as np
import pytest

from dpq_infer.data.cube import (
    CountCube, LinearQuery, UtilityRequirement, load_cube, load_query, query_from_dict,
    sensitivity_of, true_answer,
)
from dpq_infer.exceptions import (
    ContractError, DegenerateQueryError, ParseError, ShapeError,
)


def test_sensitivity_examples(example_history):
    assert sensitivity_of(LinearQuery([1, 1, 0, 0])) == 1
    assert sensitivity_of(LinearQuery([0, -1, 0, 1])) == 1
    assert sensitivity_of(LinearQuery([0, 0, 2, -1])) == 2
    assert list(example_history.sensitivity) == [1, 1, 1, 1, 1, 2, 2, 1]


def test_degenerate_query():
    with pytest.raises(DegenerateQueryError):
        sensitivity_of(LinearQuery([0, 0, 0]))


def test_true_answer(example_cube, example_query):
    assert true_answer(example_cube, example_query) == 30
    with pytest.raises(ShapeError):
        true_answer(example_cube, LinearQuery([1, 1]))


def test_cube_rejects_negative_and_fractional():
    with pytest.raises(ContractError):
        CountCube([1, -1])
    with pytest.raises(ContractError):
        CountCube([1.5, 2])


def test_cube_is_read_only(example_cube):
    with pytest.raises(ValueError):
        example_cube.counts[0] = 5


def test_load_cube():
    cube = load_cube(io.StringIO("10\n20\n20\n10\n\n"))
    assert list(cube.counts) == [10, 20, 20, 10]


@pytest.mark.parametrize("text,lineno", [
    ("10\n\n20\n", 2),
    ("10\nabc\n", 2),
    ("-3\n", 1),
])
def test_load_cube_errors(text, lineno):
    with pytest.raises(ParseError) as e:
        load_cube(io.StringIO(text))
    assert e.value.lineno == lineno


def test_load_cube_empty():
    with pytest.raises(ParseError):
        load_cube(io.StringIO(""))


def test_load_query_with_requirement():
    query, requirement = load_query(io.StringIO(
        '{"coefficients": [1, 0, 1, 0], "epsilon": 5, "delta": 0.1}'))
    assert np.array_equal(query.coefficients, [1, 0, 1, 0])
    assert requirement.epsilon == 5
    assert requirement.confidence == pytest.approx(0.9)


def test_query_sparse_coefficients():
    query, requirement = query_from_dict({"coefficients": {"1": 2, "3": -1}}, n=4)
    assert np.array_equal(query.coefficients, [0, 2, 0, -1])
    assert requirement is None


def test_query_rejects_constant():
    with pytest.raises(ParseError):
        query_from_dict({"coefficients": [1, 0], "constant": 3})


def test_query_requires_utility():
    with pytest.raises(ParseError):
        query_from_dict({"coefficients": [1, 0]}, require_utility=True)


def test_query_all_zero_rejected_by_loader():
    with pytest.raises(ParseError):
        query_from_dict({"coefficients": [0, 0]})


def test_utility_requirement_validation():
    with pytest.raises(ContractError):
        UtilityRequirement(0, 0.1)
    with pytest.raises(ContractError):
        UtilityRequirement(1, 1.0)


@pytest.mark.parametrize("scale", [3.0, -2.5, 0.1])
def test_sensitivity_scales_with_query(scale):
    query = LinearQuery([0, 2, -1, 0.5])
    assert sensitivity_of(scale * query) == pytest.approx(abs(scale) * sensitivity_of(query))
    assert sensitivity_of(query * scale) == sensitivity_of(scale * query)


def test_true_answer_is_linear(example_cube):
    q1 = LinearQuery([1, 0, 1, 0])
    q2 = LinearQuery([0, -1, 0, 2])
    combined = 2 * q1 + q2 * -3
    assert true_answer(example_cube, combined) == pytest.approx(
        2 * true_answer(example_cube, q1) - 3 * true_answer(example_cube, q2))
    with pytest.raises(ShapeError):
        q1 + LinearQuery([1, 0])


def test_load_cube_invalid_utf8(tmp_path):
    path = tmp_path / "cube.txt"
    path.write_bytes(b"10\n20\n\xff\xfe\n")
    with pytest.raises(ParseError) as e:
        load_cube(str(path))
    assert e.value.lineno == 3
    assert e.value.path == str(path)


def test_load_query_invalid_utf8():
    with pytest.raises(ParseError) as e:
        load_query(io.BytesIO(b'{"coefficients": [1, 0]}\n\xc3'))
    assert e.value.lineno == 2
