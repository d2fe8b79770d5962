import numpy as np
import pytest
from scipy import stats

from dpq_infer.data.cube import CountCube, LinearQuery, true_answer
from dpq_infer.exceptions import ContractError, ShapeError
from dpq_infer.privacy.mechanism import (
    NoiseSource, answer_history, answer_query, laplace_cdf, sample_laplace,
)

from .conftest import EXAMPLE_ALPHA, EXAMPLE_H


def test_same_key_same_stream():
    a = sample_laplace(1.0, 1.0, NoiseSource(7), size=5)
    b = sample_laplace(1.0, 1.0, NoiseSource(7), size=5)
    assert np.array_equal(a, b)


def test_reset_replays_variates():
    source = NoiseSource(3, stream_id=2)
    first = sample_laplace(0.5, 2.0, source)
    assert sample_laplace(0.5, 2.0, source.reset()) == first


def test_distinct_streams_differ():
    a = sample_laplace(1.0, 1.0, NoiseSource(7, 0), size=100)
    b = sample_laplace(1.0, 1.0, NoiseSource(7, 1), size=100)
    c = sample_laplace(1.0, 1.0, NoiseSource(7).spawn(0), size=100)
    assert not np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_huge_budget_concentrates():
    draws = sample_laplace(1e6, 1.0, NoiseSource(1), size=1000)
    assert np.all(np.abs(draws) < 1e-4)


def test_variance():
    draws = sample_laplace(1.0, 1.0, NoiseSource(11), size=10 ** 5)
    assert np.var(draws) == pytest.approx(2.0, rel=0.05)


@pytest.mark.parametrize("alpha,sensitivity", [(1.0, 1.0), (0.1, 2.0)])
def test_kolmogorov_smirnov(alpha, sensitivity):
    draws = sample_laplace(alpha, sensitivity, NoiseSource(5), size=10 ** 5)
    _, p_value = stats.kstest(draws, lambda z: laplace_cdf(z, alpha, sensitivity))
    assert p_value > 0.01


@pytest.mark.parametrize("alpha,sensitivity", [(0.0, 1.0), (1.0, -1.0)])
def test_invalid_parameters(alpha, sensitivity):
    with pytest.raises(ContractError):
        sample_laplace(alpha, sensitivity, NoiseSource(0))


def test_answer_query_unbiased():
    cube = CountCube([3, 4, 5])
    query = LinearQuery([1, 2, 0])
    source = NoiseSource(9)
    answers = [answer_query(cube, query, 1.0, source) for _ in range(10 ** 5)]
    standard_error = np.sqrt(2.0 * 4.0 / 10 ** 5)
    assert abs(np.mean(answers) - 11.0) < 3 * standard_error


def test_answer_history_example(example_cube):
    queries = [LinearQuery(row) for row in EXAMPLE_H]
    history = answer_history(example_cube, queries, EXAMPLE_ALPHA, NoiseSource(0))
    assert history.m == 8
    assert list(history.sensitivity) == [1, 1, 1, 1, 1, 2, 2, 1]


def test_answer_history_rows_use_own_streams(example_cube):
    queries = [LinearQuery(row) for row in EXAMPLE_H]
    source = NoiseSource(4)
    history = answer_history(example_cube, queries, EXAMPLE_ALPHA, source)
    row = answer_query(example_cube, queries[3], EXAMPLE_ALPHA[3], source.stream(3))
    assert history.y[3] == row


def test_answer_history_vanishing_noise(example_cube):
    queries = [LinearQuery(row) for row in EXAMPLE_H]
    history = answer_history(example_cube, queries, [1e6] * 8, NoiseSource(2))
    truth = [true_answer(example_cube, q) for q in queries]
    assert np.allclose(history.y, truth, atol=1e-3)


def test_answer_history_empty(example_cube):
    history = answer_history(example_cube, [], [], NoiseSource(0))
    assert history.m == 0
    assert history.n == 4


def test_answer_history_length_mismatch(example_cube):
    with pytest.raises(ShapeError):
        answer_history(example_cube, [LinearQuery([1, 0, 0, 0])], [], NoiseSource(0))
