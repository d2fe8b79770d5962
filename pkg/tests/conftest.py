import gtimer as gt
import numpy as np
import pytest

from dpq_infer.algos.blue import EstimatorWeights, fit
from dpq_infer.data.cube import CountCube, LinearQuery
from dpq_infer.data.history import QueryHistory
from dpq_infer.utils.logging import logger

EXAMPLE_H = np.array([
    [1, 1, 0, 0],
    [0, 0, 1, 1],
    [0, 0, 0, 1],
    [0, 0, 1, 0],
    [0, 1, 0, 1],
    [2, 1, 0, 0],
    [0, 0, 2, -1],
    [0, -1, 0, 1],
], dtype=np.float64)
EXAMPLE_ALPHA = [0.05, 0.1, 0.05, 0.1, 0.1, 0.05, 0.05, 0.1]
EXAMPLE_S = [1, 1, 1, 1, 1, 2, 2, 1]
EXAMPLE_X = [10, 20, 20, 10]
EXAMPLE_Y = [30.8, 30.3, 46.9, 20.2, 30.4, 68.9, 38.9, 9.5]
EXAMPLE_Q = [1, 0, 1, 0]
EXAMPLE_A = [0.48, 0.36, -0.03, 0.50, -0.50, 0.26, 0.07, 0.24]


@pytest.fixture
def example_history():
    return QueryHistory(EXAMPLE_H, EXAMPLE_Y, EXAMPLE_ALPHA)


@pytest.fixture
def example_cube():
    return CountCube(EXAMPLE_X)


@pytest.fixture
def example_query():
    return LinearQuery(EXAMPLE_Q)


@pytest.fixture
def example_weights(example_history, example_query):
    return fit(example_history, example_query)


@pytest.fixture
def single_row():
    """One Laplace row with unit rate and unit weight."""
    history = QueryHistory([[1.0]], [0.0], [1.0])
    weights = EstimatorWeights(np.array([1.0]), LinearQuery([1.0]), None, None)
    return history, weights


@pytest.fixture(autouse=True)
def quiet_logger():
    logger.set_log_tabular_only(True)
    yield
    logger.reset()


def brute_force_noise(weights, history, size=10 ** 6, seed=12345):
    """Draws A.N directly with numpy's Laplace sampler."""
    rng = np.random.default_rng(seed)
    scales = history.sensitivity / history.alpha
    total = np.zeros(size)
    for coef, scale in zip(weights.weights, scales):
        total += coef * rng.laplace(0.0, scale, size)
    return total


@pytest.fixture
def sample_noise():
    return brute_force_noise


def wall_time(fn, repeats=1):
    """Median gtimer wall time of `fn()` over `repeats` calls."""
    times = []
    for _ in range(repeats):
        gt.stamp('test setup', unique=False)
        fn()
        before = gt.get_times().stamps.cum.get('test call', 0.0)
        gt.stamp('test call', unique=False)
        times.append(gt.get_times().stamps.cum['test call'] - before)
    return float(np.median(times))


def within_fit(x, times, degree, factor=1.5):
    """True when every time lies within `factor` of a least-squares polynomial fit."""
    fitted = np.polyval(np.polyfit(x, times, degree), x)
    ratio = np.asarray(times) / fitted
    return bool(np.all(fitted > 0) and np.all(ratio <= factor) and np.all(ratio >= 1 / factor))
