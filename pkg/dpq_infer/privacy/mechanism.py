"""
Laplace mechanism over linear counting queries.

A released answer is Q.x + N(alpha/S): Laplace noise with rate alpha/S,
i.e. scale S/alpha, where S is the query's sensitivity.
"""
import numpy as np

from dpq_infer.data.cube import sensitivity_of, true_answer
from dpq_infer.data.history import QueryHistory
from dpq_infer.exceptions import ContractError, ShapeError


class NoiseSource(object):
    """
    Reproducible random stream keyed by (master_seed, stream_id, path).

    Equal keys give identical variate sequences; distinct keys give
    statistically independent ones (numpy SeedSequence spawn keys).
    A source is stateful and must not be shared across concurrent tasks.
    """

    def __init__(self, master_seed, stream_id=0, path=()):
        if stream_id < 0:
            raise ContractError("stream_id must be nonnegative, got {}".format(stream_id))
        self.master_seed = int(master_seed) & 0xFFFFFFFFFFFFFFFF
        self.stream_id = int(stream_id)
        self.path = tuple(int(p) for p in path)
        self._generator = None

    @property
    def key(self):
        return (self.stream_id,) + self.path

    @property
    def generator(self):
        if self._generator is None:
            seq = np.random.SeedSequence(self.master_seed, spawn_key=self.key)
            self._generator = np.random.Generator(np.random.PCG64(seq))
        return self._generator

    def reset(self):
        self._generator = None
        return self

    def stream(self, stream_id):
        """Sibling source with the same path and another stream id."""
        return NoiseSource(self.master_seed, stream_id, self.path)

    def spawn(self, key):
        """Child source nested under this one."""
        return NoiseSource(self.master_seed, self.stream_id, self.path + (key,))

    def uniform(self, size=None):
        return self.generator.random(size)

    def __repr__(self):
        return "NoiseSource(master_seed={}, stream_id={}, path={})".format(
            self.master_seed, self.stream_id, self.path)


def laplace_from_uniform(u, scale):
    """Inverse Laplace CDF applied to u in [0, 1)."""
    u = np.asarray(u, dtype=np.float64) - 0.5
    # u == -0.5 has probability 2**-53; clamp it onto the open interval
    u = np.maximum(u, np.nextafter(-0.5, 0.0))
    return -scale * np.sign(u) * np.log1p(-2.0 * np.abs(u))


def laplace_cdf(z, alpha, sensitivity=1.0):
    """CDF of Laplace noise with rate alpha/sensitivity."""
    rate = alpha / sensitivity
    z = np.asarray(z, dtype=np.float64)
    lower = 0.5 * np.exp(rate * np.minimum(z, 0.0))
    upper = 1.0 - 0.5 * np.exp(-rate * np.maximum(z, 0.0))
    return np.where(z < 0, lower, upper)


def sample_laplace(alpha, sensitivity, source, size=None):
    """
    Draws Laplace noise with rate alpha/sensitivity (variance
    2 (sensitivity/alpha)^2) by inverse-CDF sampling.

    :param size: None for a single float, otherwise an array shape.
    """
    if not alpha > 0:
        raise ContractError("alpha must be positive, got {}".format(alpha))
    if not sensitivity > 0:
        raise ContractError("sensitivity must be positive, got {}".format(sensitivity))
    variates = laplace_from_uniform(source.uniform(size), sensitivity / alpha)
    if size is None:
        return float(variates)
    return variates


def answer_query(cube, query, alpha, source):
    sensitivity = sensitivity_of(query)
    return true_answer(cube, query) + sample_laplace(alpha, sensitivity, source)


def answer_history(cube, queries, alphas, source):
    """
    Answers every query with its own budget. Row i draws from stream i
    of `source`, so the result does not depend on generation order.
    """
    queries = list(queries)
    alphas = list(alphas)
    if len(queries) != len(alphas):
        raise ShapeError("{} queries but {} budgets".format(len(queries), len(alphas)))
    if not queries:
        return QueryHistory.empty(cube.n)
    answers = [
        answer_query(cube, query, alpha, source.stream(i))
        for i, (query, alpha) in enumerate(zip(queries, alphas))
    ]
    H = np.vstack([q.coefficients for q in queries])
    return QueryHistory(H, answers, alphas)
