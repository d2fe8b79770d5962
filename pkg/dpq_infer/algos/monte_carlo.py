"""
Monte Carlo approximation of the estimator noise A.N.

Draws sample_size realizations of sum_k A_k N_k(alpha_k/S_k), rounds each
onto the unit bin containing it and histograms the result.
"""
from collections import OrderedDict
import math

import numpy as np
import gtimer as gt

from dpq_infer.algos.algorithm import InferenceMethod
from dpq_infer.exceptions import ContractError, ShapeError
from dpq_infer.privacy.mechanism import sample_laplace
from dpq_infer.utils.distributions import ProbabilityMassVector, mc_error_bound

MIN_SAMPLE_SIZE = 10000


def mc_noise_pmv(weights, history, sample_size, source, min_sample_size=MIN_SAMPLE_SIZE):
    """
    :param weights: EstimatorWeights over the rows of `history`.
    :param sample_size: number of realizations, at least `min_sample_size`.
    :param source: NoiseSource; row k draws from its child `source.spawn(k)`.
    """
    a = np.asarray(weights.weights, dtype=np.float64)
    if a.size != history.m:
        raise ShapeError("{} weights for a history of {} rows".format(a.size, history.m))
    sample_size = int(sample_size)
    if sample_size < min_sample_size:
        raise ContractError("sample size {} is below the floor of {}".format(
            sample_size, min_sample_size))
    if not np.any(a):
        return ProbabilityMassVector.point()

    total = np.zeros(sample_size)
    for k, (coef, alpha, sensitivity) in enumerate(zip(a, history.alpha, history.sensitivity)):
        if coef == 0.0:
            continue
        total += coef * sample_laplace(alpha, sensitivity, source.spawn(k), size=sample_size)

    # (o - 1/2, o + 1/2] -> o
    binned = np.ceil(total - 0.5).astype(np.int64)
    half = int(np.abs(binned).max())
    counts = np.bincount(binned + half, minlength=2 * half + 1)
    return ProbabilityMassVector(counts / float(sample_size), check=False)


class MonteCarlo(InferenceMethod):
    """Sampling approximation; cost grows with sample_size times history size."""

    name = "mc"

    def __init__(self, source, sample_size=MIN_SAMPLE_SIZE, min_sample_size=MIN_SAMPLE_SIZE):
        super().__init__()
        self.source = source
        self.sample_size = int(sample_size)
        self.min_sample_size = int(min_sample_size)
        self._last = None

    def noise_pmv(self, weights, history):
        gt.stamp('mc setup', unique=False)
        pmv = mc_noise_pmv(weights, history, self.sample_size, self.source,
                           self.min_sample_size)
        gt.stamp('mc sampling', unique=False)
        self._last = pmv
        return pmv

    def get_diagnostics(self):
        stats = OrderedDict([('samples', self.sample_size)])
        if self._last is not None:
            stats.update(self._last.get_diagnostics())
            stats['error bound'] = (mc_error_bound(self._last, self.sample_size)
                                    if self.sample_size > 1 else math.inf)
        return stats
