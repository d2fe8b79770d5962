"""
Probability calculation: the estimator noise as an exact convolution of
per-row discretized Laplace vectors, each truncated so that the total
truncation loss stays below gamma.
"""
from collections import OrderedDict
import math

import numpy as np
import gtimer as gt

from dpq_infer.algos.algorithm import InferenceMethod
from dpq_infer.exceptions import ContractError, ShapeError
from dpq_infer.utils.distributions import convolve_all, laplace_pmv, laplace_pmv_loss

DEFAULT_GAMMA = 0.01


def _check(weights, history, gamma):
    a = np.asarray(weights.weights, dtype=np.float64)
    if a.size != history.m:
        raise ShapeError("{} weights for a history of {} rows".format(a.size, history.m))
    if not 0 < gamma < 1:
        raise ContractError("gamma must lie in (0, 1), got {}".format(gamma))
    return a


def pc_lengths(weights, history, gamma=DEFAULT_GAMMA):
    """
    Odd vector length per row, ceil(2 |A_k| S_k ln(m/gamma) / alpha_k) bumped
    to the next odd integer, so every row loses at most gamma/m. Rows with a
    zero weight get length 1.
    """
    a = _check(weights, history, gamma)
    log_term = math.log(history.m / gamma)
    lengths = []
    for coef, alpha, sensitivity in zip(a, history.alpha, history.sensitivity):
        if coef == 0.0:
            lengths.append(1)
            continue
        length = int(math.ceil(2.0 * abs(coef) * sensitivity * log_term / alpha))
        if length % 2 == 0:
            length += 1
        lengths.append(max(length, 1))
    return lengths


def pc_noise_pmv(weights, history, gamma=DEFAULT_GAMMA, order="ascending"):
    a = _check(weights, history, gamma)
    lengths = pc_lengths(weights, history, gamma)
    vectors = [
        laplace_pmv(alpha, sensitivity, coef, length)
        for coef, alpha, sensitivity, length in zip(
            a, history.alpha, history.sensitivity, lengths)
        if coef != 0.0
    ]
    return convolve_all(vectors, order=order)


def pc_truncation_loss(weights, history, gamma=DEFAULT_GAMMA):
    """Union bound on the mass dropped by truncation; never above gamma."""
    a = _check(weights, history, gamma)
    lengths = pc_lengths(weights, history, gamma)
    return math.fsum(
        laplace_pmv_loss(alpha, sensitivity, coef, length)
        for coef, alpha, sensitivity, length in zip(
            a, history.alpha, history.sensitivity, lengths))


def pc_complexity(weights, history):
    """beta = (sum_k |A_k| S_k / alpha_k)^2; convolution work is ln(m/gamma)^2 beta."""
    a = np.asarray(weights.weights, dtype=np.float64)
    if a.size != history.m:
        raise ShapeError("{} weights for a history of {} rows".format(a.size, history.m))
    return float(np.sum(np.abs(a) * history.sensitivity / history.alpha) ** 2)


class ProbabilityCalculation(InferenceMethod):

    name = "pc"

    def __init__(self, gamma=DEFAULT_GAMMA, order="ascending"):
        super().__init__()
        if not 0 < gamma < 1:
            raise ContractError("gamma must lie in (0, 1), got {}".format(gamma))
        self.gamma = gamma
        self.order = order
        self._last = None
        self._lengths = None

    def noise_pmv(self, weights, history):
        self._lengths = pc_lengths(weights, history, self.gamma)
        gt.stamp('pc lengths', unique=False)
        pmv = pc_noise_pmv(weights, history, self.gamma, self.order)
        gt.stamp('pc convolution', unique=False)
        self._last = pmv
        return pmv

    def get_diagnostics(self):
        stats = OrderedDict([('gamma', self.gamma)])
        if self._lengths is not None:
            stats['max row length'] = max(self._lengths)
            stats['rows'] = len(self._lengths)
        if self._last is not None:
            stats.update(self._last.get_diagnostics())
        return stats
