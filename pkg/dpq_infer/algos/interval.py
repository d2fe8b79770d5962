"""
Credible intervals and tail probabilities of a Posterior.

Bin o holds theta in (c + o - 1/2, c + o + 1/2]; mass is spread uniformly
within a bin when an interval cuts through it.
"""
import math

import numpy as np

from dpq_infer.algos.posterior import bin_edges
from dpq_infer.exceptions import ContractError, CoverageError


def credible_interval(posterior, delta):
    """
    Symmetric interval [c - k, c + k] around the point estimate c, with k
    the fewest one-bin expansions whose bins -k..k hold at least 1 - delta.

    The endpoints are the centers of the outermost bins taken, so the mass
    collected equals confidence_of(posterior, L - 1/2, U + 1/2).
    """
    if not 0 < delta < 1:
        raise ContractError("delta must lie in (0, 1), got {}".format(delta))
    masses = posterior.mass.masses
    half = posterior.mass.half
    target = 1.0 - delta
    attainable = math.fsum(masses)
    if target > attainable:
        raise CoverageError(target, attainable)

    c = posterior.center_value
    collected = masses[half]
    k = 0
    # Both sides are summed separately; sampled posteriors need not be symmetric
    while collected < target and k < half:
        k += 1
        collected += masses[half - k] + masses[half + k]
    return c - k, c + k


def _covered(posterior, lower, upper):
    lo, hi = bin_edges(posterior)
    overlap = np.clip(np.minimum(hi, upper) - np.maximum(lo, lower), 0.0, 1.0)
    return float(np.dot(posterior.mass.masses, overlap))


def confidence_of(posterior, lower, upper):
    """Posterior mass of theta in [lower, upper]."""
    if lower > upper:
        raise ContractError("interval lower end {} above upper end {}".format(lower, upper))
    return _covered(posterior, lower, upper)


def claim_probability(posterior, lower, upper):
    """Probability that a claimed range [lower, upper] holds theta."""
    return confidence_of(posterior, lower, upper)


def tail_probability(posterior, c):
    """Posterior mass strictly above c."""
    return _covered(posterior, c, math.inf)


def tail_probability_below(posterior, c):
    """Posterior mass strictly below c."""
    return _covered(posterior, -math.inf, c)
