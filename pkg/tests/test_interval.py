import math

import numpy as np
import pytest

from dpq_infer.algos.interval import (
    claim_probability, confidence_of, credible_interval, tail_probability,
    tail_probability_below,
)
from dpq_infer.algos.blue import fit
from dpq_infer.algos.posterior import Posterior, point_posterior, posterior_of
from dpq_infer.data.cube import LinearQuery

from dpq_infer.exceptions import ContractError, CoverageError
from dpq_infer.privacy.mechanism import NoiseSource, answer_history
from dpq_infer.utils.distributions import ProbabilityMassVector

from .conftest import EXAMPLE_ALPHA, EXAMPLE_H


@pytest.fixture
def example_posterior(example_history, example_weights):
    return posterior_of(example_weights, example_history, "pc", {"gamma": 0.01})


def test_point_mass_interval():
    assert credible_interval(point_posterior(42.0), 0.05) == (42.0, 42.0)


def test_center_bin_already_enough():
    posterior = Posterior(ProbabilityMassVector([0.25, 0.5, 0.25]), 3.0, "pc", 0.0)
    assert credible_interval(posterior, 0.5) == (3.0, 3.0)
    assert credible_interval(posterior, 0.1) == (2.0, 4.0)


def test_unattainable_confidence():
    posterior = Posterior(ProbabilityMassVector([0.05, 0.8, 0.05]), 0.0, "pc", 0.1)
    with pytest.raises(CoverageError) as e:
        credible_interval(posterior, 0.05)
    assert e.value.attainable == pytest.approx(0.9)


def test_delta_range():
    with pytest.raises(ContractError):
        credible_interval(point_posterior(0.0), 0.0)


def test_example_interval_against_sampling(example_history, example_weights,
                                           example_posterior, sample_noise):
    lower, upper = credible_interval(example_posterior, 0.05)
    center = example_posterior.center_value
    assert (lower + upper) / 2 == pytest.approx(center)
    k = upper - center
    noise = sample_noise(example_weights, example_history)
    assert np.mean(np.abs(noise) <= k + 0.5) >= 0.95 - 0.003
    assert np.mean(np.abs(noise) <= k - 0.5) < 0.95 + 0.013
    assert confidence_of(example_posterior, lower - 0.5, upper + 0.5) >= 0.95


def test_example_tail_against_sampling(example_history, example_weights,
                                       example_posterior, sample_noise):
    noise = sample_noise(example_weights, example_history)
    expected = np.mean(example_posterior.center_value - noise > 0)
    assert tail_probability(example_posterior, 0.0) == pytest.approx(expected, abs=0.015)


def test_confidence_single_bin(single_row):
    history, weights = single_row
    posterior = posterior_of(weights, history, "pc", {"gamma": 0.01})
    assert confidence_of(posterior, -0.5, 0.5) == pytest.approx(1 - math.exp(-0.5), abs=0.005)


def test_full_support(example_posterior):
    assert confidence_of(example_posterior, -math.inf, math.inf) == pytest.approx(
        example_posterior.mass.total, abs=1e-12)
    assert tail_probability(example_posterior, -math.inf) == pytest.approx(
        example_posterior.mass.total, abs=1e-12)


@pytest.mark.parametrize("lower,upper", [(-10.3, 70.0), (41.9, 42.2), (0.0, 0.0), (-500, 800)])
def test_three_way_consistency(example_posterior, lower, upper):
    total = (confidence_of(example_posterior, lower, upper)
             + tail_probability(example_posterior, upper)
             + tail_probability_below(example_posterior, lower))
    assert total == pytest.approx(example_posterior.mass.total, abs=1e-12)


def test_monotonicity(example_posterior):
    c = example_posterior.center_value
    widths = [0.0, 0.7, 3.0, 10.5, 40.0]
    confidences = [confidence_of(example_posterior, c - w, c + w) for w in widths]
    assert confidences == sorted(confidences)
    tails = [tail_probability(example_posterior, t) for t in (-50.0, 0.0, 10.2, 42.0, 90.0)]
    assert tails == sorted(tails, reverse=True)


def test_tail_at_center(example_posterior):
    mass = example_posterior.mass
    half = tail_probability(example_posterior, example_posterior.center_value)
    assert abs(half - 0.5 * mass.total) <= mass.peak


def test_claim_probability(example_posterior):
    assert claim_probability(example_posterior, 0.0, 50.0) == confidence_of(
        example_posterior, 0.0, 50.0)
    with pytest.raises(ContractError):
        confidence_of(example_posterior, 2.0, 1.0)


@pytest.mark.slow
def test_coverage_calibration(example_cube):
    queries = [LinearQuery(row) for row in EXAMPLE_H]
    target = LinearQuery([1, 0, 1, 0])
    theta = 30.0
    hits = 0
    runs = 500
    for seed in range(runs):
        history = answer_history(example_cube, queries, EXAMPLE_ALPHA, NoiseSource(seed))
        posterior = posterior_of(fit(history, target), history, "pc", {"gamma": 0.01})
        lower, upper = credible_interval(posterior, 0.2)
        hits += lower - 0.5 <= theta <= upper + 0.5
    assert hits / runs >= 0.8 - 0.04


