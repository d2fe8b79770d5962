"""
Posterior belief of a target answer theta given a noisy history.

With an uninformative prior, Pr(theta) = Pr(A.N = A.y - theta), so the
posterior is the estimator-noise mass vector reflected about offset 0 and
centered on the point estimate A.y.
"""
from collections import namedtuple
import json
import math

import numpy as np

from dpq_infer.algos.blue import blue_point_estimate, noise_variance
from dpq_infer.algos.monte_carlo import MIN_SAMPLE_SIZE, MonteCarlo
from dpq_infer.algos.probability_calculation import (
    DEFAULT_GAMMA, ProbabilityCalculation, pc_complexity,
)
from dpq_infer.exceptions import ContractError, ParseError
from dpq_infer.utils.distributions import ProbabilityMassVector, dump_pmv, load_pmv

Posterior = namedtuple(
    'Posterior',
    'mass center_value method loss',
)

METHODS = ("pc", "mc", "auto")
PC_THRESHOLD = 1e9


def default_sample_size(expected_length, peak_mass, gamma, floor=MIN_SAMPLE_SIZE):
    """Smallest m_s with |u| max(u)(1 - max(u)) / (m_s - 1) < gamma^2, floored."""
    if expected_length < 1 or not gamma > 0:
        raise ContractError("expected length and gamma must be positive")
    if not 0 <= peak_mass <= 1:
        raise ContractError("peak mass must lie in [0, 1], got {}".format(peak_mass))
    needed = math.ceil(expected_length * peak_mass * (1.0 - peak_mass) / gamma ** 2 + 1)
    return int(max(floor, needed))


def _guess_shape(weights, history):
    # Normal approximation of the noise: ~6 sigma each side, peak 1/(sigma sqrt(2 pi))
    sigma = math.sqrt(noise_variance(weights, history))
    if sigma == 0:
        return 1, 1.0
    length = 2 * int(math.ceil(6.0 * sigma)) + 1
    peak = min(1.0, 1.0 / (sigma * math.sqrt(2.0 * math.pi)))
    return length, peak


def choose_method(weights, history, gamma=DEFAULT_GAMMA, threshold=PC_THRESHOLD):
    """PC while its convolution work ln(m/gamma)^2 beta stays under `threshold`."""
    if history.m == 0:
        return "pc"
    work = math.log(history.m / gamma) ** 2 * pc_complexity(weights, history)
    return "pc" if work <= threshold else "mc"


def make_method(method, weights, history, params, source):
    """
    Builds the InferenceMethod named by `method`.

    :param params: dict with optional keys gamma, samples, min_sample_size, threshold.
    """
    params = params or {}
    gamma = params.get('gamma', DEFAULT_GAMMA)
    if method == "auto":
        method = choose_method(weights, history, gamma,
                               params.get('threshold', PC_THRESHOLD))
    if method == "pc":
        return ProbabilityCalculation(gamma=gamma)
    if method == "mc":
        if source is None:
            raise ContractError("Monte Carlo inference needs a noise source")
        floor = params.get('min_sample_size', MIN_SAMPLE_SIZE)
        samples = params.get('samples')
        if samples is None:
            length, peak = _guess_shape(weights, history)
            samples = default_sample_size(length, peak, gamma, floor)
        return MonteCarlo(source, sample_size=samples, min_sample_size=floor)
    raise ContractError("unknown inference method {!r}; expected one of {}".format(
        method, METHODS))


def posterior_from_noise(noise, center_value, method):
    mass = noise.reflect()
    return Posterior(mass=mass, center_value=float(center_value), method=method,
                     loss=mass.loss)


def posterior_of(weights, history, method="pc", params=None, source=None):
    inference = make_method(method, weights, history, params, source)
    noise = inference.noise_pmv(weights, history)
    return posterior_from_noise(noise, blue_point_estimate(weights, history), inference.name)


def posterior_mean(posterior):
    return posterior.center_value + posterior.mass.mean()


def posterior_std(posterior):
    return posterior.mass.std()


def save_posterior(posterior, path, params=None):
    """Writes the mass CSV at `path` and a JSON sidecar at `path + '.json'`."""
    with open(path, "w") as f:
        dump_pmv(posterior.mass, f)
    sidecar = {
        "center": posterior.center_value,
        "method": posterior.method,
        "loss": posterior.loss,
    }
    params = params or {}
    if posterior.method == "pc":
        sidecar["gamma"] = params.get('gamma', DEFAULT_GAMMA)
    elif params.get('samples') is not None:
        sidecar["samples"] = params['samples']
    with open(path + ".json", "w") as f:
        json.dump(sidecar, f, indent=2, sort_keys=True)


def load_posterior(path):
    mass = load_pmv(path)
    sidecar_path = path + ".json"
    try:
        with open(sidecar_path, "r") as f:
            sidecar = json.load(f)
    except ValueError as e:
        raise ParseError(str(e), sidecar_path)
    if "center" not in sidecar or "method" not in sidecar:
        raise ParseError("posterior sidecar needs center and method", sidecar_path)
    if sidecar["method"] not in ("pc", "mc"):
        raise ParseError("unknown method {!r}".format(sidecar["method"]), sidecar_path)
    return Posterior(mass=mass, center_value=float(sidecar["center"]),
                     method=sidecar["method"], loss=mass.loss)


def point_posterior(center_value, method="pc"):
    return Posterior(mass=ProbabilityMassVector.point(), center_value=float(center_value),
                     method=method, loss=0.0)


def bin_edges(posterior):
    """Lower and upper theta edges of every bin."""
    offsets = posterior.mass.offsets.astype(np.float64)
    return (posterior.center_value + offsets - 0.5,
            posterior.center_value + offsets + 0.5)
