"""
Best linear unbiased estimation of a target query from a noisy history.

With D = diag(alpha./S) the noise of row k has variance 2/D_k^2, so the
generalized least-squares weights are D^2:

    x_hat = (H^T D^2 H)^-1 H^T D^2 y
    A     = Q (H^T D^2 H)^-1 H^T D^2
    Var   = 2 Q (H^T D^2 H)^-1 Q^T

Everything is computed from a column-pivoted QR factorization of DH;
the Gram matrix is never formed or inverted.
"""
from collections import namedtuple

import numpy as np
import scipy.linalg

from dpq_infer.exceptions import ContractError, EstimabilityError, ShapeError

EstimatorWeights = namedtuple(
    'EstimatorWeights',
    'weights target point_estimate variance',
)

Factorization = namedtuple(
    'Factorization',
    'q r perm scale rank',
)

RANK_TOL = 1e-10
WEIGHTINGS = ("blue", "ols")


def row_scale(history, weighting="blue"):
    """Square roots of the least-squares row weights."""
    if weighting == "blue":
        return history.alpha / history.sensitivity
    if weighting == "ols":
        return np.ones(history.m)
    raise ContractError("unknown weighting {!r}; expected one of {}".format(
        weighting, WEIGHTINGS))


def factorize(history, weighting="blue", rank_tol=RANK_TOL):
    """
    Pivoted QR of the weighted design. Raises EstimabilityError when
    |R_ii| <= rank_tol * |R_00| for some i < n.
    """
    n = history.n
    if history.m < n:
        raise EstimabilityError(history.rank(), n)
    scale = row_scale(history, weighting)
    q, r, perm = scipy.linalg.qr(scale[:, None] * history.H, mode='economic', pivoting=True)
    diag = np.abs(np.diag(r))
    rank = int(np.count_nonzero(diag > rank_tol * diag[0])) if diag[0] > 0 else 0
    if rank < n:
        raise EstimabilityError(rank, n)
    return Factorization(q=q, r=r, perm=perm, scale=scale, rank=rank)


def _check_target(history, target):
    if target.n != history.n:
        raise ShapeError("target over {} cells, history over {} cells".format(
            target.n, history.n))


def _solve_target(fact, target):
    # z = R^-T P^T Q^T, so A = (q z) * scale and Q G^-1 Q^T = |z|^2
    return scipy.linalg.solve_triangular(
        fact.r, target.coefficients[fact.perm], trans='T', lower=False)


def estimator_matrix(history, target, weighting="blue", fact=None):
    """
    Weights A with A.H = Q minimizing the estimator variance.

    :return: EstimatorWeights with point_estimate and variance unset.
    """
    _check_target(history, target)
    if fact is None:
        fact = factorize(history, weighting)
    z = _solve_target(fact, target)
    weights = (fact.q @ z) * fact.scale
    return EstimatorWeights(weights=weights, target=target, point_estimate=None, variance=None)


def blue_point_estimate(weights, history):
    if len(weights.weights) != history.m:
        raise ShapeError("{} weights for a history of {} rows".format(
            len(weights.weights), history.m))
    return float(np.dot(weights.weights, history.y))


def noise_variance(weights, history):
    """Variance of A.N for independent Laplace rows: 2 sum A_k^2 (S_k/alpha_k)^2."""
    if len(weights.weights) != history.m:
        raise ShapeError("{} weights for a history of {} rows".format(
            len(weights.weights), history.m))
    scale = history.sensitivity / history.alpha
    return float(2.0 * np.sum((weights.weights * scale) ** 2))


def estimate_variance(history, target, fact=None):
    _check_target(history, target)
    if fact is None:
        fact = factorize(history, "blue")
    z = _solve_target(fact, target)
    return float(2.0 * np.dot(z, z))


def reconstruct_cube(history, weighting="blue", fact=None):
    """x_hat, the weighted least-squares estimate of every cell."""
    if fact is None:
        fact = factorize(history, weighting)
    rhs = fact.q.T @ (fact.scale * history.y)
    x_perm = scipy.linalg.solve_triangular(fact.r, rhs, lower=False)
    x_hat = np.empty_like(x_perm)
    x_hat[fact.perm] = x_perm
    return x_hat


def chebyshev_delta(variance, epsilon):
    """Upper bound on Pr(|theta - theta_hat| > epsilon) from Chebyshev's inequality."""
    if not epsilon > 0:
        raise ContractError("epsilon must be positive, got {}".format(epsilon))
    if variance < 0:
        raise ContractError("variance must be nonnegative, got {}".format(variance))
    return min(1.0, variance / epsilon ** 2)


def fit(history, target, weighting="blue", rank_tol=RANK_TOL):
    """Weights, point estimate and variance in one factorization."""
    _check_target(history, target)
    fact = factorize(history, weighting, rank_tol)
    weights = estimator_matrix(history, target, weighting, fact=fact)
    if weighting == "blue":
        variance = estimate_variance(history, target, fact=fact)
    else:
        variance = noise_variance(weights, history)
    return weights._replace(
        point_estimate=blue_point_estimate(weights, history),
        variance=variance,
    )
