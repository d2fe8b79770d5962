"""
Utility-driven query answering.

A request (Q, epsilon, delta) is first served by inference over the
answered history; budget is spent only when the history cannot give an
interval of width 2 epsilon at confidence 1 - delta.
"""
from collections import Counter, OrderedDict, namedtuple
import math

import gtimer as gt

from dpq_infer.algos.blue import RANK_TOL, fit
from dpq_infer.algos.interval import credible_interval
from dpq_infer.algos.posterior import posterior_of
from dpq_infer.data.cube import sensitivity_of, true_answer
from dpq_infer.exceptions import CoverageError, EstimabilityError, ShapeError
from dpq_infer.privacy.ledger import BudgetLedger, allocate_budget
from dpq_infer.privacy.mechanism import answer_query
from dpq_infer.utils.logging import logger
from dpq_infer.utils.utils import summary_stats

HISTORY_INFERENCE = "history_inference"
FRESH_MECHANISM = "fresh_mechanism"
REJECTED = "rejected"

# NoiseSource children of the engine root
FRESH_STREAM = 0
INFERENCE_STREAM = 1
BOOTSTRAP_STREAM = 2

RUN_LOG_COLUMNS = ("qid", "served_from", "alpha_spent", "estimate", "L", "U",
                   "epsilon", "delta", "true_theta")

QueryResponse = namedtuple(
    'QueryResponse',
    'estimate interval served_from alpha_spent',
)

EngineState = namedtuple(
    'EngineState',
    'cube history ledger method params source weighting next_qid',
)


def make_state(cube, history, source, bound=math.inf, method="pc", params=None,
               weighting="blue"):
    if history.n != cube.n:
        raise ShapeError("history over {} cells for a cube of {} cells".format(
            history.n, cube.n))
    return EngineState(
        cube=cube,
        history=history,
        ledger=BudgetLedger.from_history(history, bound),
        method=method,
        params=dict(params or {}),
        source=source,
        weighting=weighting,
        next_qid=0,
    )


def infer_from_history(state, query, requirement, qid):
    """
    Credible interval for `query` from the history alone.

    :return: (estimate, (L, U)), or None when the history cannot estimate
        the query or the posterior cannot reach 1 - delta.
    """
    history = state.history
    # method None answers every request fresh
    if state.method is None or history.m < history.n:
        return None
    try:
        weights = fit(history, query, state.weighting,
                      state.params.get('rank_tol', RANK_TOL))
    except EstimabilityError:
        return None
    gt.stamp('estimation', unique=False)
    posterior = posterior_of(
        weights, history, state.method, state.params,
        state.source.spawn(INFERENCE_STREAM).spawn(qid),
    )
    gt.stamp('inference', unique=False)
    try:
        interval = credible_interval(posterior, requirement.delta)
    except CoverageError:
        return None
    return posterior.center_value, interval


def answer(state, query, requirement):
    """
    Serves one request.

    :return: (QueryResponse, new_state). A history-served or rejected
        request returns `state` itself apart from the advanced qid.
    """
    if query.n != state.cube.n:
        raise ShapeError("query over {} cells for a cube of {} cells".format(
            query.n, state.cube.n))
    sensitivity = sensitivity_of(query)
    qid = state.next_qid
    state = state._replace(next_qid=qid + 1)
    epsilon = requirement.epsilon

    inferred = infer_from_history(state, query, requirement, qid)
    if inferred is not None:
        estimate, (lower, upper) = inferred
        if upper - lower <= 2.0 * epsilon:
            return QueryResponse(estimate, (lower, upper), HISTORY_INFERENCE, 0.0), state

    alpha = allocate_budget(sensitivity, epsilon, requirement.delta)
    admission = state.ledger.admit(query, alpha)
    gt.stamp('admission', unique=False)
    if not admission.admitted:
        nan = float('nan')
        return QueryResponse(nan, (nan, nan), REJECTED, 0.0), state

    noisy = answer_query(state.cube, query, alpha,
                         state.source.spawn(FRESH_STREAM).spawn(qid))
    ledger = state.ledger.copy()
    ledger.charge(query, alpha)
    state = state._replace(
        history=state.history.append(query, noisy, alpha),
        ledger=ledger,
    )
    gt.stamp('mechanism', unique=False)
    return QueryResponse(noisy, (noisy - epsilon, noisy + epsilon), FRESH_MECHANISM, alpha), state


def run_session(state, requests):
    """
    Folds `answer` over (query, requirement) pairs; a rejection does not
    stop the session.

    :return: (list of QueryResponse, final state)
    """
    responses = []
    for query, requirement in requests:
        response, state = answer(state, query, requirement)
        responses.append(response)
    return responses, state


class QueryEngine(object):
    """
    Single-writer driver around `answer`. Every request adds one row to
    the logger's tabular stream.
    """

    def __init__(self, state, simulate=False):
        self.state = state
        self.simulate = simulate
        self.served = Counter()
        self.alpha_trajectory = []
        self.run_log = []

    @classmethod
    def from_config(cls, cube, history, source, config, simulate=False, infer=True,
                    weighting=None):
        state = make_state(
            cube, history, source,
            bound=config.bound,
            method=config.METHOD if infer else None,
            params=config.inference_params(),
            weighting=weighting or config.ESTIMATOR,
        )
        return cls(state, simulate=simulate)

    @property
    def history(self):
        return self.state.history

    @property
    def ledger(self):
        return self.state.ledger

    def answer(self, query, requirement):
        qid = self.state.next_qid
        response, self.state = answer(self.state, query, requirement)
        self.served[response.served_from] += 1
        self.alpha_trajectory.append(self.state.ledger.alpha_bar)
        self._log_response(qid, query, requirement, response)
        return response

    def run_session(self, requests):
        """Answers (query, requirement) pairs in order; rejections do not stop the session."""
        return [self.answer(query, requirement) for query, requirement in requests]

    def _log_response(self, qid, query, requirement, response):
        lower, upper = response.interval
        row = OrderedDict([
            ('qid', qid),
            ('served_from', response.served_from),
            ('alpha_spent', response.alpha_spent),
            ('estimate', response.estimate),
            ('L', lower),
            ('U', upper),
            ('epsilon', requirement.epsilon),
            ('delta', requirement.delta),
            ('true_theta', true_answer(self.state.cube, query) if self.simulate else None),
        ])
        self.run_log.append(row)
        logger.record_dict(row)
        logger.dump_tabular(with_prefix=False, with_timestamp=False, step=qid)

    def get_diagnostics(self):
        stats = OrderedDict()
        stats.update(self.state.history.get_diagnostics())
        stats.update(self.state.ledger.get_diagnostics())
        for served_from in (HISTORY_INFERENCE, FRESH_MECHANISM, REJECTED):
            stats['served/' + served_from] = self.served[served_from]
        answered = [row for row in self.run_log if row["served_from"] != REJECTED]
        stats.update(summary_stats(
            "interval width", [row["U"] - row["L"] for row in answered]))
        stats.update(summary_stats(
            "alpha spent", [row["alpha_spent"] for row in answered
                            if row["served_from"] == FRESH_MECHANISM]))
        stats.update(get_timings())
        return stats

    def get_snapshot(self):
        return dict(history=self.state.history, ledger=self.state.ledger.per_cell)


def get_timings():
    times = OrderedDict()
    cum = gt.get_times().stamps.cum
    for key in sorted(cum):
        times['time/{} (s)'.format(key)] = cum[key]
    return times
