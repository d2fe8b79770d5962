from collections import OrderedDict, namedtuple
import math

import numpy as np

from dpq_infer.exceptions import ShapeError

Metrics = namedtuple(
    'Metrics',
    'answering_ratio reliability_ratio relative_error',
)


def _field(row, name):
    return row[name] if isinstance(row, dict) else getattr(row, name)


def compute_metrics(log, truths):
    """
    :param log: run-log rows (mappings or objects with served_from, estimate,
        L, U and epsilon).
    :param truths: true answer of each row's query.
    :return: Metrics(R_a, R_i, E). R_i and E are nan when nothing was answered.
    """
    log = list(log)
    truths = list(truths)
    if len(log) != len(truths):
        raise ShapeError("{} log rows but {} true answers".format(len(log), len(truths)))
    if not log:
        return Metrics(math.nan, math.nan, math.nan)
    answered = [(row, theta) for row, theta in zip(log, truths)
                if _field(row, 'served_from') != "rejected"]
    ratio = len(answered) / float(len(log))
    if not answered:
        return Metrics(ratio, math.nan, math.nan)
    contains = [float(_field(r, 'L')) <= theta <= float(_field(r, 'U')) for r, theta in answered]
    errors = [abs(float(_field(r, 'estimate')) - theta) / (2.0 * float(_field(r, 'epsilon')))
              for r, theta in answered]
    return Metrics(ratio, float(np.mean(contains)), float(np.mean(errors)))


def metrics_dict(metrics, prefix=''):
    return OrderedDict([
        (prefix + 'R_a', metrics.answering_ratio),
        (prefix + 'R_i', metrics.reliability_ratio),
        (prefix + 'E', metrics.relative_error),
    ])
