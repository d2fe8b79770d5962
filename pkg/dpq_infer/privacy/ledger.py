"""
Privacy accounting for a history of Laplace answers.

Row i of H spends (alpha_i/S_i)|H_ij| on cell j; rows compose sequentially
on a cell and cells compose in parallel, so the system cost is the worst
cell: B = (alpha./S)^T |H|, alpha_bar = max(B).

The per-cell guarantee assumes records in different cells are independent
or negatively correlated. The ledger does not check that assumption.
"""
from collections import OrderedDict, namedtuple
import math

import numpy as np

from dpq_infer.data.cube import sensitivity_of
from dpq_infer.exceptions import ContractError, ShapeError

Admission = namedtuple(
    'Admission',
    'admitted excess per_cell alpha_bar',
)


def allocate_budget(sensitivity, epsilon, delta):
    """
    Smallest budget whose Laplace answer lies within epsilon of the truth
    with probability at least 1 - delta: 1 - exp(-epsilon alpha / S) = 1 - delta.
    """
    if not sensitivity > 0:
        raise ContractError("sensitivity must be positive, got {}".format(sensitivity))
    if not epsilon > 0:
        raise ContractError("epsilon must be positive, got {}".format(epsilon))
    if not 0 < delta < 1:
        raise ContractError("delta must lie in (0, 1), got {}".format(delta))
    return sensitivity * -math.log(delta) / epsilon


def within_epsilon_probability(alpha, sensitivity, epsilon):
    """Pr(|N(alpha/S)| <= epsilon) for a single Laplace answer."""
    return -math.expm1(-epsilon * alpha / sensitivity)


def system_cost(history):
    """:return: (per_cell B, alpha_bar)"""
    per_cell = np.zeros(history.n)
    if history.m == 0:
        return per_cell, 0.0
    # Row-by-row accumulation matches the incremental charges bit for bit
    for row, alpha, sensitivity in zip(history.H, history.alpha, history.sensitivity):
        per_cell = per_cell + (alpha / sensitivity) * np.abs(row)
    return per_cell, float(per_cell.max())


def query_cost(query, alpha):
    """Per-cell spend of answering `query` once with budget alpha."""
    if not alpha > 0:
        raise ContractError("candidate budget must be positive, got {}".format(alpha))
    return (alpha / sensitivity_of(query)) * np.abs(query.coefficients)


class BudgetLedger(object):
    """
    Per-cell spent budget B and the overall bound on max(B).

    A single writer owns a ledger; `charge` is the only mutation and is
    applied after a successful `admit` for the same candidate.
    """

    def __init__(self, n, bound=math.inf):
        if not bound > 0:
            raise ContractError("budget bound must be positive, got {}".format(bound))
        self._per_cell = np.zeros(n)
        self.bound = float(bound)

    @classmethod
    def from_history(cls, history, bound=math.inf):
        ledger = cls(history.n, bound)
        ledger._per_cell, _ = system_cost(history)
        return ledger

    @property
    def per_cell(self):
        view = self._per_cell.view()
        view.setflags(write=False)
        return view

    @property
    def n(self):
        return self._per_cell.size

    @property
    def alpha_bar(self):
        return float(self._per_cell.max()) if self._per_cell.size else 0.0

    @property
    def remaining(self):
        return self.bound - self.alpha_bar

    def admit(self, candidate, candidate_alpha):
        """
        Tests whether answering `candidate` with `candidate_alpha` keeps
        max(B) within the bound. Never mutates the ledger.
        """
        if candidate.n != self.n:
            raise ShapeError("candidate over {} cells, ledger over {} cells".format(
                candidate.n, self.n))
        per_cell = self._per_cell + query_cost(candidate, candidate_alpha)
        alpha_bar = float(per_cell.max())
        excess = max(0.0, alpha_bar - self.bound)
        return Admission(
            admitted=alpha_bar <= self.bound,
            excess=excess,
            per_cell=per_cell,
            alpha_bar=alpha_bar,
        )

    def charge(self, candidate, candidate_alpha):
        self._per_cell = self._per_cell + query_cost(candidate, candidate_alpha)
        return self.alpha_bar

    def copy(self):
        ledger = BudgetLedger(self.n, self.bound)
        ledger._per_cell = self._per_cell.copy()
        return ledger

    def get_diagnostics(self):
        return OrderedDict([
            ('alpha bar', self.alpha_bar),
            ('bound', self.bound),
            ('remaining', self.remaining),
        ])


def admit(ledger, history, candidate, candidate_alpha):
    """
    Functional form of `BudgetLedger.admit` that also checks the ledger
    against the history it claims to describe.
    """
    expected, _ = system_cost(history)
    if expected.shape != ledger.per_cell.shape or not np.allclose(
            expected, ledger.per_cell, rtol=1e-12, atol=0.0):
        raise ContractError("ledger is out of sync with the history")
    return ledger.admit(candidate, candidate_alpha)
