import math

import numpy as np
import pytest

from dpq_infer.data.cube import LinearQuery
from dpq_infer.data.history import QueryHistory
from dpq_infer.exceptions import ContractError, DegenerateQueryError, ShapeError
from dpq_infer.privacy.ledger import (
    BudgetLedger, admit, allocate_budget, query_cost, system_cost,
    within_epsilon_probability,
)
from dpq_infer.privacy.mechanism import NoiseSource, sample_laplace


def test_system_cost_worked_example(example_history):
    per_cell, alpha_bar = system_cost(example_history)
    assert per_cell == pytest.approx([0.1, 0.275, 0.25, 0.375])
    assert alpha_bar == pytest.approx(0.375)


def test_empty_history_costs_nothing():
    per_cell, alpha_bar = system_cost(QueryHistory.empty(3))
    assert np.array_equal(per_cell, np.zeros(3))
    assert alpha_bar == 0.0


def test_admit_within_bound(example_history):
    ledger = BudgetLedger.from_history(example_history, bound=1.0)
    admission = ledger.admit(LinearQuery([0, 0, 0, 1]), 0.5)
    assert admission.admitted
    assert admission.per_cell[3] == pytest.approx(0.875)
    assert admission.excess == 0.0
    # admit never charges
    assert ledger.alpha_bar == pytest.approx(0.375)


def test_admit_over_bound(example_history):
    ledger = BudgetLedger.from_history(example_history, bound=0.375)
    admission = ledger.admit(LinearQuery([0, 0, 0, 1]), 0.5)
    assert not admission.admitted
    assert admission.excess == pytest.approx(0.5)


def test_admit_rejects_bad_budget(example_history):
    ledger = BudgetLedger.from_history(example_history)
    with pytest.raises(ContractError):
        ledger.admit(LinearQuery([0, 0, 0, 1]), 0.0)
    with pytest.raises(ShapeError):
        ledger.admit(LinearQuery([0, 1]), 0.1)
    with pytest.raises(DegenerateQueryError):
        ledger.admit(LinearQuery([0, 0, 0, 0]), 0.1)


def test_functional_admit_checks_sync(example_history):
    ledger = BudgetLedger.from_history(example_history)
    assert admit(ledger, example_history, LinearQuery([1, 0, 0, 0]), 0.1).admitted
    ledger.charge(LinearQuery([1, 0, 0, 0]), 0.1)
    with pytest.raises(ContractError):
        admit(ledger, example_history, LinearQuery([1, 0, 0, 0]), 0.1)


def test_charges_compose_sequentially(example_history):
    ledger = BudgetLedger(example_history.n)
    history = QueryHistory.empty(example_history.n)
    for row, y, alpha in zip(example_history.H, example_history.y, example_history.alpha):
        query = LinearQuery(row)
        ledger.charge(query, alpha)
        history = history.append(query, y, alpha)
        assert np.array_equal(ledger.per_cell, system_cost(history)[0])


def test_query_cost_scales_by_sensitivity():
    assert query_cost(LinearQuery([2, 1, 0, 0]), 0.05) == pytest.approx([0.05, 0.025, 0, 0])


def test_copy_is_independent(example_history):
    ledger = BudgetLedger.from_history(example_history)
    clone = ledger.copy()
    clone.charge(LinearQuery([1, 0, 0, 0]), 1.0)
    assert ledger.alpha_bar == pytest.approx(0.375)
    assert clone.alpha_bar == pytest.approx(1.1)


def test_per_cell_is_read_only(example_history):
    ledger = BudgetLedger.from_history(example_history)
    with pytest.raises(ValueError):
        ledger.per_cell[0] = 0.0


def test_remaining(example_history):
    ledger = BudgetLedger.from_history(example_history, bound=1.0)
    assert ledger.remaining == pytest.approx(0.625)
    assert BudgetLedger.from_history(example_history).remaining == math.inf


@pytest.mark.parametrize("sensitivity,epsilon,delta,expected", [
    (1.0, 10.0, 0.05, math.log(20) / 10),
    (2.0, 10.0, 0.05, 2 * math.log(20) / 10),
    (1.0, 50.0, 0.2, math.log(5) / 50),
])
def test_allocate_budget(sensitivity, epsilon, delta, expected):
    alpha = allocate_budget(sensitivity, epsilon, delta)
    assert alpha == pytest.approx(expected)
    assert within_epsilon_probability(alpha, sensitivity, epsilon) == pytest.approx(1 - delta)


def test_allocate_budget_contract():
    with pytest.raises(ContractError):
        allocate_budget(1.0, 0.0, 0.1)
    with pytest.raises(ContractError):
        allocate_budget(1.0, 1.0, 1.0)
    with pytest.raises(ContractError):
        allocate_budget(0.0, 1.0, 0.1)


def test_allocated_budget_meets_requirement():
    alpha = allocate_budget(2.0, 10.0, 0.05)
    noise = sample_laplace(alpha, 2.0, NoiseSource(4), size=10 ** 5)
    assert np.mean(np.abs(noise) <= 10.0) == pytest.approx(0.95, abs=0.004)
