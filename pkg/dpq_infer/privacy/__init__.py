from dpq_infer.privacy.mechanism import NoiseSource, sample_laplace, answer_query, answer_history
from dpq_infer.privacy.ledger import BudgetLedger, Admission, allocate_budget, system_cost, admit
