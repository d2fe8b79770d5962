from .__version__ import __version__
from .exceptions import (
    ContractError, CoverageError, DegenerateQueryError, EstimabilityError, ParseError, ShapeError,
)
from .data import CountCube, LinearQuery, UtilityRequirement, QueryHistory
from .privacy import NoiseSource, BudgetLedger, allocate_budget, answer_query, system_cost
from .algos import MonteCarlo, ProbabilityCalculation, Posterior, fit, posterior_of, credible_interval
from .utils import Config, ProbabilityMassVector
from .trainers import QueryEngine, QueryResponse
