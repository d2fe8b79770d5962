from .config import Config
from .distributions import ProbabilityMassVector, convolve, laplace_pmv
