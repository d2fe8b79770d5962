from .blue import EstimatorWeights, estimator_matrix, fit
from .monte_carlo import MonteCarlo, mc_noise_pmv
from .probability_calculation import ProbabilityCalculation, pc_lengths, pc_noise_pmv
from .posterior import Posterior, posterior_of, default_sample_size
from .interval import credible_interval, confidence_of, tail_probability
