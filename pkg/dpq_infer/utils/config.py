import json
import math

from dpq_infer.exceptions import ParseError


class Config:

    # Experiment logging specifics
    NAME = "dpq"
    SEED = 0
    LOG_DIR = None

    # Workload
    N = 100
    QUERIES = 1000
    CUBE_MAX = 1000
    # None is an unbounded overall budget
    BOUND = None
    EPSILON_RANGE = (50.0, 1000.0)
    DELTA = 0.2
    BOOTSTRAP_ALPHA = 0.3

    # Inference
    METHOD = "pc"
    GAMMA = 0.01
    # None sizes Monte Carlo runs from the expected error bound
    SAMPLES = None
    MIN_SAMPLE_SIZE = 10000
    PC_THRESHOLD = 1e9
    ESTIMATOR = "blue"
    RANK_TOL = 1e-10

    # Timing sweep
    TIMING_SIZES = (100, 1000, 10000)
    TIMING_SENSITIVITY = 10

    KEYS = (
        "name", "seed", "log_dir", "n", "queries", "cube_max", "bound",
        "epsilon_range", "delta", "bootstrap_alpha", "method", "gamma",
        "samples", "min_sample_size", "pc_threshold", "estimator",
        "rank_tol", "timing_sizes", "timing_sensitivity",
    )

    def __init__(self, **overrides):
        for key, value in overrides.items():
            if key.lower() not in self.KEYS:
                raise ParseError("unknown config key {!r}".format(key))
            setattr(self, key.upper(), value)
        self._validate()

    def _validate(self):
        if self.METHOD not in ("pc", "mc", "auto"):
            raise ParseError("method must be pc, mc or auto, got {!r}".format(self.METHOD))
        if self.ESTIMATOR not in ("blue", "ols"):
            raise ParseError("estimator must be blue or ols, got {!r}".format(self.ESTIMATOR))
        if not 0 < self.GAMMA < 1:
            raise ParseError("gamma must lie in (0, 1), got {}".format(self.GAMMA))
        if not 0 < self.DELTA < 1:
            raise ParseError("delta must lie in (0, 1), got {}".format(self.DELTA))
        if len(self.EPSILON_RANGE) != 2 or not 0 < self.EPSILON_RANGE[0] <= self.EPSILON_RANGE[1]:
            raise ParseError("epsilon_range must be [low, high] with 0 < low <= high")
        self.EPSILON_RANGE = tuple(float(e) for e in self.EPSILON_RANGE)
        if self.BOUND is not None and not self.BOUND > 0:
            raise ParseError("bound must be positive, got {}".format(self.BOUND))
        if int(self.N) < 1 or int(self.QUERIES) < 0:
            raise ParseError("n must be positive and queries nonnegative")

    @property
    def bound(self):
        return math.inf if self.BOUND is None else float(self.BOUND)

    def inference_params(self):
        return dict(
            gamma=self.GAMMA,
            samples=self.SAMPLES,
            min_sample_size=self.MIN_SAMPLE_SIZE,
            threshold=self.PC_THRESHOLD,
            rank_tol=self.RANK_TOL,
        )

    def to_dict(self):
        return {key: getattr(self, key.upper()) for key in self.KEYS}

    @classmethod
    def from_dict(cls, d):
        return cls(**d)

    @classmethod
    def from_json(cls, path):
        try:
            with open(path, "r") as f:
                d = json.load(f)
        except ValueError as e:
            raise ParseError(str(e), path)
        if not isinstance(d, dict):
            raise ParseError("config must be a JSON object", path)
        try:
            return cls.from_dict(d)
        except ParseError as e:
            raise ParseError(str(e), path)

    @classmethod
    def unbounded(cls, **overrides):
        """Bootstrapped history at 0.3, 2 epsilon uniform on [50, 1000]."""
        params = dict(bound=None, epsilon_range=(50.0, 1000.0), delta=0.2,
                      bootstrap_alpha=0.3)
        params.update(overrides)
        return cls(**params)

    @classmethod
    def bounded(cls, **overrides):
        """Overall budget 1, 2 epsilon uniform on [1, 1000], no bootstrap history."""
        params = dict(bound=1.0, epsilon_range=(1.0, 1000.0), delta=0.2,
                      bootstrap_alpha=None)
        params.update(overrides)
        return cls(**params)
