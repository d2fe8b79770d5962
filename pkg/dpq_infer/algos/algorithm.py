class InferenceMethod(object):
    """High level interface for noise-distribution approximations."""

    name = None

    def noise_pmv(self, weights, history):
        """Mass vector of the estimator noise A.N for the given weights."""
        raise NotImplementedError

    def get_diagnostics(self):
        """Statistics of the most recent approximation."""
        return {}
