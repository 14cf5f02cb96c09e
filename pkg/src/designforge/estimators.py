"""Estimator-style wrappers for the pool-fitting pipeline.

Only the pool fitter maps naturally onto ``fit``: the candidate pool plays
the role of ``X`` and the fitted weights are learned state. Everything else
in the library is a pure construction and stays a plain function.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError
from sklearn.utils.validation import check_array

from .builders import caratheodory_prune, fit_weights_on_pool
from .kernel import WeightedPointSet
from .verify import DEFAULT_TOL, verify_design


class PoolDesignFitter(BaseEstimator):
    """Fit nonnegative weights on a candidate pool, then prune to a small support.

    Parameters
    ----------
    measure : "sphere" or "gaussian"
    strength : polynomial degree to match
    prune : run Caratheodory pruning after the fit
    """

    def __init__(self, measure: str = "sphere", strength: int = 2, prune: bool = True):
        self.measure = measure
        self.strength = strength
        self.prune = prune

    def fit(self, X, y=None):
        pool = check_array(X, dtype=np.float64)
        design = fit_weights_on_pool(pool, self.measure, self.strength)
        if self.prune:
            design = caratheodory_prune(design, self.strength)
        self.design_ = design
        self.support_ = design.points
        self.weights_ = design.weights
        self.n_features_in_ = pool.shape[1]
        return self

    def _check_fitted(self) -> WeightedPointSet:
        if not hasattr(self, "design_"):
            raise NotFittedError("call fit first")
        return self.design_

    def score(self, X=None, y=None) -> float:
        """Negative worst moment residual of the fitted design (0 is perfect)."""
        rep = verify_design(self._check_fitted(), self.strength, "float", DEFAULT_TOL)
        return -rep.max_residual()
