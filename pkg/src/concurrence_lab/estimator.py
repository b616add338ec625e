"""scikit-learn compatible front end for the local concurrence measurement.

Each row of ``X`` is one composite pure state (row-major amplitudes).  The
estimator simulates the single-subsystem protocol on every row; ``transform``
returns the measured statistics ``(T, T', T'')`` and ``predict`` the
I-concurrence estimate.
"""

import math

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_state_batch
from .measurement import EXACT
from .protocol import SCHEMES, concurrence, plan, run_plan, statistics
from .report import select_subsystem
from .state import PureBipartiteState, make_state, reduced_density


class LocalConcurrenceEstimator(TransformerMixin, RegressorMixin, BaseEstimator):
    """Estimate I-concurrence from rotations and projections on one subsystem.

    Parameters
    ----------
    dims : tuple of int or None, default=None
        Subsystem dimensions ``(dim_a, dim_b)``.  ``None`` infers a square
        split from the number of features at fit time.
    subsystem : {"auto", "A", "B"}, default="auto"
        Subsystem that is measured; ``"auto"`` picks the smaller one.
    scheme : {"sequential", "parallel"}, default="sequential"
    shots : int or "exact", default="exact"
        Repetitions per measurement setup.
    random_state : int or None, default=0
        Base seed; sample ``i`` uses a seed derived from ``(random_state, i)``.
    normalize : bool, default=True
        Rescale rows to unit norm before measuring.

    Attributes
    ----------
    dims_ : tuple of int
    subsystem_ : str
    plan_ : MeasurementPlan
    n_features_in_ : int
    """

    def __init__(self, dims=None, subsystem="auto", scheme="sequential", shots=EXACT,
                 random_state=0, normalize=True):
        self.dims = dims
        self.subsystem = subsystem
        self.scheme = scheme
        self.shots = shots
        self.random_state = random_state
        self.normalize = normalize

    def _check_params(self, n_features):
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        shots = self.shots
        if shots != EXACT and (
            isinstance(shots, bool) or not isinstance(shots, (int, np.integer)) or shots < 1
        ):
            raise ValueError(f"shots must be a positive integer or 'exact', got {self.shots!r}")
        if self.dims is None:
            side = math.isqrt(n_features)
            if side * side != n_features:
                raise ValueError(f"cannot infer square dims from {n_features} features; pass dims")
            dims = (side, side)
        else:
            dims = tuple(int(d) for d in self.dims)
            if len(dims) != 2 or min(dims) < 1 or dims[0] * dims[1] != n_features:
                raise ValueError(f"dims {self.dims} do not match {n_features} features")
        return dims

    def fit(self, X, y=None):
        X = check_state_batch(X)
        self.dims_ = self._check_params(X.shape[1])
        self.subsystem_ = select_subsystem(self.dims_, self.subsystem)
        measured = self.dims_[0] if self.subsystem_ == "A" else self.dims_[1]
        if measured < 2:
            raise ValueError("measured subsystem must have dimension >= 2")
        self.plan_ = plan(measured, self.scheme)
        self.n_features_in_ = X.shape[1]
        return self

    def _sample_seeds(self, n):
        base = np.random.SeedSequence(self.random_state)
        return [int(s.generate_state(1, np.uint64)[0]) for s in base.spawn(n)]

    def _statistics(self, X):
        check_is_fitted(self, "plan_")
        X = check_state_batch(X, self.n_features_in_)
        seeds = self._sample_seeds(X.shape[0])
        out = []
        for row, seed in zip(X, seeds):
            if self.normalize:
                state = make_state(*self.dims_, row)
            else:
                state = PureBipartiteState(*self.dims_, row)
            rho = reduced_density(state, self.subsystem_)
            results = run_plan(rho, self.plan_, shots=self.shots, seed=seed)
            out.append(statistics(results, self.plan_, shots=self.shots, seed=seed))
        return out

    def transform(self, X):
        """Protocol statistics, shape ``(n_samples, 3)`` with columns ``T, T', T''``."""
        return np.array([[s.T, s.T_prime, s.T_double_prime] for s in self._statistics(X)])

    def predict(self, X):
        """I-concurrence estimates, shape ``(n_samples,)``."""
        return np.array([concurrence(s) for s in self._statistics(X)])
