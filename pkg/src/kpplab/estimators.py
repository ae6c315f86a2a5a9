"""scikit-learn style wrappers around the eigenvalue and speed solvers.

The "data" here is a list of coefficient pairs ``(r, b)`` (expressions,
numbers or Coefficient objects), not a feature matrix.  ``fit`` resolves and
validates the pairs and ``predict`` returns one number per pair, so the
wrappers cooperate with ``get_params``/``set_params``/``clone`` but not with
pipelines that expect numeric arrays.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .coeffs import as_coefficient
from .eigen import coefficient_period, principal_eigenvalue, richardson_eigenvalue
from .speeds import spreading_speed

__all__ = ["PeriodicEigenvalue", "SpreadingSpeed", "check_coefficient_pairs"]


def check_coefficient_pairs(X):
    """Normalise X to a list of (r, b) Coefficient pairs.

    Accepts a single pair, a bare ``r`` (b = 0) or a sequence of either.
    """
    if isinstance(X, (str, int, float)) or callable(X):
        X = [X]
    elif isinstance(X, tuple) and len(X) == 2 and not isinstance(X[0], (tuple, list)):
        X = [X]
    pairs = []
    for item in X:
        if isinstance(item, (tuple, list)):
            if len(item) != 2:
                raise ValueError(f"expected (r, b) pairs, got an item of length {len(item)}")
            r, b = item
        else:
            r, b = item, 0.0
        pairs.append((as_coefficient(r), as_coefficient(b)))
    if not pairs:
        raise ValueError("no coefficient pairs given")
    return pairs


class PeriodicEigenvalue(BaseEstimator):
    """Principal periodic eigenvalue k_lam[r; b] for each (r, b)."""

    def __init__(self, lam=0.0, n=1024, tol=1e-10, richardson=False):
        self.lam = lam
        self.n = n
        self.tol = tol
        self.richardson = richardson

    def fit(self, X, y=None):
        if int(self.n) < 8:
            raise ValueError(f"n must be at least 8, got {self.n}")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        self.pairs_ = check_coefficient_pairs(X)
        self.periods_ = np.array([coefficient_period(r, b) for r, b in self.pairs_])
        self.n_pairs_ = len(self.pairs_)
        return self

    def predict(self, X=None):
        check_is_fitted(self, "pairs_")
        pairs = self.pairs_ if X is None else check_coefficient_pairs(X)
        solve = richardson_eigenvalue if self.richardson else principal_eigenvalue
        return np.array([solve(r, b, float(self.lam), int(self.n), float(self.tol)) for r, b in pairs])

    def fit_predict(self, X, y=None):
        return self.fit(X).predict()


class SpreadingSpeed(BaseEstimator):
    """Spreading speed per pair; extinct problems map to -inf.

    ``transform`` returns both directions as columns (c+, c-).
    """

    def __init__(self, direction="right", n=1024, eig_tol=1e-10, richardson=True):
        self.direction = direction
        self.n = n
        self.eig_tol = eig_tol
        self.richardson = richardson

    def fit(self, X, y=None):
        if self.direction not in ("right", "left"):
            raise ValueError(f"direction must be 'right' or 'left', got {self.direction!r}")
        self.pairs_ = check_coefficient_pairs(X)
        self.results_ = None
        return self

    def _speed(self, r, b, direction):
        res = spreading_speed(r, b, direction, n=int(self.n), eig_tol=float(self.eig_tol), richardson=self.richardson)
        return float(res)

    def predict(self, X=None):
        check_is_fitted(self, "pairs_")
        pairs = self.pairs_ if X is None else check_coefficient_pairs(X)
        return np.array([self._speed(r, b, self.direction) for r, b in pairs])

    def transform(self, X=None):
        check_is_fitted(self, "pairs_")
        pairs = self.pairs_ if X is None else check_coefficient_pairs(X)
        return np.array([[self._speed(r, b, d) for d in ("right", "left")] for r, b in pairs])

    def fit_transform(self, X, y=None):
        return self.fit(X).transform()
