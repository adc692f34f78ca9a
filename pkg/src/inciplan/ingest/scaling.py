"""Min-max scaling fitted on the training split only."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from inciplan.domain import DomainError


class ClampedMinMaxScaler(BaseEstimator, TransformerMixin):
    """Column-wise min-max scaler that clamps unseen extremes into [0, 1].

    Degenerate columns (max == min) scale to 0. ``inverse_transform`` is the
    exact inverse on in-range data; clamped values invert to the range edge.
    A 1-D input whose length matches the fitted feature count is treated as
    a single row; with one fitted feature it is a column of samples.
    """

    def __init__(self, clip: bool = True):
        self.clip = clip

    def fit(self, X, y=None):
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        if X.shape[0] == 0:
            raise DomainError("scaler fit requires at least one frame")
        self.min_ = X.min(axis=0)
        self.max_ = X.max(axis=0)
        self.range_ = self.max_ - self.min_
        self.n_features_ = X.shape[1]
        return self

    def _check_fitted(self):
        if not hasattr(self, "min_"):
            raise NotFittedError("scaler is not fitted")

    def _as_rows(self, X) -> tuple[np.ndarray, str]:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            if len(X) == self.n_features_:
                return X[None, :], "row"
            if self.n_features_ == 1:
                return X[:, None], "column"
            raise DomainError(
                f"1-d input of length {len(X)} does not fit {self.n_features_} features"
            )
        if X.shape[1] != self.n_features_:
            raise DomainError(
                f"input has {X.shape[1]} features, scaler was fit with {self.n_features_}"
            )
        return X, "matrix"

    def transform(self, X):
        self._check_fitted()
        rows, kind = self._as_rows(X)
        safe_range = np.where(self.range_ > 0, self.range_, 1.0)
        out = (rows - self.min_) / safe_range
        out = np.where(self.range_ > 0, out, 0.0)
        if self.clip:
            out = np.clip(out, 0.0, 1.0)
        return self._shape_back(out, kind)

    def inverse_transform(self, X):
        self._check_fitted()
        rows, kind = self._as_rows(X)
        out = rows * self.range_ + self.min_
        return self._shape_back(out, kind)

    @staticmethod
    def _shape_back(out: np.ndarray, kind: str) -> np.ndarray:
        if kind == "row":
            return out[0]
        if kind == "column":
            return out[:, 0]
        return out
