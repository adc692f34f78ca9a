"""L1-regularized linear regression by cycled coordinate descent.

Objective: (1/(2n)) * ||y - Xw - b||^2 + alpha * ||w||_1, so the
all-zero deactivation bound is alpha >= max|X'y|/n on centered data.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.exceptions import NotFittedError
from sklearn.model_selection import KFold

from inciplan.domain import DomainError


def soft_threshold(value: float, threshold: float) -> float:
    if value > threshold:
        return value - threshold
    if value < -threshold:
        return value + threshold
    return 0.0


def coordinate_descent(
    X: np.ndarray,
    y: np.ndarray,
    alpha: float,
    max_iter: int = 2000,
    tol: float = 1e-10,
    warm_start: np.ndarray | None = None,
) -> tuple[np.ndarray, float]:
    """Solve the lasso on centered data; returns (weights, intercept).

    Cycles full sweeps with active-set sweeps in between (only currently
    nonzero coordinates), which keeps sparse fits cheap; a final full sweep
    below tolerance certifies convergence.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, d = X.shape
    x_mean = X.mean(axis=0)
    y_mean = y.mean()
    Xc = X - x_mean
    yc = y - y_mean
    col_sq = (Xc * Xc).sum(axis=0) / n
    w = np.zeros(d) if warm_start is None else warm_start.copy()
    residual = yc - Xc @ w if warm_start is not None else yc.copy()

    def sweep(coords) -> float:
        nonlocal residual
        max_delta = 0.0
        for j in coords:
            if col_sq[j] == 0.0:
                continue
            old = w[j]
            rho = (Xc[:, j] @ residual) / n + col_sq[j] * old
            new = soft_threshold(rho, alpha) / col_sq[j]
            if new != old:
                residual = residual - Xc[:, j] * (new - old)
                w[j] = new
                max_delta = max(max_delta, abs(new - old))
        return max_delta

    every = np.arange(d)
    for _ in range(max_iter):
        if sweep(every) < tol:
            break
        for _ in range(max_iter):
            active = np.nonzero(w)[0]
            if active.size == 0 or sweep(active) < tol:
                break
    intercept = y_mean - x_mean @ w
    return w, float(intercept)


def alpha_deactivation_bound(X: np.ndarray, y: np.ndarray) -> float:
    """Smallest alpha at which every coordinate soft-thresholds to zero."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    Xc = X - X.mean(axis=0)
    yc = y - y.mean()
    return float(np.max(np.abs(Xc.T @ yc)) / X.shape[0])


class LassoRegression(BaseEstimator, RegressorMixin):
    """Coordinate-descent lasso with the estimator interface.

    ``alpha=None`` selects the penalty from a logarithmic grid below the
    deactivation bound by 5-fold cross-validation on the training data.
    """

    def __init__(
        self,
        alpha: float | None = None,
        n_alphas: int = 10,
        alpha_min_ratio: float = 1e-2,
        cv_folds: int = 5,
        max_iter: int = 2000,
        tol: float = 1e-10,
    ):
        self.alpha = alpha
        self.n_alphas = n_alphas
        self.alpha_min_ratio = alpha_min_ratio
        self.cv_folds = cv_folds
        self.max_iter = max_iter
        self.tol = tol

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        if X.ndim != 2 or X.shape[0] != y.shape[0]:
            raise DomainError(f"bad lasso input shapes: {X.shape} vs {y.shape}")
        if np.ptp(y) == 0.0:
            # degenerate constant target
            self.coef_ = np.zeros(X.shape[1])
            self.intercept_ = float(y.mean()) if y.size else 0.0
            self.alpha_ = self.alpha if self.alpha is not None else 0.0
            return self
        if self.alpha is not None:
            self.alpha_ = float(self.alpha)
        else:
            self.alpha_ = self._select_alpha(X, y)
        self.coef_, self.intercept_ = coordinate_descent(
            X, y, self.alpha_, self.max_iter, self.tol
        )
        return self

    def _select_alpha(self, X, y) -> float:
        """Largest alpha within one standard error of the best CV score."""
        if X.shape[0] < 2 * self.cv_folds:
            raise DomainError(
                f"need at least {2 * self.cv_folds} samples for {self.cv_folds}-fold CV"
            )
        alpha_max = alpha_deactivation_bound(X, y)
        if alpha_max == 0.0:
            return 0.0
        grid = alpha_max * np.logspace(0, np.log10(self.alpha_min_ratio), self.n_alphas)
        kfold = KFold(n_splits=self.cv_folds, shuffle=False)
        splits = list(kfold.split(X))
        # warm-start down the (descending) grid with a loose path tolerance;
        # only the final refit at the chosen alpha runs to full convergence
        warm: list[np.ndarray | None] = [None] * len(splits)
        means, stderrs = [], []
        worsening = 0
        for alpha in grid:
            errors = []
            for k, (train, test) in enumerate(splits):
                w, b = coordinate_descent(
                    X[train], y[train], alpha,
                    max_iter=min(self.max_iter, 200),
                    tol=max(self.tol, 1e-6),
                    warm_start=warm[k],
                )
                warm[k] = w
                pred = X[test] @ w + b
                errors.append(float(np.mean((pred - y[test]) ** 2)))
            means.append(np.mean(errors))
            stderrs.append(np.std(errors) / np.sqrt(len(errors)))
            if len(means) > 1 and means[-1] > means[-2]:
                worsening += 1
                if worsening >= 2:
                    break  # smaller penalties are only getting worse
            else:
                worsening = 0
        best = int(np.argmin(means))
        cutoff = means[best] + stderrs[best]
        for alpha, mean_err in zip(grid, means):  # grid is descending
            if mean_err <= cutoff:
                return float(alpha)
        return float(grid[best])

    def predict(self, X):
        if not hasattr(self, "coef_"):
            raise NotFittedError("lasso is not fitted")
        return np.asarray(X, dtype=float) @ self.coef_ + self.intercept_


def kkt_violation(X, y, w, intercept, alpha) -> float:
    """Largest KKT violation of a lasso solution (0 = exactly stationary).

    Zero coordinates need |grad_j| <= alpha; active ones need
    grad_j + alpha * sign(w_j) = 0, with grad the (1/n)-scaled residual
    correlation.
    """
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    grad = -(X.T @ (y - X @ w - intercept)) / n
    worst = 0.0
    for j in range(X.shape[1]):
        if w[j] == 0.0:
            worst = max(worst, abs(grad[j]) - alpha)
        else:
            worst = max(worst, abs(grad[j] + alpha * np.sign(w[j])))
    return worst


def build_lagged_matrix(features: np.ndarray, lookback: int) -> np.ndarray:
    """Stack [X_{t-p}, ..., X_t] rows for the linear baseline."""
    n, width = features.shape
    rows = [
        features[t - lookback + 1 : t + 1].ravel()
        for t in range(lookback - 1, n)
    ]
    return np.stack(rows)
