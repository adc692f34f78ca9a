"""Pairwise rank learning: L1-regularized logistic regression on metric
differences between engaged and non-engaged plans."""

from __future__ import annotations

import json
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.exceptions import NotFittedError

from inciplan.domain import DomainError
from inciplan.associator.metrics import (
    METRIC_VECTOR_LENGTH,
    evaluate_metrics,
    feature_names,
)
from inciplan.associator.plans import PlanKeyMatrix
from inciplan.associator.query import TrafficQuery

RANK_MODEL_FORMAT_VERSION = 1


def build_pairwise_dataset(
    records: Sequence[tuple[TrafficQuery, str]],
    key_matrix: PlanKeyMatrix,
) -> tuple[np.ndarray, np.ndarray]:
    """Difference vectors x(q, engaged) - x(q, other), labeled 1, plus their
    exact negations labeled 0."""
    X: list[np.ndarray] = []
    y: list[int] = []
    for query, engaged in records:
        if engaged not in key_matrix.plans:
            raise DomainError(f"engagement record references unknown plan {engaged!r}")
        engaged_vec = evaluate_metrics(query.tti_sequence, key_matrix.key_row(engaged))
        for other in key_matrix.plans:
            if other == engaged:
                continue
            other_vec = evaluate_metrics(query.tti_sequence, key_matrix.key_row(other))
            diff = engaged_vec - other_vec
            X.append(diff)
            y.append(1)
            X.append(-diff)
            y.append(0)
    if not X:
        raise DomainError("pairwise dataset is empty")
    return np.stack(X), np.array(y)


def _stable_sigmoid(scores: np.ndarray) -> np.ndarray:
    """P(label=1|score) with p(s) + p(-s) == 1 bit-exactly.

    Nonnegative scores use u = 1/(1+exp(-s)); negative ones use 1 - u(-s),
    which Sterbenz's lemma makes exact because u is in [1/2, 1].
    """
    scores = np.asarray(scores, dtype=float)
    out = np.empty_like(scores)
    nonneg = scores >= 0
    out[nonneg] = 1.0 / (1.0 + np.exp(-scores[nonneg]))
    out[~nonneg] = 1.0 - 1.0 / (1.0 + np.exp(scores[~nonneg]))
    return out


class PairwiseRankLR(BaseEstimator, ClassifierMixin):
    """L1-penalized logistic regression over difference vectors, no intercept.

    Objective: sum-NLL(w) + l1_penalty * ||w||_1, minimized by proximal
    gradient (ISTA) with soft-thresholding; converged when the largest
    parameter change drops below ``tol``. No intercept keeps the scorer
    antisymmetric under query-key role swaps.
    """

    def __init__(self, l1_penalty: float = 1.0, max_iter: int = 100000, tol: float = 1e-8):
        self.l1_penalty = l1_penalty
        self.max_iter = max_iter
        self.tol = tol

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        if X.ndim != 2 or X.shape[0] != y.shape[0]:
            raise DomainError(f"bad pairwise shapes: {X.shape} vs {y.shape}")
        if not ((y == 0) | (y == 1)).all():
            raise DomainError("labels must be 0/1")
        if np.sum(y == 1) == 0 or np.sum(y == 0) == 0:
            raise DomainError("need at least one positive and one negative sample")
        n, d = X.shape
        # Lipschitz bound of the sum-loss gradient: lambda_max(X'X) / 4
        gram = X.T @ X
        lipschitz = float(np.linalg.eigvalsh(gram)[-1]) / 4.0
        if lipschitz == 0.0:
            self.coef_ = np.zeros(d)
            self.n_iter_ = 0
            return self
        step = 1.0 / lipschitz
        threshold = self.l1_penalty * step
        # FISTA: accelerated proximal gradient with function restart
        w = np.zeros(d)
        z = w.copy()
        momentum = 1.0
        for iteration in range(self.max_iter):
            grad = X.T @ (_stable_sigmoid(X @ z) - y)
            candidate = z - step * grad
            new_w = np.sign(candidate) * np.maximum(np.abs(candidate) - threshold, 0.0)
            delta = float(np.max(np.abs(new_w - w)))
            new_momentum = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * momentum * momentum))
            if np.dot(z - new_w, new_w - w) > 0:  # restart when momentum overshoots
                z = new_w.copy()
                momentum = 1.0
            else:
                z = new_w + ((momentum - 1.0) / new_momentum) * (new_w - w)
                momentum = new_momentum
            w = new_w
            if delta < self.tol:
                break
        self.coef_ = w
        self.n_iter_ = iteration + 1
        return self

    def _check_fitted(self):
        if not hasattr(self, "coef_"):
            raise NotFittedError("rank model is not fitted")

    def decision_function(self, X) -> np.ndarray:
        self._check_fitted()
        return np.asarray(X, dtype=float) @ self.coef_

    def predict_proba(self, X) -> np.ndarray:
        p1 = _stable_sigmoid(self.decision_function(X))
        return np.column_stack([1.0 - p1, p1])

    def predict(self, X) -> np.ndarray:
        return (self.decision_function(X) > 0).astype(int)

    def ranking_accuracy(self, X, y) -> float:
        scores = self.decision_function(X)
        y = np.asarray(y)
        return float(np.mean((scores > 0) == (y == 1)))

    def loss_gradient(self, X, y) -> np.ndarray:
        """Gradient of the (unpenalized) sum log-loss at the fitted weights."""
        self._check_fitted()
        X = np.asarray(X, dtype=float)
        return X.T @ (_stable_sigmoid(X @ self.coef_) - np.asarray(y, dtype=float))

    def kkt_violation(self, X, y) -> float:
        """Largest L1 subgradient violation (0 = exactly stationary)."""
        grad = self.loss_gradient(X, y)
        worst = 0.0
        for j, w_j in enumerate(self.coef_):
            if w_j == 0.0:
                worst = max(worst, abs(grad[j]) - self.l1_penalty)
            else:
                worst = max(worst, abs(grad[j] + self.l1_penalty * np.sign(w_j)))
        return worst


def score_plan(query: TrafficQuery, key_row: np.ndarray, weights: np.ndarray) -> float:
    """Recommendation score: learned weights dotted with the metric vector."""
    return float(evaluate_metrics(query.tti_sequence, key_row) @ weights)


def score_all_plans(
    query: TrafficQuery, key_matrix: PlanKeyMatrix, weights: np.ndarray
) -> dict[str, float]:
    return {
        plan: score_plan(query, key_matrix.key_row(plan), weights)
        for plan in key_matrix.plans
    }


def save_rank_model(path, weights: np.ndarray, l1_penalty: float) -> None:
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (METRIC_VECTOR_LENGTH,):
        raise DomainError(f"rank model needs {METRIC_VECTOR_LENGTH} weights")
    doc = {
        "format_version": RANK_MODEL_FORMAT_VERSION,
        "l1_penalty": l1_penalty,
        "features": [
            {"name": name, "weight": float(w)}
            for name, w in zip(feature_names(), weights)
        ],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_rank_model(path) -> tuple[np.ndarray, float]:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("format_version") != RANK_MODEL_FORMAT_VERSION:
        raise DomainError(
            f"unsupported rank model format_version: {doc.get('format_version')!r}"
        )
    names = [f["name"] for f in doc["features"]]
    if names != feature_names():
        raise DomainError("rank model feature manifest does not match expected order")
    weights = np.array([f["weight"] for f in doc["features"]], dtype=float)
    return weights, float(doc["l1_penalty"])
