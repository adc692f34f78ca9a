"""Query-key closeness metrics: 3 families x 5 TTI thresholds x 7 horizons."""

from __future__ import annotations

import numpy as np

from inciplan.domain import DomainError

TTI_THRESHOLDS = (1.6, 2.0, 2.5, 5.0, 10.0)
METRIC_TYPES = ("precision", "rule", "similarity")
N_HORIZONS = 7  # the current step plus six 5-minute predictions
METRIC_VECTOR_LENGTH = N_HORIZONS * len(TTI_THRESHOLDS) * len(METRIC_TYPES)


def _check_threshold(threshold: float) -> None:
    if threshold not in TTI_THRESHOLDS:
        raise DomainError(
            f"unknown TTI threshold {threshold}; expected one of {TTI_THRESHOLDS}"
        )


def _is_null_key(key_row: np.ndarray) -> bool:
    return not np.any(key_row)


def metric_precision(query_row: np.ndarray, key_row: np.ndarray, threshold: float) -> float:
    """1 if any incident-key segment crosses the TTI threshold.

    The null plan's triggering set is the whole network, so it scores the
    fraction of segments still below threshold instead.
    """
    _check_threshold(threshold)
    positive = np.asarray(query_row) >= threshold
    if _is_null_key(key_row):
        return float(np.mean(~positive))
    return 1.0 if np.any(positive & (key_row == 1)) else 0.0


def metric_rule(query_row: np.ndarray, key_row: np.ndarray, threshold: float) -> float:
    """1 iff both an incident segment and an affected arterial are congested.

    For the null plan: 1 iff nothing in the network is congested.
    """
    _check_threshold(threshold)
    positive = np.asarray(query_row) >= threshold
    if _is_null_key(key_row):
        return 0.0 if np.any(positive) else 1.0
    has_incident = np.any(positive & (key_row == 1))
    has_arterial = np.any(positive & (key_row == 2))
    return 1.0 if has_incident and has_arterial else 0.0


def metric_similarity(query_row: np.ndarray, key_row: np.ndarray, threshold: float) -> float:
    """Inverse euclidean distance between the normalized query and binary key.

    The query is clipped above at the threshold and min-max scaled over the
    TTI range [1, threshold], so free-flow maps to 0 (matching the null key)
    and at-threshold congestion to 1; 1/(1+d) bounds the result to (0, 1].
    """
    _check_threshold(threshold)
    clipped = np.minimum(np.asarray(query_row, dtype=float), threshold)
    normalized = (clipped - 1.0) / (threshold - 1.0)
    binary_key = (np.asarray(key_row) > 0).astype(float)
    return float(1.0 / (1.0 + np.linalg.norm(normalized - binary_key)))


_METRIC_FUNCS = {
    "precision": metric_precision,
    "rule": metric_rule,
    "similarity": metric_similarity,
}


def evaluate_metrics(tti_sequence: np.ndarray, key_row: np.ndarray) -> np.ndarray:
    """All 105 metrics for one query (7 x segments TTI) against one key row.

    Horizon-major ordering: 7 horizons x [5 thresholds x 3 metric types].
    """
    tti_sequence = np.asarray(tti_sequence, dtype=float)
    if tti_sequence.ndim != 2 or tti_sequence.shape[0] != N_HORIZONS:
        raise DomainError(
            f"query must have {N_HORIZONS} horizon rows, got {tti_sequence.shape}"
        )
    if tti_sequence.shape[1] != len(key_row):
        raise DomainError(
            f"query width {tti_sequence.shape[1]} != key width {len(key_row)}"
        )
    values = np.empty(METRIC_VECTOR_LENGTH)
    i = 0
    for h in range(N_HORIZONS):
        row = tti_sequence[h]
        for threshold in TTI_THRESHOLDS:
            for metric in METRIC_TYPES:
                values[i] = _METRIC_FUNCS[metric](row, key_row, threshold)
                i += 1
    return values


def feature_names() -> list[str]:
    """Manifest names like '5min-2-similarity', horizon-major order."""
    names = []
    for h in range(N_HORIZONS):
        for threshold in TTI_THRESHOLDS:
            for metric in METRIC_TYPES:
                names.append(f"{5 * h}min-{threshold:g}-{metric}")
    return names
