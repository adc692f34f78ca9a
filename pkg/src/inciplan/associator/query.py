"""Normalizer turning speed observations and forecasts into TTI queries."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from inciplan.domain import DomainError, NetworkModel
from inciplan.ingest.features import tti_vector


@dataclass(frozen=True)
class TrafficQuery:
    """Current + six predicted TTI rows over the target segments."""

    base_time: int
    tti_sequence: np.ndarray  # [7 x targets], every entry >= 1

    def __post_init__(self):
        seq = np.asarray(self.tti_sequence, dtype=float)
        if seq.ndim != 2 or seq.shape[0] != 7:
            raise DomainError(f"query needs 7 rows, got shape {seq.shape}")
        if np.any(seq < 1.0):
            raise DomainError("TTI entries must be >= 1")
        object.__setattr__(self, "tti_sequence", seq)


def build_query(
    base_time: int,
    current_speeds: np.ndarray,
    forecast_speeds: np.ndarray,
    model: NetworkModel,
) -> TrafficQuery:
    """Convert current + forecast target-segment speeds (mph) to a TTI query."""
    reference = model.reference_vector()[model.target_indices()]
    forecast_speeds = np.asarray(forecast_speeds, dtype=float)
    if forecast_speeds.shape != (6, len(reference)):
        raise DomainError(
            f"forecast must be [6 x {len(reference)}], got {forecast_speeds.shape}"
        )
    rows = [tti_vector(np.asarray(current_speeds, dtype=float), reference)]
    rows.extend(tti_vector(forecast_speeds[h], reference) for h in range(6))
    return TrafficQuery(base_time=base_time, tti_sequence=np.stack(rows))
