"""Reference predictors the sequence model is judged against."""

from __future__ import annotations

import numpy as np

from inciplan.domain import DomainError

MINUTES_PER_DAY = 1440
TRAILING_WINDOW_DAYS = 28


class HistoricalAverageBaseline:
    """Same day-of-week, same time-of-day mean over the trailing 28 days.

    Horizon-independent by construction: one profile serves all six steps.
    """

    def __init__(self):
        self._profiles: dict[tuple[int, int], list[tuple[int, np.ndarray]]] = {}

    def fit(self, timestamps, speeds: np.ndarray) -> "HistoricalAverageBaseline":
        for t, row in zip(timestamps, np.asarray(speeds)):
            key = self._slot(int(t))
            self._profiles.setdefault(key, []).append((int(t), row))
        return self

    @staticmethod
    def _slot(t: int) -> tuple[int, int]:
        day_of_week = ((t // MINUTES_PER_DAY) + 3) % 7  # epoch day 0 was a Thursday
        return day_of_week, t % MINUTES_PER_DAY

    def predict(self, t: int, horizon: int = 6) -> np.ndarray:
        rows = []
        for h in range(1, horizon + 1):
            when = t + 5 * h
            window = [
                row
                for past, row in self._profiles.get(self._slot(when), [])
                if when - TRAILING_WINDOW_DAYS * MINUTES_PER_DAY <= past < when
            ]
            if not window:
                raise DomainError(
                    f"no same-day-of-week history in the past {TRAILING_WINDOW_DAYS} days of t={when}"
                )
            rows.append(np.mean(window, axis=0))
        return np.stack(rows)


class LatestObservationBaseline:
    """Persistence: the current speeds repeated for every horizon."""

    def predict(self, current_speeds: np.ndarray, horizon: int = 6) -> np.ndarray:
        current = np.asarray(current_speeds, dtype=float)
        return np.tile(current, (horizon, 1))
