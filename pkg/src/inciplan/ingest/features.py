"""Segment-level congestion features and calendar encodings."""

from __future__ import annotations

import datetime as _dt
import math
from dataclasses import dataclass

import numpy as np

from inciplan.domain import DomainError, NetworkModel, SpeedFrame

MINUTES_PER_DAY = 1440
TIME_OF_DAY_PERIOD = MINUTES_PER_DAY // 5  # 288 five-minute steps
WEEKS_PERIOD = 52
MONTHS_PERIOD = 12

# day-group one-hot layout: Monday, Tue-Thu, Friday, weekend/holiday
DAY_GROUPS = ("monday", "tue_thu", "friday", "weekend_holiday")

TIME_FEATURE_WIDTH = 6 + len(DAY_GROUPS) + 1  # 3 sin/cos pairs + one-hot + holiday flag


def reference_speed_from_observations(observations) -> float:
    """0.85-quantile of observed speeds, interpolated between order statistics."""
    obs = np.asarray(list(observations), dtype=float)
    if obs.size == 0:
        raise DomainError("cannot compute reference speed from empty observations")
    return float(np.quantile(obs, 0.85))


def tti(speed: float, v_ref: float) -> float:
    """Travel time index: reference over observed speed, floored at 1."""
    if speed <= 0 or v_ref <= 0:
        raise DomainError(f"tti requires positive speeds, got speed={speed}, v_ref={v_ref}")
    return max(v_ref / speed, 1.0)


def tti_vector(speeds: np.ndarray, reference: np.ndarray) -> np.ndarray:
    speeds = np.asarray(speeds, dtype=float)
    reference = np.asarray(reference, dtype=float)
    if np.any(speeds <= 0) or np.any(reference <= 0):
        raise DomainError("tti requires positive speeds and reference speeds")
    return np.maximum(reference / speeds, 1.0)


def slowdown(frame: SpeedFrame, model: NetworkModel, segment: str) -> float:
    """Mean upstream speed minus own speed, floored at 0.

    Segments with no upstream neighbors report 0 (no spillback evidence).
    """
    ups = model.upstream_of(segment)
    if not ups:
        return 0.0
    own = frame.speeds[model.index_of(segment)]
    mean_up = float(np.mean([frame.speeds[model.index_of(u)] for u in ups]))
    return max(mean_up - own, 0.0)


def slowdown_vector(frame: SpeedFrame, model: NetworkModel) -> np.ndarray:
    return np.array([slowdown(frame, model, s) for s in model.segments])


def cyclic_encode(index: int, period: int) -> np.ndarray:
    """Map a cyclic index onto the unit circle as [sin, cos]."""
    if period <= 0:
        raise DomainError(f"cyclic period must be positive, got {period}")
    if not 0 <= index < period:
        raise DomainError(f"cyclic index {index} out of range [0, {period})")
    angle = 2.0 * math.pi * index / period
    return np.array([math.sin(angle), math.cos(angle)])


def day_group_encode(day_of_week: int, is_holiday: bool) -> np.ndarray:
    """One-hot day group; holiday always falls in the weekend/holiday group.

    day_of_week follows the Monday=0 .. Sunday=6 convention.
    """
    if not 0 <= day_of_week <= 6:
        raise DomainError(f"day_of_week must be in 0..6, got {day_of_week}")
    onehot = np.zeros(len(DAY_GROUPS))
    if is_holiday or day_of_week >= 5:
        onehot[3] = 1.0
    elif day_of_week == 0:
        onehot[0] = 1.0
    elif day_of_week == 4:
        onehot[2] = 1.0
    else:
        onehot[1] = 1.0
    return onehot


def _calendar(timestamp: int) -> _dt.datetime:
    return _dt.datetime.fromtimestamp(timestamp * 60, tz=_dt.timezone.utc)


def time_features(timestamp: int, holidays: frozenset[str] = frozenset()) -> np.ndarray:
    """Cyclic time-of-day/week/month pairs + day-group one-hot + holiday flag.

    ``holidays`` is a set of ISO dates ("YYYY-MM-DD").
    """
    when = _calendar(timestamp)
    tod = (timestamp % MINUTES_PER_DAY) // 5
    week = min(when.isocalendar().week - 1, WEEKS_PERIOD - 1)
    month = when.month - 1
    is_holiday = when.date().isoformat() in holidays
    parts = [
        cyclic_encode(tod, TIME_OF_DAY_PERIOD),
        cyclic_encode(week, WEEKS_PERIOD),
        cyclic_encode(month, MONTHS_PERIOD),
        day_group_encode(when.weekday(), is_holiday),
        np.array([1.0 if is_holiday else 0.0]),
    ]
    return np.concatenate(parts)


@dataclass(frozen=True)
class FeatureFrame:
    """Fused, model-ready feature snapshot for one 5-minute timestamp."""

    timestamp: int
    speeds_scaled: np.ndarray
    tti: np.ndarray
    slowdown: np.ndarray
    incident_status: np.ndarray
    weather_scaled: np.ndarray
    time_features: np.ndarray

    def validate(self, model: NetworkModel) -> None:
        n = model.n_segments
        for name in ("speeds_scaled", "tti", "slowdown", "incident_status"):
            vec = getattr(self, name)
            if vec.shape != (n,):
                raise DomainError(f"{name} has shape {vec.shape}, expected ({n},)")
        if np.any(self.tti < 1.0):
            raise DomainError("tti entries must be >= 1")
        if np.any(self.slowdown < 0.0):
            raise DomainError("slowdown entries must be >= 0")
        if self.weather_scaled.shape != (7,):
            raise DomainError("weather_scaled must have 7 entries")
        if self.time_features.shape != (TIME_FEATURE_WIDTH,):
            raise DomainError(
                f"time_features must have {TIME_FEATURE_WIDTH} entries"
            )
