"""Gap filling for speed and weather series."""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from inciplan.domain import DomainError, WeatherRecord


def impute_speed(observations: Mapping[int, float], timeline: Sequence[int]) -> np.ndarray:
    """Fill a 5-minute timeline by carrying the last observation forward.

    Leading gaps take the first observation. ``observations`` maps timestamp
    (epoch minutes) to speed for one segment.
    """
    if not observations:
        raise DomainError("no observations for segment")
    first_value = observations[min(observations)]
    out = np.empty(len(timeline))
    last = first_value
    for i, t in enumerate(timeline):
        if t in observations:
            last = observations[t]
        out[i] = last
    return out


def interpolate_weather(
    records: Sequence[WeatherRecord], timeline: Sequence[int]
) -> list[WeatherRecord]:
    """Produce a gap-free hourly series over ``timeline``.

    Continuous fields are linearly interpolated between observations and held
    flat at the boundaries; the binary pavement flag takes the nearest
    observation's value, ties resolving to the earlier one.
    """
    if not records:
        raise DomainError("no weather records to interpolate")
    records = sorted(records, key=lambda r: r.timestamp)
    times = np.array([r.timestamp for r in records], dtype=float)
    out: list[WeatherRecord] = []
    interpolated = {
        f: np.interp(
            np.asarray(timeline, dtype=float),
            times,
            np.array([getattr(r, f) for r in records], dtype=float),
        )
        for f in WeatherRecord.CONTINUOUS_FIELDS
    }
    for i, t in enumerate(timeline):
        # nearest-neighbor for the binary field, earlier record on ties
        dist = np.abs(times - t)
        j = int(np.argmin(dist))  # argmin returns the first (earlier) minimum
        out.append(
            WeatherRecord(
                timestamp=int(t),
                pavement_wet=records[j].pavement_wet,
                **{f: float(interpolated[f][i]) for f in WeatherRecord.CONTINUOUS_FIELDS},
            )
        )
    return out
