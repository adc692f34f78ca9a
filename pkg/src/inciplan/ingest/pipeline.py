"""End-to-end feature pipeline: raw feeds in, model-ready frames out."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from inciplan.domain import (
    DomainError,
    IncidentStatusFrame,
    NetworkModel,
    SpeedFrame,
    WeatherRecord,
)
from inciplan.ingest.features import (
    TIME_FEATURE_WIDTH,
    FeatureFrame,
    reference_speed_from_observations,
    slowdown_vector,
    time_features,
    tti_vector,
)
from inciplan.ingest.imputation import impute_speed, interpolate_weather
from inciplan.ingest.scaling import ClampedMinMaxScaler

N_STATUS = 3  # incident status alphabet {0, 1, 2}


def speed_frames_from_records(
    records: Sequence[tuple[str, int, float]],
    model: NetworkModel,
    timeline: Sequence[int],
) -> list[SpeedFrame]:
    """Forward-fill per-segment observations onto a shared 5-minute timeline."""
    per_segment: dict[str, dict[int, float]] = {s: {} for s in model.segments}
    for seg, t, speed in records:
        if seg not in per_segment:
            raise DomainError(f"speed record for unknown segment {seg!r}")
        per_segment[seg][t] = speed
    columns = [impute_speed(per_segment[s], timeline) for s in model.segments]
    matrix = np.stack(columns, axis=1)
    return [SpeedFrame(timestamp=t, speeds=matrix[i]) for i, t in enumerate(timeline)]


def weather_for_timeline(
    records: Sequence[WeatherRecord], timeline: Sequence[int]
) -> list[WeatherRecord]:
    """Map each 5-minute step to its (gap-filled) top-of-hour weather record."""
    hours = sorted({t - (t % 60) for t in timeline})
    hourly = {r.timestamp: r for r in interpolate_weather(records, hours)}
    return [hourly[t - (t % 60)] for t in timeline]


@dataclass
class FeatureLayout:
    """Describes how a FeatureFrame flattens into one encoder input vector.

    The incident block holds per-segment status one-hots for the concat-scope
    segments followed by status counts over the remaining segments; it is the
    slice the predictor multiplies by its learned status embedding.
    """

    n_segments: int
    use_speed: bool = True
    use_slowdown: bool = True
    use_incidents: bool = True
    use_weather: bool = True
    use_time: bool = True
    concat_segment_indices: tuple[int, ...] = ()

    def __post_init__(self):
        width = 0
        if self.use_speed:
            width += self.n_segments
        if self.use_slowdown:
            width += self.n_segments
        self.incident_start = width
        if self.use_incidents:
            width += N_STATUS * (len(self.concat_segment_indices) + 1)
        self.incident_end = width
        if self.use_weather:
            width += 7
        if self.use_time:
            width += TIME_FEATURE_WIDTH
        self.width = width

    @property
    def n_incident_groups(self) -> int:
        return len(self.concat_segment_indices) + 1

    def flatten(self, frame: FeatureFrame, slowdown_scaled: np.ndarray) -> np.ndarray:
        parts = []
        if self.use_speed:
            parts.append(frame.speeds_scaled)
        if self.use_slowdown:
            parts.append(slowdown_scaled)
        if self.use_incidents:
            onehot = np.zeros((self.n_segments, N_STATUS))
            onehot[np.arange(self.n_segments), frame.incident_status] = 1.0
            concat = list(self.concat_segment_indices)
            rest = np.setdiff1d(np.arange(self.n_segments), concat)
            parts.append(onehot[concat].ravel())
            # normalized sum keeps the aggregate on the same [0,1] scale as
            # the rest of the features (raw counts saturate the recurrent gates)
            if len(rest):
                parts.append(onehot[rest].sum(axis=0) / len(rest))
            else:
                parts.append(np.zeros(N_STATUS))
        if self.use_weather:
            parts.append(frame.weather_scaled)
        if self.use_time:
            parts.append(frame.time_features)
        return np.concatenate(parts) if parts else np.zeros(0)


def concat_scope_indices(model: NetworkModel, scope: str) -> tuple[int, ...]:
    """Segment indices whose status embeddings are concatenated, not summed."""
    if scope == "none":
        return ()
    targets = list(model.target_segments)
    if scope == "targets":
        chosen = targets
    elif scope == "targets_upstream":
        chosen = list(targets)
        for t in targets:
            for u in model.upstream_of(t):
                if u not in chosen:
                    chosen.append(u)
    else:
        raise DomainError(f"unknown incident concat scope: {scope!r}")
    return tuple(model.index_of(s) for s in chosen)


@dataclass
class FeaturePipeline:
    """Fits scalers on training data and assembles FeatureFrames.

    Reference speeds come from the network file until ``fit`` sees speed
    history, at which point the 0.85-quantile estimate takes over.
    """

    model: NetworkModel
    holidays: frozenset = frozenset()
    speed_scaler: ClampedMinMaxScaler = field(default_factory=ClampedMinMaxScaler)
    slowdown_scaler: ClampedMinMaxScaler = field(default_factory=ClampedMinMaxScaler)
    weather_scaler: ClampedMinMaxScaler = field(default_factory=ClampedMinMaxScaler)

    def fit(
        self,
        speed_frames: Sequence[SpeedFrame],
        weather_records: Sequence[WeatherRecord],
        refit_reference: bool = True,
    ) -> "FeaturePipeline":
        if not speed_frames:
            raise DomainError("pipeline fit requires at least one speed frame")
        speeds = np.stack([f.speeds for f in speed_frames])
        if refit_reference:
            ref = {
                s: reference_speed_from_observations(speeds[:, i])
                for i, s in enumerate(self.model.segments)
            }
            self.model = self.model.with_reference_speeds(ref)
        self.speed_scaler.fit(speeds)
        sd = np.stack([slowdown_vector(f, self.model) for f in speed_frames])
        self.slowdown_scaler.fit(sd)
        weather = np.stack([r.as_vector() for r in weather_records])
        self.weather_scaler.fit(weather)
        return self

    def build_frames(
        self,
        speed_frames: Sequence[SpeedFrame],
        status_frames: Sequence[IncidentStatusFrame],
        weather_records: Sequence[WeatherRecord],
    ) -> list[FeatureFrame]:
        """Fuse aligned per-timestamp inputs into FeatureFrames."""
        if not (len(speed_frames) == len(status_frames) == len(weather_records)):
            raise DomainError("speed, status, and weather sequences must align")
        reference = self.model.reference_vector()
        frames = []
        for sf, stf, wr in zip(speed_frames, status_frames, weather_records):
            if sf.timestamp != stf.timestamp:
                raise DomainError(
                    f"misaligned frames: speed at {sf.timestamp}, status at {stf.timestamp}"
                )
            frame = FeatureFrame(
                timestamp=sf.timestamp,
                speeds_scaled=self.speed_scaler.transform(sf.speeds),
                tti=tti_vector(sf.speeds, reference),
                slowdown=slowdown_vector(sf, self.model),
                incident_status=stf.status,
                weather_scaled=self.weather_scaler.transform(wr.as_vector()),
                time_features=time_features(sf.timestamp, self.holidays),
            )
            frame.validate(self.model)
            frames.append(frame)
        return frames

    def flatten_frames(
        self, frames: Sequence[FeatureFrame], layout: FeatureLayout
    ) -> np.ndarray:
        """Stack per-frame encoder input vectors into a [T x width] matrix."""
        rows = [
            layout.flatten(f, self.slowdown_scaler.transform(f.slowdown))
            for f in frames
        ]
        return np.stack(rows)

    def target_scaled(self, frames: Sequence[FeatureFrame]) -> np.ndarray:
        """Scaled speeds on target segments, [T x |targets|]."""
        idx = self.model.target_indices()
        return np.stack([f.speeds_scaled[idx] for f in frames])

    def unscale_targets(self, scaled: np.ndarray) -> np.ndarray:
        """Invert target-segment speed scaling; clamps into the fitted range."""
        idx = self.model.target_indices()
        clipped = np.clip(scaled, 0.0, 1.0)
        return clipped * self.speed_scaler.range_[idx] + self.speed_scaler.min_[idx]

    def save(self, path) -> None:
        """Persist fitted scaler state and refit reference speeds."""
        def scaler_doc(s: ClampedMinMaxScaler) -> dict:
            return {"min": s.min_.tolist(), "max": s.max_.tolist()}

        doc = {
            "format_version": 1,
            "reference_speed": {s: self.model.reference_speed[s] for s in self.model.segments},
            "speed_scaler": scaler_doc(self.speed_scaler),
            "slowdown_scaler": scaler_doc(self.slowdown_scaler),
            "weather_scaler": scaler_doc(self.weather_scaler),
            "holidays": sorted(self.holidays),
        }
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path, model: NetworkModel) -> "FeaturePipeline":
        with open(path) as fh:
            doc = json.load(fh)
        if doc.get("format_version") != 1:
            raise DomainError("unsupported pipeline state format_version")

        def restore(entry: dict) -> ClampedMinMaxScaler:
            s = ClampedMinMaxScaler()
            s.min_ = np.array(entry["min"], dtype=float)
            s.max_ = np.array(entry["max"], dtype=float)
            s.range_ = s.max_ - s.min_
            s.n_features_ = len(s.min_)
            return s

        pipeline = cls(
            model=model.with_reference_speeds(
                {k: float(v) for k, v in doc["reference_speed"].items()}
            ),
            holidays=frozenset(doc.get("holidays", [])),
        )
        pipeline.speed_scaler = restore(doc["speed_scaler"])
        pipeline.slowdown_scaler = restore(doc["slowdown_scaler"])
        pipeline.weather_scaler = restore(doc["weather_scaler"])
        return pipeline
