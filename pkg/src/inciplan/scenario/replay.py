"""Clock-stepped replay: feeds in, recommendation timeline out.

The replay only ever sees feeds through ``ReplayOutput.until(now)``, so
nothing later than the clock can leak into a recommendation.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from inciplan.associator import (
    PlanKeyMatrix,
    PlanState,
    build_query,
    score_all_plans,
    step_transition,
)
from inciplan.associator.transition import PlanChange
from inciplan.domain import DomainError, NetworkModel, SpeedFrame
from inciplan.ingest.features import FeatureFrame, slowdown_vector, time_features, tti_vector
from inciplan.ingest.incidents import fuse_incidents
from inciplan.ingest.pipeline import FeatureLayout, FeaturePipeline
from inciplan.scenario.generate import ReplayOutput, VisibleFeeds
from inciplan.service.events import RecommendationEvent


class StreamingIngest:
    """Causal feature assembly: forward-filled speeds, live fusion, latest weather."""

    def __init__(self, model: NetworkModel, pipeline: FeaturePipeline):
        self.model = model
        self.pipeline = pipeline
        self._last_speeds: np.ndarray | None = None
        self._speed_cursor = -np.inf

    def frame_at(self, now: int, visible: VisibleFeeds) -> tuple[SpeedFrame, FeatureFrame]:
        for sf in visible.speed_frames:
            if sf.timestamp > self._speed_cursor:
                self._last_speeds = sf.speeds.copy()
                self._speed_cursor = sf.timestamp
        if self._last_speeds is None:
            raise DomainError(f"no speed observations at or before t={now}")
        speed_frame = SpeedFrame(timestamp=now, speeds=self._last_speeds.copy())
        status = fuse_incidents(
            [a for a in visible.alerts if a.timestamp == now],
            visible.closures,
            now,
            self.model,
        )
        past_weather = [w for w in visible.weather if w.timestamp <= now]
        if not past_weather:
            raise DomainError(f"no weather observations at or before t={now}")
        weather = past_weather[-1]
        frame = FeatureFrame(
            timestamp=now,
            speeds_scaled=self.pipeline.speed_scaler.transform(speed_frame.speeds),
            tti=tti_vector(speed_frame.speeds, self.pipeline.model.reference_vector()),
            slowdown=slowdown_vector(speed_frame, self.model),
            incident_status=status.status,
            weather_scaled=self.pipeline.weather_scaler.transform(weather.as_vector()),
            time_features=time_features(now, self.pipeline.holidays),
        )
        return speed_frame, frame


@dataclass
class ReplayEngine:
    """Trained models plus everything needed to score a step."""

    model: NetworkModel
    pipeline: FeaturePipeline
    layout: FeatureLayout
    forecaster: object  # .predict(X[B x T x width], y0[B x targets]) -> [B x 6 x targets]
    key_matrix: PlanKeyMatrix
    weights: np.ndarray
    lookback: int = 12
    dwell_minutes: int = 20

    def __post_init__(self):
        if self.layout.n_segments != self.model.n_segments:
            raise DomainError(
                f"feature layout covers {self.layout.n_segments} segments, network has {self.model.n_segments}"
            )
        if self.key_matrix.segments != tuple(self.model.target_segments):
            raise DomainError("plan key matrix segment axis does not match network targets")


@dataclass
class ReplayResult:
    events: list[RecommendationEvent] = field(default_factory=list)
    changes: list[PlanChange] = field(default_factory=list)

    @property
    def timeline(self) -> list[tuple[int, str]]:
        return [(e.timestamp, e.active_plan) for e in self.events]

    def write_events(self, path) -> None:
        with open(path, "w") as fh:
            for event in self.events:
                fh.write(event.to_json() + "\n")


class PersistenceForecaster:
    """Fallback predictor: repeats the current speeds for every horizon."""

    def __init__(self, horizon: int = 6):
        self.horizon = horizon

    def predict(self, X, y0) -> np.ndarray:
        y0 = np.asarray(y0, dtype=float)
        return np.repeat(y0[:, None, :], self.horizon, axis=1)


def harvest_training_records(
    output: ReplayOutput,
    engine: ReplayEngine,
    null_outside_windows: bool = True,
    onset_margin: int = 45,
) -> list[tuple[object, str]]:
    """(query, engaged plan) pairs from the replayed engagement log.

    Uses the same causal pipeline as replay, so associator training sees
    exactly the queries it would have seen live. The log also says when no
    plan was active, so steps outside every window yield null-engaged
    records unless ``null_outside_windows`` is off. Steps within
    ``onset_margin`` minutes BEFORE a window carry unreliable null labels
    (operators engage late, which is the problem being solved) and are
    excluded from supervision entirely.
    """
    from inciplan.domain import NULL_PLAN

    windows = output.engagement_windows()
    ingest = StreamingIngest(engine.model, engine.pipeline)
    window: deque[FeatureFrame] = deque(maxlen=engine.lookback)
    target_idx = engine.model.target_indices()
    records: list[tuple[object, str]] = []
    for now in output.timeline:
        visible = output.until(now)
        speed_frame, frame = ingest.frame_at(now, visible)
        window.append(frame)
        if len(window) < engine.lookback:
            continue
        engaged = next(
            (plan for plan, start, end in windows if start <= now < end), None
        )
        if engaged is None:
            if not null_outside_windows:
                continue
            if any(start - onset_margin <= now < start for _, start, _ in windows):
                continue  # late-engagement onset: label not trustworthy
            engaged = NULL_PLAN
        X = engine.pipeline.flatten_frames(list(window), engine.layout)[None, :, :]
        y0 = frame.speeds_scaled[target_idx][None, :]
        pred_scaled = engine.forecaster.predict(X, y0)[0]
        forecast = engine.pipeline.unscale_targets(pred_scaled)
        query = build_query(now, speed_frame.speeds[target_idx], forecast, engine.model)
        records.append((query, engaged))
    return records


def replay(output: ReplayOutput, engine: ReplayEngine) -> ReplayResult:
    """Step the clock over the scenario and record every recommendation."""
    state = PlanState(dwell_minutes=engine.dwell_minutes)
    ingest = StreamingIngest(engine.model, engine.pipeline)
    window: deque[FeatureFrame] = deque(maxlen=engine.lookback)
    result = ReplayResult()
    target_idx = engine.model.target_indices()
    role_of = engine.model.roles

    for now in output.timeline:
        visible = output.until(now)
        speed_frame, frame = ingest.frame_at(now, visible)
        window.append(frame)
        if len(window) < engine.lookback:
            continue
        X = engine.pipeline.flatten_frames(list(window), engine.layout)[None, :, :]
        y0 = frame.speeds_scaled[target_idx][None, :]
        pred_scaled = engine.forecaster.predict(X, y0)[0]
        forecast = engine.pipeline.unscale_targets(pred_scaled)
        query = build_query(now, speed_frame.speeds[target_idx], forecast, engine.model)
        scores = score_all_plans(query, engine.key_matrix, engine.weights)
        transition = step_transition(state, scores, now)
        state = transition.state
        summary: dict[str, float] = {}
        for i, seg in enumerate(engine.model.target_segments):
            role = role_of[seg]
            summary[role] = max(summary.get(role, 0.0), float(query.tti_sequence[0, i]))
        result.events.append(
            RecommendationEvent(
                timestamp=now,
                scores=scores,
                active_plan=state.active_plan,
                candidate_plan=transition.candidate,
                dwell_blocked=transition.dwell_blocked,
                query_summary=summary,
            )
        )
        if transition.change is not None:
            result.changes.append(transition.change)
    return result
