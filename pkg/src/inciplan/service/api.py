"""HTTP service: live recommendation stream plus operator actions.

The replay driver paces through a feed directory (simulating live arrival),
publishes one RecommendationEvent per clock step, and records operator
decisions in the append-only engagement log.
"""

from __future__ import annotations

import json
import os
import threading
from collections import deque

import numpy as np
from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse, StreamingResponse

from inciplan.associator import (
    PlanKeyMatrix,
    PlanState,
    build_query,
    load_plans,
    load_rank_model,
    score_all_plans,
    step_transition,
)
from inciplan.domain import (
    NULL_PLAN,
    DomainError,
    EngagementRecord,
    load_network,
)
from inciplan.ingest import feeds
from inciplan.ingest.pipeline import FeatureLayout, FeaturePipeline, concat_scope_indices
from inciplan.predictor.seq2seq import Seq2SeqSpeedForecaster
from inciplan.scenario.generate import ReplayOutput
from inciplan.scenario.replay import StreamingIngest
from inciplan.service.config import Config
from inciplan.service.eventlog import EngagementLog
from inciplan.service.events import RecommendationEvent


class ServiceRuntime:
    """Shared state between the replay driver thread and the HTTP handlers."""

    def __init__(self, config: Config, output: ReplayOutput, plan_docs: list,
                 key_matrix: PlanKeyMatrix, pipeline: FeaturePipeline,
                 layout: FeatureLayout, forecaster, weights: np.ndarray,
                 log: EngagementLog):
        self.config = config
        self.output = output
        self.model = pipeline.model
        self.plan_docs = plan_docs
        self.key_matrix = key_matrix
        self.pipeline = pipeline
        self.layout = layout
        self.forecaster = forecaster
        self.weights = weights
        self.log = log
        self.plan_state = PlanState(dwell_minutes=config.associator.dwell_minutes)
        self.events: list[RecommendationEvent] = []
        self.condition = threading.Condition()
        self.finished = False
        self._thread: threading.Thread | None = None

    # -- replay driver -------------------------------------------------------

    def start(self) -> None:
        self._thread = threading.Thread(target=self._run, daemon=True)
        self._thread.start()

    def _run(self) -> None:
        ingest = StreamingIngest(self.model, self.pipeline)
        window: deque = deque(maxlen=self.config.predictor.lookback_steps)
        target_idx = self.model.target_indices()
        stop = threading.Event()
        for now in self.output.timeline:
            visible = self.output.until(now)
            speed_frame, frame = ingest.frame_at(now, visible)
            window.append(frame)
            if len(window) == self.config.predictor.lookback_steps:
                X = self.pipeline.flatten_frames(list(window), self.layout)[None, :, :]
                y0 = frame.speeds_scaled[target_idx][None, :]
                forecast = self.pipeline.unscale_targets(self.forecaster.predict(X, y0)[0])
                query = build_query(now, speed_frame.speeds[target_idx], forecast, self.model)
                scores = score_all_plans(query, self.key_matrix, self.weights)
                with self.condition:
                    transition = step_transition(self.plan_state, scores, now)
                    previous = self.plan_state
                    self.plan_state = transition.state
                    if transition.change is not None:
                        self._log_change(previous.active_plan, transition.change.to_plan, now)
                    summary: dict[str, float] = {}
                    for i, seg in enumerate(self.model.target_segments):
                        role = self.model.roles[seg]
                        summary[role] = max(summary.get(role, 0.0), float(query.tti_sequence[0, i]))
                    self.events.append(
                        RecommendationEvent(
                            timestamp=now,
                            scores=scores,
                            active_plan=self.plan_state.active_plan,
                            candidate_plan=transition.candidate,
                            dwell_blocked=transition.dwell_blocked,
                            query_summary=summary,
                        )
                    )
                    self.condition.notify_all()
            stop.wait(self.config.server.step_seconds)
        with self.condition:
            self.finished = True
            self.condition.notify_all()

    def _log_change(self, from_plan: str, to_plan: str, now: int) -> None:
        if to_plan == NULL_PLAN:
            record = EngagementRecord(now, from_plan, "stop", "model")
        else:
            record = EngagementRecord(now, to_plan, "activate", "model")
        try:
            self.log.append(record)
        except DomainError:
            pass  # an operator action with a later timestamp already landed

    # -- operator actions ------------------------------------------------------

    def apply_action(self, plan_id: str, action: str, timestamp: int) -> EngagementRecord:
        if action not in ("activate", "stop", "override"):
            raise HTTPException(status_code=400, detail=f"unknown action {action!r}")
        if plan_id not in self.key_matrix.plans:
            raise HTTPException(status_code=404, detail=f"unknown plan {plan_id!r}")
        with self.condition:
            active = self.plan_state.active_plan
            if action == "stop":
                if active == NULL_PLAN:
                    raise HTTPException(status_code=409, detail="no active plan to stop")
                next_plan = NULL_PLAN
            else:
                next_plan = plan_id
            record = EngagementRecord(timestamp, plan_id, action, "operator")
            try:
                self.log.append(record)
            except DomainError as exc:
                raise HTTPException(status_code=409, detail=str(exc)) from exc
            self.plan_state = PlanState(
                active_plan=next_plan,
                last_change=timestamp,
                dwell_minutes=self.plan_state.dwell_minutes,
            )
        return record


def _require_paths(*named: tuple[str, str]) -> None:
    missing = [f"{name}: {path}" for name, path in named if not os.path.exists(path)]
    if missing:
        raise DomainError("missing model files - " + "; ".join(missing))


def load_runtime(config: Config, feed_dir: str | None = None) -> ServiceRuntime:
    """Load every artifact the service needs; errors list all missing paths."""
    paths = config.paths
    feed_dir = feed_dir or paths.feeds
    _require_paths(
        ("network", paths.network),
        ("plans", paths.plans),
        ("pipeline_state", paths.pipeline_state),
        ("predictor_checkpoint", paths.predictor_checkpoint),
        ("rank_model", paths.rank_model),
        ("feeds", feed_dir),
    )
    model = load_network(paths.network)
    plan_defs = load_plans(paths.plans)
    pipeline = FeaturePipeline.load(paths.pipeline_state, model)
    model = pipeline.model
    key_matrix = PlanKeyMatrix(plan_defs, model)
    forecaster = Seq2SeqSpeedForecaster.load(paths.predictor_checkpoint)
    weights, _ = load_rank_model(paths.rank_model)
    layout = FeatureLayout(
        n_segments=model.n_segments,
        use_speed=config.features.use_speed,
        use_slowdown=config.features.use_slowdown,
        use_incidents=config.features.use_incidents,
        use_weather=config.features.use_weather,
        use_time=config.features.use_time,
        concat_segment_indices=concat_scope_indices(model, config.features.incident_concat_scope),
    )
    output = read_feed_directory(feed_dir, model)
    log = EngagementLog(paths.engagement_log)
    return ServiceRuntime(
        config=config, output=output, plan_docs=plan_defs, key_matrix=key_matrix,
        pipeline=pipeline, layout=layout, forecaster=forecaster, weights=weights, log=log,
    )


def read_feed_directory(directory, model) -> ReplayOutput:
    """Assemble a ReplayOutput from the four feed files (+ engagement log)."""
    from inciplan.domain import SpeedFrame
    from inciplan.scenario.spec import ScenarioSpec

    records = feeds.read_speed_feed(os.path.join(directory, "speeds.csv"))
    by_time: dict[int, dict[str, float]] = {}
    for seg, t, mph in records:
        by_time.setdefault(t, {})[seg] = mph
    frames = []
    for t in sorted(by_time):
        row = by_time[t]
        frames.append(
            SpeedFrame(timestamp=t, speeds=[row[s] for s in model.segments])
        )
    engagement_path = os.path.join(directory, "engagements.jsonl")
    engagements = EngagementLog(engagement_path).records if os.path.exists(engagement_path) else []
    timeline = [f.timestamp for f in frames]
    spec = ScenarioSpec(
        seed=0,
        start_minute=timeline[0] if timeline else 0,
        duration=(timeline[-1] - timeline[0] + 5) if timeline else 0,
    )
    return ReplayOutput(
        network=model,
        spec=spec,
        speed_frames=frames,
        alerts=feeds.read_alert_feed(os.path.join(directory, "alerts.csv")),
        closures=feeds.read_closure_feed(os.path.join(directory, "closures.csv")),
        weather=feeds.read_weather_feed(os.path.join(directory, "weather.csv")),
        engagements=engagements,
    )


def _sse(event_id: int, event: RecommendationEvent) -> str:
    return f"id: {event_id}\nevent: recommendation\ndata: {event.to_json()}\n\n"


def create_app(runtime: ServiceRuntime) -> FastAPI:
    app = FastAPI(title="inciplan", version="0.1.0")
    app.state.runtime = runtime

    @app.get("/network")
    def network():
        model = runtime.model
        return {
            "format_version": 1,
            "segments": [
                {
                    "id": s,
                    "role": model.roles[s],
                    "reference_speed": model.reference_speed[s],
                    "display_hint": list(model.display_hints.get(s, (0.0, 0.0))),
                }
                for s in model.segments
            ],
            "upstream_edges": [[s, u] for s in model.segments for u in model.upstream_of(s)],
            "target_segments": list(model.target_segments),
        }

    @app.get("/plans")
    def plans():
        return {
            "format_version": 1,
            "plans": [
                {
                    "id": d.plan_id,
                    "description": d.description,
                    "incident_segments": list(d.incident_segments),
                    "arterial_segments": list(d.arterial_segments),
                }
                for d in runtime.plan_docs
            ],
            "null_plan": NULL_PLAN,
        }

    @app.get("/recommendations/current")
    def current():
        with runtime.condition:
            if not runtime.events:
                raise HTTPException(status_code=404, detail="no recommendations yet")
            event = runtime.events[-1]
            return JSONResponse(content=json.loads(event.to_json()))

    @app.get("/state/stream")
    def stream(request: Request):
        last_id = request.headers.get("last-event-id")
        start_index = int(last_id) + 1 if last_id is not None else 0

        def generate():
            index = start_index
            while True:
                with runtime.condition:
                    while index >= len(runtime.events) and not runtime.finished:
                        runtime.condition.wait(timeout=0.5)
                    batch = runtime.events[index:]
                    done = runtime.finished and not batch
                for event in batch:
                    yield _sse(index, event)
                    index += 1
                if done:
                    yield "event: end\ndata: {}\n\n"
                    return

        return StreamingResponse(generate(), media_type="text/event-stream")

    @app.post("/engagements")
    async def post_engagement(request: Request):
        body = await request.json()
        try:
            plan_id = str(body["plan_id"])
            action = str(body["action"])
            timestamp = int(body["timestamp"])
        except (KeyError, TypeError, ValueError):
            raise HTTPException(status_code=400, detail="body needs plan_id, action, timestamp")
        record = runtime.apply_action(plan_id, action, timestamp)
        return JSONResponse(status_code=201, content=json.loads(record.to_json()))

    @app.get("/engagements")
    def engagements(since: int = 0):
        return [json.loads(r.to_json()) for r in runtime.log.since(since)]

    return app


def serve(config: Config, feed_dir: str | None = None):
    """Start the replay driver and serve the API (blocking)."""
    import uvicorn

    runtime = load_runtime(config, feed_dir)
    app = create_app(runtime)
    runtime.start()
    uvicorn.run(app, host=config.server.host, port=config.server.port, log_level="warning")
