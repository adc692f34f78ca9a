"""Deterministic feed synthesis from a ScenarioSpec."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from inciplan.domain import (
    DomainError,
    EngagementRecord,
    NetworkModel,
    SpeedFrame,
    WeatherRecord,
)
from inciplan.ingest.incidents import AlertEvent, ClosureEvent
from inciplan.ingest import feeds
from inciplan.scenario.fixtures import DEFAULT_NETWORK_ID, default_network
from inciplan.scenario.spec import IncidentScript, ScenarioSpec

MIN_SPEED = 3.0


@dataclass
class ReplayOutput:
    """Every feed the ingest stage consumes, mutually time-consistent."""

    network: NetworkModel
    spec: ScenarioSpec
    speed_frames: list[SpeedFrame]
    alerts: list[AlertEvent]
    closures: list[ClosureEvent]
    weather: list[WeatherRecord]
    engagements: list[EngagementRecord]

    @property
    def timeline(self) -> list[int]:
        return [f.timestamp for f in self.speed_frames]

    def engagement_windows(self) -> list[tuple[str, int, int]]:
        return [(e.plan_id, e.start, e.end) for e in self.spec.engagements]

    def until(self, now: int) -> "VisibleFeeds":
        """Everything reported at or before ``now`` (the no-lookahead gate)."""
        return VisibleFeeds(
            now=now,
            speed_frames=[f for f in self.speed_frames if f.timestamp <= now],
            alerts=[a for a in self.alerts if a.timestamp <= now],
            closures=[c for c in self.closures if c.open_timestamp <= now],
            weather=[w for w in self.weather if w.timestamp <= now],
        )

    def write(self, directory) -> None:
        feeds.write_speed_frames(
            f"{directory}/speeds.csv", self.speed_frames, self.network.segments
        )
        feeds.write_alert_feed(f"{directory}/alerts.csv", self.alerts)
        feeds.write_closure_feed(f"{directory}/closures.csv", self.closures)
        feeds.write_weather_feed(f"{directory}/weather.csv", self.weather)
        with open(f"{directory}/engagements.jsonl", "w") as fh:
            for record in self.engagements:
                fh.write(record.to_json() + "\n")


@dataclass
class VisibleFeeds:
    now: int
    speed_frames: list[SpeedFrame]
    alerts: list[AlertEvent]
    closures: list[ClosureEvent]
    weather: list[WeatherRecord]


def _upstream_hops(model: NetworkModel, segment: str, max_hops: int) -> dict[str, int]:
    """Breadth-first upstream distances from the incident segment."""
    hops = {segment: 0}
    frontier = [segment]
    for depth in range(1, max_hops + 1):
        nxt = []
        for s in frontier:
            for u in model.upstream_of(s):
                if u not in hops:
                    hops[u] = depth
                    nxt.append(u)
        frontier = nxt
    return hops


def _incident_multiplier(inc: IncidentScript, hop: int, t: int) -> float:
    """Speed multiplier contributed by one incident at hop distance ``hop``."""
    onset = inc.start + 5 * hop  # backward wave: one segment per 5-minute step
    depth = 1.0 - (1.0 - inc.severity) * (inc.wave_decay ** hop)
    return _windowed(t, onset, inc.end, inc.recovery_steps, depth)


def _windowed(t: int, onset: int, end: int, recovery_steps: int, depth: float) -> float:
    if t < onset or depth >= 1.0:
        return 1.0
    if t < end:
        return depth
    recover_for = 5 * recovery_steps
    if t < end + recover_for:
        frac = (t - end) / recover_for
        return depth + (1.0 - depth) * frac
    return 1.0


def _time_of_day_factor(t: int, peak_dip: float) -> float:
    """Smooth AM/PM demand dips in free-flow speed."""
    tod = t % 1440
    am = np.exp(-(((tod - 480) / 90.0) ** 2))
    pm = np.exp(-(((tod - 1020) / 90.0) ** 2))
    return 1.0 - peak_dip * (am + pm)


def generate(spec: ScenarioSpec, model: NetworkModel | None = None) -> ReplayOutput:
    """Synthesize all feeds for a scenario; byte-identical for a given seed."""
    if model is None:
        if spec.network_id != DEFAULT_NETWORK_ID:
            raise DomainError(f"unknown network fixture: {spec.network_id!r}")
        model = default_network()
    spec.validate(set(model.segments))
    rng = np.random.default_rng(spec.seed)
    reference = model.reference_vector()

    hop_maps = [_upstream_hops(model, inc.segment, inc.wave_hops) for inc in spec.incidents]

    timeline = list(range(spec.start_minute, spec.end_minute, 5))
    speed_frames: list[SpeedFrame] = []
    alerts: list[AlertEvent] = []
    closures: list[ClosureEvent] = []

    for inc in spec.incidents:
        closures.append(
            ClosureEvent(
                open_timestamp=inc.start + inc.closure_delay,
                close_timestamp=inc.end,
                segment_ids=(inc.segment,),
                closure_type="incident",
            )
        )

    for t in timeline:
        speeds = reference * _time_of_day_factor(t, spec.peak_dip)
        for inc, hops in zip(spec.incidents, hop_maps):
            for seg, hop in hops.items():
                m = _incident_multiplier(inc, hop, t)
                if m < 1.0:
                    i = model.index_of(seg)
                    speeds[i] = min(speeds[i], reference[i] * _time_of_day_factor(t, spec.peak_dip) * m)
            arterial_m = _windowed(
                t, inc.start + inc.diversion_lag, inc.end, inc.recovery_steps, inc.arterial_factor
            )
            if arterial_m < 1.0:
                for seg in inc.arterial_segments:
                    i = model.index_of(seg)
                    speeds[i] = min(
                        speeds[i], reference[i] * _time_of_day_factor(t, spec.peak_dip) * arterial_m
                    )
        noise = 1.0 + spec.noise_std * rng.standard_normal(model.n_segments)
        speeds = np.maximum(speeds * noise, MIN_SPEED)
        speed_frames.append(SpeedFrame(timestamp=t, speeds=speeds))

        for inc, hops in zip(spec.incidents, hop_maps):
            if not inc.start + inc.alert_delay <= t < inc.end:
                continue
            # road users report at the incident and at the back of the queue
            alerts.append(AlertEvent(timestamp=t, segment_id=inc.segment, category="accident"))
            active_hops = [
                (seg, hop) for seg, hop in hops.items()
                if hop > 0 and t >= inc.start + 5 * hop
            ]
            if active_hops:
                frontier_seg, _ = max(active_hops, key=lambda pair: pair[1])
                alerts.append(AlertEvent(timestamp=t, segment_id=frontier_seg, category="jam"))

    weather: list[WeatherRecord] = []
    first_hour = spec.start_minute - (spec.start_minute % 60)
    for hour_ts in range(first_hour, spec.end_minute + 60, 60):
        weather.append(
            WeatherRecord(
                timestamp=hour_ts,
                temperature=spec.base_temperature + 6.0 * np.sin(2 * np.pi * (hour_ts % 1440) / 1440)
                + float(rng.normal(0, 0.5)),
                humidity=55.0 + float(rng.normal(0, 2.0)),
                wind_speed=max(0.0, 8.0 + float(rng.normal(0, 1.0))),
                pressure=29.9 + float(rng.normal(0, 0.02)),
                visibility=10.0,
                precip_hourly=0.0,
                pavement_wet=0,
            )
        )

    engagements: list[EngagementRecord] = []
    for eng in sorted(spec.engagements, key=lambda e: e.start):
        engagements.append(
            EngagementRecord(eng.start, eng.plan_id, "activate", "operator")
        )
        engagements.append(EngagementRecord(eng.end, eng.plan_id, "stop", "operator"))
    engagements.sort(key=lambda r: r.timestamp)

    return ReplayOutput(
        network=model,
        spec=spec,
        speed_frames=speed_frames,
        alerts=alerts,
        closures=closures,
        weather=weather,
        engagements=engagements,
    )


def first_alert_times(output: ReplayOutput) -> dict[str, int]:
    """Earliest alert timestamp per scripted engagement plan ("first alert").

    An engagement is attributed to the incidents whose windows overlap it.
    """
    times: dict[str, int] = {}
    for eng in output.spec.engagements:
        related = [
            inc
            for inc in output.spec.incidents
            if inc.start < eng.end and eng.start < inc.end + 60
        ]
        if related:
            times[eng.plan_id] = min(inc.start + inc.alert_delay for inc in related)
    return times
