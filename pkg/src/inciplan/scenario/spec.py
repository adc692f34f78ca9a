"""Scenario scripting: what happens, when, and how feeds report it."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

from inciplan.domain import DomainError
from inciplan.scenario.fixtures import (
    DEFAULT_NETWORK_ID,
    SCENARIO_INCIDENT_SEGMENT,
    default_plans,
)

SCENARIO_FORMAT_VERSION = 1

# 06:00 on the first Monday after the epoch; scenarios default to daytime
DAY_START = 4 * 1440 + 6 * 60


@dataclass(frozen=True)
class IncidentScript:
    """One incident: a speed drop that propagates upstream, plus its feeds."""

    start: int
    duration: int
    segment: str
    severity: float  # incident-segment speed multiplier; 1.0 = no effect
    alert_delay: int = 5
    closure_delay: int = 15
    arterial_segments: tuple[str, ...] = ()
    diversion_lag: int = 10
    arterial_factor: float = 0.6
    wave_hops: int = 3
    wave_decay: float = 0.6
    recovery_steps: int = 3

    @property
    def end(self) -> int:
        return self.start + self.duration


@dataclass(frozen=True)
class EngagementScript:
    """Ground-truth operator engagement window for one plan."""

    plan_id: str
    start: int
    end: int


@dataclass(frozen=True)
class ScenarioSpec:
    seed: int
    start_minute: int
    duration: int
    incidents: tuple[IncidentScript, ...] = ()
    engagements: tuple[EngagementScript, ...] = ()
    network_id: str = DEFAULT_NETWORK_ID
    noise_std: float = 0.01
    peak_dip: float = 0.2
    base_temperature: float = 55.0

    @property
    def end_minute(self) -> int:
        return self.start_minute + self.duration

    def validate(self, segment_ids: set[str]) -> None:
        for i, inc in enumerate(self.incidents):
            path = f"incidents[{i}]"
            if not 0.0 < inc.severity <= 1.0:
                raise DomainError(f"{path}.severity must be in (0, 1], got {inc.severity}")
            if inc.start < self.start_minute or inc.end > self.end_minute:
                raise DomainError(f"{path}: window outside scenario duration")
            if inc.segment not in segment_ids:
                raise DomainError(f"{path}.segment: unknown segment {inc.segment!r}")
            if not inc.alert_delay < inc.closure_delay < inc.duration:
                raise DomainError(
                    f"{path}: need alert_delay < closure_delay < duration for the alert-closure-clear lifecycle"
                )
            for s in inc.arterial_segments:
                if s not in segment_ids:
                    raise DomainError(f"{path}.arterial_segments: unknown segment {s!r}")
        for i, eng in enumerate(self.engagements):
            if eng.start >= eng.end:
                raise DomainError(f"engagements[{i}]: empty window")


def plan_scenario(
    plan_id: str,
    seed: int,
    alert_delay: int = 20,
    severity: float = 0.35,
    start_minute: int = DAY_START,
) -> ScenarioSpec:
    """The scripted demonstration scenario for one plan.

    Congestion builds for ``alert_delay`` minutes before the first alert, the
    closure follows, and operators engage late and stop late, mirroring the
    response pattern the recommender is meant to beat.
    """
    plan = next((p for p in default_plans() if p.plan_id == plan_id), None)
    if plan is None:
        raise DomainError(f"no fixture scenario for plan {plan_id!r}")
    incident_start = start_minute + 90
    incident_duration = 120
    closure_delay = alert_delay + 15
    operator_start = incident_start + alert_delay + 15
    operator_stop = incident_start + incident_duration + 15
    incident = IncidentScript(
        start=incident_start,
        duration=incident_duration,
        segment=SCENARIO_INCIDENT_SEGMENT[plan_id],
        severity=severity,
        alert_delay=alert_delay,
        closure_delay=closure_delay,
        arterial_segments=plan.arterial_segments,
    )
    return ScenarioSpec(
        seed=seed,
        start_minute=start_minute,
        duration=360,
        incidents=(incident,),
        engagements=(EngagementScript(plan_id, operator_start, operator_stop),),
    )


def training_scenario(seed: int, days: int = 3) -> ScenarioSpec:
    """Multi-incident scenario (no engagements) for fitting the predictor."""
    incidents = []
    plans = ["A", "C", "D", "F", "B", "E"]
    for day in range(days):
        day_start = DAY_START + day * 1440
        for k, offset in enumerate((60, 300, 540)):
            plan = plans[(day * 3 + k) % len(plans)]
            definition = next(p for p in default_plans() if p.plan_id == plan)
            incidents.append(
                IncidentScript(
                    start=day_start + offset,
                    duration=100 + 10 * ((day + k) % 3),
                    segment=SCENARIO_INCIDENT_SEGMENT[plan],
                    severity=0.3 + 0.1 * ((day + 2 * k) % 4),
                    alert_delay=10 + 5 * (k % 2),
                    closure_delay=30,
                    arterial_segments=definition.arterial_segments,
                )
            )
    return ScenarioSpec(
        seed=seed,
        start_minute=DAY_START,
        duration=days * 1440 - 720,  # stop at midnight-ish each run
        incidents=tuple(incidents),
    )


def save_scenario(path, spec: ScenarioSpec) -> None:
    doc = {"format_version": SCENARIO_FORMAT_VERSION, **asdict(spec)}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_scenario(path) -> ScenarioSpec:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.pop("format_version", None) != SCENARIO_FORMAT_VERSION:
        raise DomainError("unsupported scenario format_version")
    doc["incidents"] = tuple(
        IncidentScript(**{**inc, "arterial_segments": tuple(inc["arterial_segments"])})
        for inc in doc.get("incidents", [])
    )
    doc["engagements"] = tuple(
        EngagementScript(**eng) for eng in doc.get("engagements", [])
    )
    return ScenarioSpec(**doc)
