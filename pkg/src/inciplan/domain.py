"""Core network and frame types shared by every pipeline stage.

All timestamps are integer epoch minutes (UTC). Speed data is aligned to
5-minute bins, weather to 60-minute bins. Vectors are positional: the
ordering of ``NetworkModel.segments`` is the canonical serialization order
for every per-segment vector in the system.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

SPEED_BIN_MINUTES = 5
WEATHER_BIN_MINUTES = 60

NULL_PLAN = "NULL"

STATUS_NORMAL = 0
STATUS_ALERT = 1
STATUS_CLOSURE = 2

ROLES = ("freeway", "arterial", "ramp")

NETWORK_FORMAT_VERSION = 1


class DomainError(ValueError):
    """Invariant violation in a domain type or feed record."""


@dataclass(frozen=True)
class NetworkModel:
    """Directed segment graph with upstream adjacency and reference speeds.

    ``upstream[s]`` lists the segments whose traffic feeds into ``s``;
    ``target_segments`` fixes the row order of every prediction vector.
    ``display_hints`` holds optional (x, y) coordinates for console layout
    only and carries no geographic meaning.
    """

    segments: tuple[str, ...]
    upstream: Mapping[str, tuple[str, ...]]
    reference_speed: Mapping[str, float]
    target_segments: tuple[str, ...]
    roles: Mapping[str, str]
    display_hints: Mapping[str, tuple[float, float]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        object.__setattr__(self, "target_segments", tuple(self.target_segments))
        object.__setattr__(
            self, "upstream", {s: tuple(u) for s, u in self.upstream.items() if u}
        )
        object.__setattr__(self, "reference_speed", dict(self.reference_speed))
        object.__setattr__(self, "roles", dict(self.roles))
        object.__setattr__(
            self, "display_hints", {s: tuple(h) for s, h in self.display_hints.items()}
        )
        object.__setattr__(
            self, "_index", {s: i for i, s in enumerate(self.segments)}
        )

    @property
    def n_segments(self) -> int:
        return len(self.segments)

    def index_of(self, segment: str) -> int:
        try:
            return self._index[segment]
        except KeyError:
            raise DomainError(f"unknown segment id: {segment!r}") from None

    def upstream_of(self, segment: str) -> tuple[str, ...]:
        return self.upstream.get(segment, ())

    def target_indices(self) -> np.ndarray:
        return np.array([self.index_of(s) for s in self.target_segments], dtype=int)

    def reference_vector(self) -> np.ndarray:
        return np.array([self.reference_speed[s] for s in self.segments], dtype=float)

    def with_reference_speeds(self, speeds: Mapping[str, float]) -> "NetworkModel":
        """Copy with per-segment reference speeds overridden (quantile refit)."""
        merged = dict(self.reference_speed)
        merged.update(speeds)
        return NetworkModel(
            self.segments, self.upstream, merged, self.target_segments,
            self.roles, self.display_hints,
        )


def validate_network(model: NetworkModel) -> list[str]:
    """Check NetworkModel invariants and return violations (empty = valid)."""
    violations: list[str] = []
    seen = set()
    for s in model.segments:
        if not s:
            violations.append("empty segment id")
        if s in seen:
            violations.append(f"duplicate segment id: {s!r}")
        seen.add(s)
    for s, ups in model.upstream.items():
        if s not in seen:
            violations.append(f"upstream map references unknown segment: {s!r}")
        for u in ups:
            if u not in seen:
                violations.append(f"dangling upstream ref {u!r} (of {s!r})")
    for s in model.segments:
        ref = model.reference_speed.get(s)
        if ref is None:
            violations.append(f"missing reference_speed for {s!r}")
        elif not np.isfinite(ref) or ref <= 0:
            violations.append(f"nonpositive reference_speed for {s!r}: {ref}")
        role = model.roles.get(s)
        if role not in ROLES:
            violations.append(f"unknown role for {s!r}: {role!r}")
    if not model.target_segments:
        violations.append("target_segments is empty")
    for t in model.target_segments:
        if t not in seen:
            violations.append(f"target segment not in network: {t!r}")
    return violations


@dataclass(frozen=True)
class SpeedFrame:
    """Observed speeds (mph) for every segment at one 5-minute timestamp."""

    timestamp: int
    speeds: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "speeds", np.asarray(self.speeds, dtype=float))

    def validate(self, model: NetworkModel) -> None:
        if self.timestamp % SPEED_BIN_MINUTES != 0:
            raise DomainError(f"timestamp {self.timestamp} not 5-minute aligned")
        if self.speeds.shape != (model.n_segments,):
            raise DomainError(
                f"speed vector length {self.speeds.shape} != |segments| {model.n_segments}"
            )
        if not np.all(np.isfinite(self.speeds)) or np.any(self.speeds <= 0):
            raise DomainError("speeds must be finite and > 0 after imputation")


@dataclass(frozen=True)
class IncidentStatusFrame:
    """Fused incident status per segment: 0 normal, 1 alert, 2 closure."""

    timestamp: int
    status: np.ndarray

    def __post_init__(self):
        status = np.asarray(self.status, dtype=int)
        if status.size and not np.isin(status, (0, 1, 2)).all():
            raise DomainError("incident status values must be in {0, 1, 2}")
        object.__setattr__(self, "status", status)


@dataclass(frozen=True)
class WeatherRecord:
    """One hourly weather observation (continuous fields plus wet-pavement flag)."""

    timestamp: int
    temperature: float
    humidity: float
    wind_speed: float
    pressure: float
    visibility: float
    precip_hourly: float
    pavement_wet: int

    CONTINUOUS_FIELDS = (
        "temperature", "humidity", "wind_speed",
        "pressure", "visibility", "precip_hourly",
    )

    def as_vector(self) -> np.ndarray:
        vals = [getattr(self, f) for f in self.CONTINUOUS_FIELDS]
        return np.array(vals + [float(self.pavement_wet)])

    def validate(self) -> None:
        for f in self.CONTINUOUS_FIELDS:
            if not np.isfinite(getattr(self, f)):
                raise DomainError(f"weather field {f} not finite")
        if self.pavement_wet not in (0, 1):
            raise DomainError("pavement_wet must be 0 or 1")


ENGAGEMENT_ACTIONS = ("activate", "stop", "override")
ENGAGEMENT_ACTORS = ("model", "operator")


@dataclass(frozen=True)
class EngagementRecord:
    """One signal-plan engagement event in the append-only log."""

    timestamp: int
    plan_id: str
    action: str
    actor: str

    def __post_init__(self):
        if self.action not in ENGAGEMENT_ACTIONS:
            raise DomainError(f"unknown engagement action: {self.action!r}")
        if self.actor not in ENGAGEMENT_ACTORS:
            raise DomainError(f"unknown engagement actor: {self.actor!r}")

    def to_json(self) -> str:
        return json.dumps(
            {
                "timestamp": self.timestamp,
                "plan_id": self.plan_id,
                "action": self.action,
                "actor": self.actor,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, line: str) -> "EngagementRecord":
        d = json.loads(line)
        return cls(
            timestamp=int(d["timestamp"]),
            plan_id=str(d["plan_id"]),
            action=str(d["action"]),
            actor=str(d["actor"]),
        )


def save_network(model: NetworkModel, path) -> None:
    """Write the topology file (JSON; see README for field documentation)."""
    doc = {
        "format_version": NETWORK_FORMAT_VERSION,
        "segments": [
            {
                "id": s,
                "role": model.roles[s],
                "reference_speed": model.reference_speed[s],
                **(
                    {"display_hint": list(model.display_hints[s])}
                    if s in model.display_hints
                    else {}
                ),
            }
            for s in model.segments
        ],
        "upstream_edges": [
            [s, u] for s in model.segments for u in model.upstream_of(s)
        ],
        "target_segments": list(model.target_segments),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_network(path) -> NetworkModel:
    """Load and validate a topology file; raises DomainError on violations."""
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("format_version") != NETWORK_FORMAT_VERSION:
        raise DomainError(
            f"unsupported network format_version: {doc.get('format_version')!r}"
        )
    segments = [str(rec["id"]) for rec in doc["segments"]]
    upstream: dict[str, list[str]] = {s: [] for s in segments}
    for seg, up in doc.get("upstream_edges", []):
        upstream.setdefault(seg, []).append(up)
    model = NetworkModel(
        segments=tuple(segments),
        upstream={s: tuple(u) for s, u in upstream.items()},
        reference_speed={str(r["id"]): float(r["reference_speed"]) for r in doc["segments"]},
        target_segments=tuple(doc.get("target_segments") or segments),
        roles={str(r["id"]): str(r["role"]) for r in doc["segments"]},
        display_hints={
            str(r["id"]): tuple(r["display_hint"])
            for r in doc["segments"]
            if "display_hint" in r
        },
    )
    violations = validate_network(model)
    if violations:
        raise DomainError("invalid network file: " + "; ".join(violations))
    return model
