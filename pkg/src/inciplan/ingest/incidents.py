"""Multi-source incident fusion: alerts, closures, and the max-gate."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from inciplan.domain import (
    STATUS_ALERT,
    STATUS_CLOSURE,
    DomainError,
    IncidentStatusFrame,
    NetworkModel,
)

ALERT_CATEGORIES = ("accident", "jam")

MAX_CLOSURE_MINUTES = 24 * 60


@dataclass(frozen=True)
class AlertEvent:
    """A crowdsourced point alert already matched to a segment."""

    timestamp: int
    segment_id: str
    category: str


@dataclass(frozen=True)
class ClosureEvent:
    """An official closure interval over a set of segments."""

    open_timestamp: int
    close_timestamp: int
    segment_ids: tuple[str, ...]
    closure_type: str = "incident"

    def active_at(self, t: int) -> bool:
        return self.open_timestamp <= t < self.close_timestamp


def filter_alerts(alerts: Iterable[AlertEvent]) -> list[AlertEvent]:
    """Keep only accident/jam alerts; reliability scores are not screened."""
    return [a for a in alerts if a.category in ALERT_CATEGORIES]


def filter_closures(closures: Iterable[ClosureEvent]) -> list[ClosureEvent]:
    """Drop closures lasting over 24 h and records without segments."""
    kept = []
    for c in closures:
        if not c.segment_ids:
            continue
        if c.close_timestamp - c.open_timestamp > MAX_CLOSURE_MINUTES:
            continue
        kept.append(c)
    return kept


def _undirected_adjacency(model: NetworkModel) -> dict[str, set[str]]:
    adj: dict[str, set[str]] = {s: set() for s in model.segments}
    for s in model.segments:
        for u in model.upstream_of(s):
            adj[s].add(u)
            adj[u].add(s)
    return adj


def interpolate_alert_gap(alert_segments: set[str], model: NetworkModel) -> set[str]:
    """Fill single-segment gaps between pairs of alerted segments.

    For any two alerted segments at undirected graph distance exactly 2, the
    intermediate segment(s) join the alerted set. Longer gaps are left alone.
    """
    adj = _undirected_adjacency(model)
    alerted = sorted(alert_segments)
    added: set[str] = set()
    for i, a in enumerate(alerted):
        for b in alerted[i + 1:]:
            if b in adj[a]:
                continue  # distance 1, no gap
            added |= adj[a] & adj[b]
    return set(alert_segments) | added


def fuse_incidents(
    alerts: Iterable[AlertEvent],
    closures: Iterable[ClosureEvent],
    t: int,
    model: NetworkModel,
) -> IncidentStatusFrame:
    """Max-gate fusion of alert (1) and closure (2) sources at time ``t``.

    Alerts are those reported at ``t``; alert gap interpolation runs before
    the max-gate so a filled segment carries status 1.
    """
    status = np.zeros(model.n_segments, dtype=int)
    alert_segments = {a.segment_id for a in alerts if a.timestamp == t}
    for s in alert_segments:
        model.index_of(s)  # raises on unknown ids
    for s in interpolate_alert_gap(alert_segments, model):
        status[model.index_of(s)] = max(status[model.index_of(s)], STATUS_ALERT)
    for c in closures:
        if not c.active_at(t):
            continue
        for s in c.segment_ids:
            i = model.index_of(s)
            status[i] = max(status[i], STATUS_CLOSURE)
    return IncidentStatusFrame(timestamp=t, status=status)


def status_timeline(
    alerts: Sequence[AlertEvent],
    closures: Sequence[ClosureEvent],
    timeline: Sequence[int],
    model: NetworkModel,
) -> list[IncidentStatusFrame]:
    by_time: dict[int, list[AlertEvent]] = {}
    for a in alerts:
        by_time.setdefault(a.timestamp, []).append(a)
    active = list(closures)
    return [fuse_incidents(by_time.get(t, ()), active, t, model) for t in timeline]
