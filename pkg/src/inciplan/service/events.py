"""Recommendation event payloads shared by the replay engine and the API."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping


@dataclass(frozen=True)
class RecommendationEvent:
    """One clock step of the recommender: scores, the active plan, and why."""

    timestamp: int
    scores: Mapping[str, float]
    active_plan: str
    candidate_plan: str
    dwell_blocked: bool
    query_summary: Mapping[str, float] = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {
                "timestamp": self.timestamp,
                "scores": {k: round(float(v), 6) for k, v in self.scores.items()},
                "active_plan": self.active_plan,
                "candidate_plan": self.candidate_plan,
                "dwell_blocked": self.dwell_blocked,
                "query_summary": {k: round(float(v), 4) for k, v in self.query_summary.items()},
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, line: str) -> "RecommendationEvent":
        d = json.loads(line)
        return cls(
            timestamp=int(d["timestamp"]),
            scores={k: float(v) for k, v in d["scores"].items()},
            active_plan=str(d["active_plan"]),
            candidate_plan=str(d["candidate_plan"]),
            dwell_blocked=bool(d["dwell_blocked"]),
            query_summary={k: float(v) for k, v in d.get("query_summary", {}).items()},
        )
