"""Plan-key encoding of incident signal-plan triggering conditions."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from inciplan.domain import NULL_PLAN, DomainError, NetworkModel

PLAN_FORMAT_VERSION = 1

KEY_INCIDENT = 1
KEY_ARTERIAL = 2


@dataclass(frozen=True)
class PlanDefinition:
    """One contingency plan: id, free-text description, triggering segments."""

    plan_id: str
    description: str
    incident_segments: tuple[str, ...]
    arterial_segments: tuple[str, ...]


class PlanKeyMatrix:
    """Per-plan segment coding over the target-segment axis.

    1 marks incident-triggering segments, 2 affected arterials, 0 uninvolved.
    The null plan (all zeros) is always the last row.
    """

    def __init__(self, definitions: Sequence[PlanDefinition], model: NetworkModel):
        self.segments = tuple(model.target_segments)
        seg_index = {s: i for i, s in enumerate(self.segments)}
        plans: list[str] = []
        rows: list[np.ndarray] = []
        self.definitions = tuple(definitions)
        for d in definitions:
            if d.plan_id == NULL_PLAN:
                raise DomainError("the null plan is implicit; do not define it")
            if not d.incident_segments or not d.arterial_segments:
                raise DomainError(
                    f"plan {d.plan_id!r} needs at least one incident and one arterial segment"
                )
            row = np.zeros(len(self.segments), dtype=int)
            for s in d.incident_segments:
                if s not in seg_index:
                    raise DomainError(f"plan {d.plan_id!r} references unknown segment {s!r}")
                row[seg_index[s]] = KEY_INCIDENT
            for s in d.arterial_segments:
                if s not in seg_index:
                    raise DomainError(f"plan {d.plan_id!r} references unknown segment {s!r}")
                if row[seg_index[s]] == KEY_INCIDENT:
                    raise DomainError(
                        f"plan {d.plan_id!r}: segment {s!r} is both incident and arterial"
                    )
                row[seg_index[s]] = KEY_ARTERIAL
            plans.append(d.plan_id)
            rows.append(row)
        plans.append(NULL_PLAN)
        rows.append(np.zeros(len(self.segments), dtype=int))
        self.plans = tuple(plans)
        self.keys = np.stack(rows)

    def key_row(self, plan_id: str) -> np.ndarray:
        try:
            return self.keys[self.plans.index(plan_id)]
        except ValueError:
            raise DomainError(f"unknown plan id: {plan_id!r}") from None

    @property
    def non_null_plans(self) -> tuple[str, ...]:
        return self.plans[:-1]


def save_plans(path, definitions: Sequence[PlanDefinition]) -> None:
    doc = {
        "format_version": PLAN_FORMAT_VERSION,
        "plans": [
            {
                "id": d.plan_id,
                "description": d.description,
                "incident_segments": list(d.incident_segments),
                "arterial_segments": list(d.arterial_segments),
            }
            for d in definitions
        ],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_plans(path) -> list[PlanDefinition]:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("format_version") != PLAN_FORMAT_VERSION:
        raise DomainError(
            f"unsupported plan file format_version: {doc.get('format_version')!r}"
        )
    return [
        PlanDefinition(
            plan_id=str(p["id"]),
            description=str(p.get("description", "")),
            incident_segments=tuple(p["incident_segments"]),
            arterial_segments=tuple(p["arterial_segments"]),
        )
        for p in doc["plans"]
    ]
