"""Recommendation timeline scoring: precision/recall and alert lead time."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from inciplan.domain import NULL_PLAN, DomainError


@dataclass(frozen=True)
class EngagementWindow:
    plan_id: str
    start: int
    end: int  # exclusive

    def contains(self, t: int) -> bool:
        return self.start <= t < self.end


@dataclass
class RecommendationReport:
    macro_precision: float
    macro_recall: float
    per_plan_precision: dict[str, float]
    per_plan_recall: dict[str, float]
    lead_time: dict[str, int | None]
    window_coverage: dict[str, float]


def truth_plan_at(t: int, windows: Sequence[EngagementWindow]) -> str:
    for w in windows:
        if w.contains(t):
            return w.plan_id
    return NULL_PLAN


def windows_from_log(records) -> list[EngagementWindow]:
    """Reconstruct engagement windows from an activate/stop record stream.

    An activate or override of a different plan closes any open window; a
    window left open at the end of the log is dropped (still active).
    """
    windows: list[EngagementWindow] = []
    active: str | None = None
    started = 0
    for record in records:
        if record.action in ("activate", "override") and record.plan_id != NULL_PLAN:
            if active is not None and record.plan_id != active:
                windows.append(EngagementWindow(active, started, record.timestamp))
            if active != record.plan_id:
                active = record.plan_id
                started = record.timestamp
        elif record.action == "stop" or record.plan_id == NULL_PLAN:
            if active is not None:
                windows.append(EngagementWindow(active, started, record.timestamp))
                active = None
    return windows


def evaluate_recommendations(
    recommended: Sequence[tuple[int, str]],
    truth_windows: Sequence[EngagementWindow],
    first_alerts: Mapping[str, int] | None = None,
) -> RecommendationReport:
    """Per-timestamp comparison during engagement periods.

    Precision/recall are macro-averaged over non-null plans; recommending
    the null plan inside a window counts against recall only (stopping early
    is a miss, not a false positive). Lead time is first-alert time minus
    the first timestamp the plan was recommended anywhere on the timeline
    (positive = recommended ahead of the alert).
    """
    if not truth_windows:
        raise DomainError("empty engagement log")
    truth_plans = sorted({w.plan_id for w in truth_windows})
    if NULL_PLAN in truth_plans:
        raise DomainError("engagement windows must name non-null plans")

    tp: dict[str, int] = {}
    fp: dict[str, int] = {}
    fn: dict[str, int] = {}
    window_steps: dict[str, int] = {}
    for t, rec in recommended:
        truth = truth_plan_at(t, truth_windows)
        if truth == NULL_PLAN:
            continue  # only engagement-period timestamps are scored
        window_steps[truth] = window_steps.get(truth, 0) + 1
        if rec == truth:
            tp[rec] = tp.get(rec, 0) + 1
        else:
            fn[truth] = fn.get(truth, 0) + 1
            if rec != NULL_PLAN:
                fp[rec] = fp.get(rec, 0) + 1

    per_precision: dict[str, float] = {}
    per_recall: dict[str, float] = {}
    for plan in truth_plans:
        denom = tp.get(plan, 0) + fn.get(plan, 0)
        per_recall[plan] = tp.get(plan, 0) / denom if denom else 0.0
    predicted_plans = sorted(set(tp) | set(fp))
    for plan in predicted_plans:
        per_precision[plan] = tp.get(plan, 0) / (tp.get(plan, 0) + fp.get(plan, 0))

    macro_recall = sum(per_recall.values()) / len(per_recall)
    macro_precision = (
        sum(per_precision.values()) / len(per_precision) if per_precision else 0.0
    )

    lead: dict[str, int | None] = {}
    if first_alerts:
        for plan, alert_time in first_alerts.items():
            first_rec = next((t for t, rec in recommended if rec == plan), None)
            lead[plan] = None if first_rec is None else alert_time - first_rec

    coverage = {
        plan: per_recall.get(plan, 0.0)
        for plan in truth_plans
    }
    return RecommendationReport(
        macro_precision=macro_precision,
        macro_recall=macro_recall,
        per_plan_precision=per_precision,
        per_plan_recall=per_recall,
        lead_time=lead,
        window_coverage=coverage,
    )
