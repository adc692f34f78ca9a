"""Plan-transition state machine with the minimum-dwell rule."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from inciplan.domain import NULL_PLAN

DEFAULT_DWELL_MINUTES = 20


@dataclass(frozen=True)
class PlanState:
    """Currently active plan and when it last changed."""

    active_plan: str = NULL_PLAN
    last_change: int | None = None
    dwell_minutes: int = DEFAULT_DWELL_MINUTES


@dataclass(frozen=True)
class PlanChange:
    timestamp: int
    from_plan: str
    to_plan: str


@dataclass(frozen=True)
class TransitionResult:
    state: PlanState
    candidate: str
    change: PlanChange | None
    dwell_blocked: bool


def step_transition(
    state: PlanState, scores: Mapping[str, float], now: int
) -> TransitionResult:
    """Move to the argmax-scored plan unless inside the dwell window.

    Ties break toward the incumbent plan, then mapping order. Activating the
    null plan means the incident signal timings are turned off.
    """
    best = max(scores.values())
    tied = [plan for plan, s in scores.items() if s == best]
    candidate = state.active_plan if state.active_plan in tied else tied[0]
    if candidate == state.active_plan:
        return TransitionResult(state, candidate, None, False)
    if state.last_change is not None and now - state.last_change < state.dwell_minutes:
        return TransitionResult(state, candidate, None, True)
    new_state = PlanState(
        active_plan=candidate, last_change=now, dwell_minutes=state.dwell_minutes
    )
    change = PlanChange(timestamp=now, from_plan=state.active_plan, to_plan=candidate)
    return TransitionResult(new_state, candidate, change, False)
