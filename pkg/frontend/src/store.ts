/**
 * Console state: a pure reducer over stream events and operator actions.
 *
 * The rendered active plan always comes from the latest stream event; a
 * pending operator action is an overlay, never a substitute.
 */

import type { EngagementRecord, RecommendationEvent } from "./types.js";

export interface PendingAction {
  key: string;
  planId: string;
  action: string;
  /** What the overlay shows while unconfirmed (stop displays the null plan). */
  displayPlan: string;
}

export interface ConsoleState {
  /** Events in arrival order; ids strictly increasing (duplicates dropped). */
  events: RecommendationEvent[];
  lastEventId: number | null;
  /** Latest stream event's active plan — the authoritative display value. */
  activePlan: string | null;
  latestEvent: RecommendationEvent | null;
  /** Wall-clock ms when the last event arrived (staleness reference). */
  lastEventAtMs: number | null;
  connected: boolean;
  streamEnded: boolean;
  pendingAction: PendingAction | null;
  engagements: EngagementRecord[];
  toasts: string[];
  /** Wall-clock ms the service takes per 5-minute replay step. */
  stepMs: number;
}

export function initialState(stepMs: number): ConsoleState {
  return {
    events: [],
    lastEventId: null,
    activePlan: null,
    latestEvent: null,
    lastEventAtMs: null,
    connected: false,
    streamEnded: false,
    pendingAction: null,
    engagements: [],
    toasts: [],
    stepMs,
  };
}

/** Apply one stream event; out-of-order or duplicate ids are dropped. */
export function applyEvent(
  state: ConsoleState,
  id: number,
  event: RecommendationEvent,
  nowMs: number,
): ConsoleState {
  if (state.lastEventId !== null && id <= state.lastEventId) {
    return state; // duplicate or replayed event: rendered once already
  }
  const pendingConfirmed =
    state.pendingAction !== null && event.active_plan === state.pendingAction.displayPlan;
  return {
    ...state,
    events: [...state.events, event],
    lastEventId: id,
    activePlan: event.active_plan,
    latestEvent: event,
    lastEventAtMs: nowMs,
    pendingAction: pendingConfirmed ? null : state.pendingAction,
  };
}

export function setConnected(state: ConsoleState, connected: boolean): ConsoleState {
  return { ...state, connected };
}

export function markStreamEnded(state: ConsoleState): ConsoleState {
  return { ...state, streamEnded: true };
}

export function beginAction(state: ConsoleState, pending: PendingAction): ConsoleState {
  return { ...state, pendingAction: pending };
}

/** Roll an optimistic action back (non-2xx) and surface the server reason. */
export function rollbackAction(state: ConsoleState, key: string, reason: string): ConsoleState {
  if (state.pendingAction?.key !== key) return { ...state, toasts: [...state.toasts, reason] };
  return { ...state, pendingAction: null, toasts: [...state.toasts, reason] };
}

export function confirmAction(state: ConsoleState, record: EngagementRecord): ConsoleState {
  return { ...state, engagements: [...state.engagements, record] };
}

export function setEngagements(state: ConsoleState, records: EngagementRecord[]): ConsoleState {
  return { ...state, engagements: records };
}

/** Stale once the gap since the last event exceeds two clock steps. */
export function isStale(state: ConsoleState, nowMs: number): boolean {
  if (state.streamEnded || state.lastEventAtMs === null) return false;
  return nowMs - state.lastEventAtMs > 2 * state.stepMs;
}

/** Age of the last event in whole seconds, for the stale banner. */
export function lastEventAgeSeconds(state: ConsoleState, nowMs: number): number | null {
  if (state.lastEventAtMs === null) return null;
  return Math.floor((nowMs - state.lastEventAtMs) / 1000);
}

/** The plan the operator sees as active: stream truth plus pending overlay. */
export function displayedPlan(state: ConsoleState): { plan: string | null; pending: boolean } {
  if (state.pendingAction !== null) {
    return { plan: state.pendingAction.displayPlan, pending: true };
  }
  return { plan: state.activePlan, pending: false };
}
