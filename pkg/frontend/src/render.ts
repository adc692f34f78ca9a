/** DOM rendering for the operator console (thin layer over the store). */

import type { ConsoleState } from "./store.js";
import { displayedPlan, isStale, lastEventAgeSeconds } from "./store.js";
import type { NetworkDoc, PlansDoc } from "./types.js";

export interface ScoreBar {
  plan: string;
  /** Exactly the streamed score; never renormalized client-side. */
  value: number;
  widthPct: number;
  active: boolean;
}

const BAR_FULL_SCALE = 20; // score units that fill the bar

/** Pure view model for the score panel; values pass through untouched. */
export function scoreBarModel(
  scores: Record<string, number>,
  activePlan: string | null,
): ScoreBar[] {
  return Object.entries(scores).map(([plan, value]) => ({
    plan,
    value,
    widthPct: Math.max(0, Math.min(100, (value / BAR_FULL_SCALE) * 100)),
    active: plan === activePlan,
  }));
}

/** Corridor TTI to a strip-map color (green -> amber -> red). */
export function ttiColor(tti: number): string {
  if (tti < 1.3) return "#2e9e4f";
  if (tti < 2.0) return "#d9a514";
  if (tti < 4.0) return "#e06c1f";
  return "#c22828";
}

export function renderStripMap(network: NetworkDoc, summary: Record<string, number>): string {
  const xs = network.segments.map((s) => s.display_hint[0]);
  const width = (Math.max(...xs) + 1) * 60;
  const parts: string[] = [
    `<svg viewBox="0 0 ${width} 200" xmlns="http://www.w3.org/2000/svg">`,
  ];
  for (const seg of network.segments) {
    const [x, y] = seg.display_hint;
    const tti = summary[seg.role] ?? 1.0;
    parts.push(
      `<circle cx="${30 + x * 55}" cy="${40 + y * 60}" r="11" fill="${ttiColor(tti)}">` +
        `<title>${seg.id} (${seg.role})</title></circle>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}

export function render(
  root: Document,
  state: ConsoleState,
  network: NetworkDoc | null,
  plans: PlansDoc | null,
  nowMs: number,
): void {
  const banner = root.getElementById("stale-banner");
  if (banner) {
    const stale = isStale(state, nowMs);
    banner.hidden = !stale;
    if (stale) {
      const age = lastEventAgeSeconds(state, nowMs);
      banner.textContent = `STALE — last event ${age}s ago`;
    }
  }
  const connection = root.getElementById("connection");
  if (connection) {
    connection.textContent = state.streamEnded
      ? "replay finished"
      : state.connected
        ? "live"
        : "reconnecting…";
  }

  const active = root.getElementById("active-plan");
  if (active) {
    const shown = displayedPlan(state);
    active.textContent = shown.plan ?? "—";
    active.classList.toggle("pending", shown.pending);
  }

  const event = state.latestEvent;
  const scorePanel = root.getElementById("scores");
  if (scorePanel && event) {
    scorePanel.innerHTML = scoreBarModel(event.scores, event.active_plan)
      .map(
        (bar) =>
          `<div class="score-row${bar.active ? " active" : ""}">` +
          `<span class="plan">${bar.plan}</span>` +
          `<span class="bar"><span style="width:${bar.widthPct.toFixed(1)}%"></span></span>` +
          `<span class="value" data-score="${bar.value}">${bar.value.toFixed(3)}</span></div>`,
      )
      .join("");
  }

  const dwell = root.getElementById("dwell-indicator");
  if (dwell && event) {
    dwell.hidden = !event.dwell_blocked;
    if (event.dwell_blocked) {
      dwell.textContent = `switch to ${event.candidate_plan} suppressed (dwell)`;
    }
  }

  const map = root.getElementById("strip-map");
  if (map && network && event) {
    map.innerHTML = renderStripMap(network, event.query_summary);
  }

  const ticker = root.getElementById("ticker");
  if (ticker) {
    const items: string[] = [];
    let previous: string | null = null;
    for (const e of state.events) {
      if (previous !== null && e.active_plan !== previous) {
        items.push(`<li>t=${e.timestamp}: plan ${previous} → ${e.active_plan}</li>`);
      }
      previous = e.active_plan;
    }
    ticker.innerHTML = items.slice(-8).join("");
  }

  const history = root.getElementById("engagements");
  if (history) {
    history.innerHTML = state.engagements
      .slice(-12)
      .map(
        (r) =>
          `<tr><td>${r.timestamp}</td><td>${r.plan_id}</td>` +
          `<td>${r.action}</td><td>${r.actor}</td></tr>`,
      )
      .join("");
  }

  const toasts = root.getElementById("toasts");
  if (toasts) {
    toasts.innerHTML = state.toasts
      .slice(-3)
      .map((t) => `<div class="toast">${t}</div>`)
      .join("");
  }

  const planButtons = root.getElementById("plan-buttons");
  if (planButtons && plans && planButtons.childElementCount === 0) {
    planButtons.innerHTML = plans.plans
      .map((p) => `<button data-plan="${p.id}" title="${p.description}">${p.id}</button>`)
      .join("");
  }
}
