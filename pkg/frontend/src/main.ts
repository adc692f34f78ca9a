/** Console entry point: wire the stream, the store, and the action queue. */

import { ActionQueue, newActionKey } from "./actions.js";
import { ApiClient } from "./api.js";
import { render } from "./render.js";
import {
  applyEvent,
  beginAction,
  confirmAction,
  initialState,
  markStreamEnded,
  rollbackAction,
  setConnected,
  setEngagements,
  type ConsoleState,
} from "./store.js";
import { subscribeStream } from "./sse.js";
import type { NetworkDoc, OperatorAction, PlansDoc, RecommendationEvent } from "./types.js";

const BASE_URL = window.location.origin;
const STEP_MS = 5000; // served replays pace ~one step per few seconds

const api = new ApiClient(BASE_URL);
const queue = new ActionQueue(BASE_URL);

let state: ConsoleState = initialState(STEP_MS);
let network: NetworkDoc | null = null;
let plans: PlansDoc | null = null;

function update(next: ConsoleState): void {
  state = next;
  render(document, state, network, plans, Date.now());
}

function submit(planId: string, action: OperatorAction): void {
  const latest = state.latestEvent;
  if (!latest) return;
  const key = newActionKey();
  const displayPlan = action === "stop" ? (plans?.null_plan ?? "NULL") : planId;
  update(beginAction(state, { key, planId, action, displayPlan }));
  void queue
    .submit({ planId, action, timestamp: latest.timestamp + 1 }, key)
    .then(async (outcome) => {
      if (!outcome.ok) {
        update(rollbackAction(state, key, outcome.reason ?? "rejected"));
        return;
      }
      if (outcome.record) update(confirmAction(state, outcome.record));
      const records = await api.engagementsSince(0);
      update(setEngagements(state, records));
    });
}

async function start(): Promise<void> {
  [network, plans] = await Promise.all([api.network(), api.plans()]);
  update(setEngagements(state, await api.engagementsSince(0)));

  subscribeStream({
    url: `${BASE_URL}/state/stream`,
    onEvent: (event) => {
      if (event.id === null) return;
      const payload = JSON.parse(event.data) as RecommendationEvent;
      update(applyEvent(state, event.id, payload, Date.now()));
    },
    onEnd: () => update(markStreamEnded(state)),
    onConnectionChange: (connected) => update(setConnected(state, connected)),
  });

  document.getElementById("accept")?.addEventListener("click", () => {
    const candidate = state.latestEvent?.candidate_plan;
    if (candidate) submit(candidate, "accept");
  });
  document.getElementById("stop")?.addEventListener("click", () => {
    const active = state.activePlan;
    if (active) submit(active, "stop");
  });
  document.getElementById("plan-buttons")?.addEventListener("click", (e) => {
    const target = e.target as HTMLElement;
    const plan = target.dataset["plan"];
    if (plan) submit(plan, "override");
  });

  setInterval(() => render(document, state, network, plans, Date.now()), 1000);
}

void start();
