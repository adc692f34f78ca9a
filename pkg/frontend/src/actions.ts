/**
 * Operator actions: one POST per click, serialized, optimistic with rollback.
 */

import type { EngagementRecord, OperatorAction } from "./types.js";

export interface ActionRequest {
  planId: string;
  action: OperatorAction;
  timestamp: number;
}

export interface ActionOutcome {
  key: string;
  ok: boolean;
  record?: EngagementRecord;
  reason?: string;
}

let clickCounter = 0;

/** Idempotency key minted once per click, attached to exactly one POST. */
export function newActionKey(): string {
  clickCounter += 1;
  return `act-${Date.now()}-${clickCounter}`;
}

/** Console actions map onto the service's engagement verbs. */
export function toServerAction(action: OperatorAction): "activate" | "override" | "stop" {
  return action === "accept" ? "activate" : action;
}

export class ActionQueue {
  private chain: Promise<unknown> = Promise.resolve();
  private postedKeys = new Set<string>();

  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  /**
   * Enqueue one action. The returned promise resolves with the outcome;
   * actions run strictly in submission order.
   */
  submit(request: ActionRequest, key: string = newActionKey()): Promise<ActionOutcome> {
    const task = this.chain.then(() => this.post(request, key));
    this.chain = task.catch(() => undefined);
    return task;
  }

  private async post(request: ActionRequest, key: string): Promise<ActionOutcome> {
    if (this.postedKeys.has(key)) {
      return { key, ok: false, reason: "duplicate action key" };
    }
    this.postedKeys.add(key);
    const response = await this.fetchImpl(`${this.baseUrl}/engagements`, {
      method: "POST",
      headers: {
        "content-type": "application/json",
        "x-idempotency-key": key,
      },
      body: JSON.stringify({
        plan_id: request.planId,
        action: toServerAction(request.action),
        timestamp: request.timestamp,
      }),
    });
    if (!response.ok) {
      let reason = `rejected (${response.status})`;
      try {
        const body = (await response.json()) as { detail?: string };
        if (body.detail) reason = body.detail;
      } catch {
        // non-JSON error body: keep the status line
      }
      return { key, ok: false, reason };
    }
    const record = (await response.json()) as EngagementRecord;
    return { key, ok: true, record };
  }
}
