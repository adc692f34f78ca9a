/** REST calls to the recommendation service. */

import type {
  EngagementRecord,
  NetworkDoc,
  PlansDoc,
  RecommendationEvent,
} from "./types.js";

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`);
    if (!response.ok) throw new Error(`${path}: ${response.status}`);
    return (await response.json()) as T;
  }

  network(): Promise<NetworkDoc> {
    return this.getJson("/network");
  }

  plans(): Promise<PlansDoc> {
    return this.getJson("/plans");
  }

  engagementsSince(since: number): Promise<EngagementRecord[]> {
    return this.getJson(`/engagements?since=${since}`);
  }

  /** Polling fallback for environments where the push stream is unavailable. */
  currentRecommendation(): Promise<RecommendationEvent> {
    return this.getJson("/recommendations/current");
  }
}
