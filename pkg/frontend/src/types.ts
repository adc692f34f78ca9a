/** Wire types mirroring the service's JSON payloads. */

export interface RecommendationEvent {
  timestamp: number;
  scores: Record<string, number>;
  active_plan: string;
  candidate_plan: string;
  dwell_blocked: boolean;
  query_summary: Record<string, number>;
}

export interface EngagementRecord {
  timestamp: number;
  plan_id: string;
  action: "activate" | "stop" | "override";
  actor: "model" | "operator";
}

export interface NetworkSegment {
  id: string;
  role: "freeway" | "arterial" | "ramp";
  reference_speed: number;
  display_hint: [number, number];
}

export interface NetworkDoc {
  format_version: number;
  segments: NetworkSegment[];
  upstream_edges: [string, string][];
  target_segments: string[];
}

export interface PlanDoc {
  id: string;
  description: string;
  incident_segments: string[];
  arterial_segments: string[];
}

export interface PlansDoc {
  format_version: number;
  plans: PlanDoc[];
  null_plan: string;
}

export type OperatorAction = "accept" | "override" | "stop";

/** The service's clock advances one 5-minute step per event. */
export const CLOCK_STEP_MINUTES = 5;
