/** Shared wire types for the task service API and the trial record format
 * (version 1). Attention coordinates are egocentric: the agent sits at the
 * origin. */

export type Point = [number, number];

export interface GoalView {
  position: Point;
  radius: number;
}

/** Map payload served to the client: everything except hold positions. */
export interface MapPayload {
  index: number;
  map_id: string;
  practice: boolean;
  bounds: Point;
  start: Point;
  goals: GoalView[];
  reach_radius: number;
  fovea_radius: number;
  hold_count: number;
  n_maps: number;
}

export interface RevealedHold {
  id: number;
  position: Point;
}

export interface SessionInfo {
  session_id: string;
  n_maps: number;
  practice_first: boolean;
}

export interface NavigationEvent {
  t: number;
  target_hold_id: number | null;
  success: boolean;
}

export interface TrialRecordDoc {
  format: 1;
  map_id: string;
  actor: "HUMAN";
  outcome: "SUCCESS" | "TIMEOUT";
  duration: number;
  path_length: number;
  navigation: NavigationEvent[];
  attention: { t: number[]; x: number[]; y: number[] };
  meta: { session_id: string };
}

export interface SubmitResult {
  trial_id: string;
  score: number;
  cumulative_score: number;
  score_fraction: number;
  bonus_tier: number;
  bonus_total: number;
  anomalies: string[];
}

export const TRIAL_TIME_LIMIT_S = 60;
export const ATTENTION_HZ = 30;

/** Structural validation mirroring the server-side ingest rules; run before
 * upload so malformed assemblies fail loudly in the client. */
export function validateTrialRecord(doc: TrialRecordDoc): string[] {
  const problems: string[] = [];
  if (doc.format !== 1) problems.push("format must be 1");
  if (!doc.map_id) problems.push("map_id missing");
  if (doc.actor !== "HUMAN") problems.push("actor must be HUMAN");
  if (doc.outcome !== "SUCCESS" && doc.outcome !== "TIMEOUT") problems.push("bad outcome");
  if (!(doc.duration >= 0 && doc.duration <= TRIAL_TIME_LIMIT_S + 1e-6)) {
    problems.push(`duration ${doc.duration} outside [0, ${TRIAL_TIME_LIMIT_S}]`);
  }
  const successes = doc.navigation.filter((n) => n.success).length;
  if (doc.path_length !== successes) {
    problems.push(`path_length ${doc.path_length} != ${successes} successful events`);
  }
  const { t, x, y } = doc.attention;
  if (t.length !== x.length || t.length !== y.length) {
    problems.push("attention arrays must have equal length");
  }
  for (let i = 1; i < t.length; i++) {
    if (t[i] < t[i - 1]) {
      problems.push(`attention.t[${i}] non-monotone`);
      break;
    }
  }
  for (let i = 1; i < doc.navigation.length; i++) {
    if (doc.navigation[i].t < doc.navigation[i - 1].t) {
      problems.push(`navigation[${i}].t non-monotone`);
      break;
    }
  }
  return problems;
}
