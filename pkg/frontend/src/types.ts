// Payload shapes for the session-analytics REST API. These mirror the JSON
// the service emits; the client never recomputes any of the analytics.

export type TimestampMs = number;

export const SIGNAL_KINDS = [
  "attention",
  "meditation",
  "heart_rate",
  "pupil_left",
  "pupil_right",
  "eeg_delta",
  "eeg_theta",
  "eeg_alpha",
  "eeg_beta",
  "eeg_gamma",
] as const;

export type SignalKind = (typeof SIGNAL_KINDS)[number];

export interface SessionWindow {
  start: TimestampMs;
  end: TimestampMs;
}

export interface CatalogEntry {
  session_id: string;
  learner_id: string;
  window: SessionWindow;
  created_at: TimestampMs;
}

export interface SignalDescriptor {
  kind: SignalKind;
  unit: string;
  row_count: number;
}

export interface MediaDescriptor {
  name: string;
  byte_size: number;
}

export interface SessionSummary {
  session_id: string;
  learner: { learner_id: string; attributes: Record<string, string> };
  window: SessionWindow;
  created_at: TimestampMs;
  signals: SignalDescriptor[];
  activity_count: number;
  blink_count: number;
  pretest_items: number;
  posttest_items: number;
  frame_videos: string[];
  media: MediaDescriptor[];
}

export interface SignalPoint {
  t: TimestampMs;
  mean: number;
  min: number;
  max: number;
  activity_id: string;
}

export interface SignalPointsPayload {
  kind: SignalKind;
  from: TimestampMs;
  to: TimestampMs;
  points: SignalPoint[];
}

export interface ActivityIntervalPayload {
  activity_id: string;
  t_start: TimestampMs;
  t_end: TimestampMs;
}

export interface ActivitiesPayload {
  source: string;
  intervals: ActivityIntervalPayload[];
}

export interface CorrelationsPayload {
  kinds: SignalKind[];
  r: (number | null)[][];
}

export interface PerformancePayload {
  per_item: [string, number | null, number | null][];
  pre_mean: number;
  post_mean: number;
  gain: number;
}

export interface SummaryRowPayload {
  activity_id: string;
  kind: SignalKind;
  mean: number | null;
  min: number | null;
  max: number | null;
  sample_count: number;
  duration_share: number;
}

export interface SummariesPayload {
  rows: SummaryRowPayload[];
}

export interface FramesPayload {
  video_id: string;
  rows: [number, TimestampMs][];
}

export interface ErrorPayload {
  error: string;
  detail?: string;
  incident_id?: string;
}
