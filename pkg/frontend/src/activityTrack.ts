import type { TimeBoundComponent } from "./timeline";
import type { ActivitiesPayload, ActivityIntervalPayload, TimestampMs } from "./types";

/**
 * Which interval covers t. Overlaps resolve to the latest start, ties to the
 * smallest activity id; gaps report null (rendered as no highlight). This
 * mirrors how the backend labels matrix rows, using only the payload data.
 */
export function intervalAt(
  intervals: ActivityIntervalPayload[],
  t: TimestampMs,
): ActivityIntervalPayload | null {
  let best: ActivityIntervalPayload | null = null;
  for (const interval of intervals) {
    if (interval.t_start > t || interval.t_end < t) {
      continue;
    }
    if (
      best === null ||
      interval.t_start > best.t_start ||
      (interval.t_start === best.t_start && interval.activity_id < best.activity_id)
    ) {
      best = interval;
    }
  }
  return best;
}

/** The gantt-style strip under the charts; highlights the current activity. */
export class ActivityTrack implements TimeBoundComponent {
  readonly name = "activity-track";
  private cursor: TimestampMs;

  constructor(private readonly payload: ActivitiesPayload) {
    this.cursor = 0;
  }

  seek(t: TimestampMs): void {
    this.cursor = t;
  }

  reportedTime(): TimestampMs {
    return this.cursor;
  }

  highlightedActivity(): string | null {
    return intervalAt(this.payload.intervals, this.cursor)?.activity_id ?? null;
  }

  get intervals(): readonly ActivityIntervalPayload[] {
    return this.payload.intervals;
  }
}
