import type { TimeBoundComponent } from "./timeline";
import type { FramesPayload, TimestampMs } from "./types";

/** Latest frame row with frame time <= t, or null before the first frame. */
export function frameAt(frames: FramesPayload, t: TimestampMs): [number, TimestampMs] | null {
  const rows = frames.rows;
  let lo = 0;
  let hi = rows.length;
  while (lo < hi) {
    const mid = (lo + hi) >> 1;
    if (rows[mid][1] <= t) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return lo === 0 ? null : rows[lo - 1];
}

/**
 * State behind the video element. The cursor drives the video (seek), never
 * the other way round, so signal playback works with no media attached.
 */
export class VideoScrubber implements TimeBoundComponent {
  readonly name: string;
  private cursor: TimestampMs;

  constructor(
    videoId: string,
    readonly sessionStartMs: TimestampMs,
    private readonly frames: FramesPayload | null = null,
  ) {
    this.name = `video-${videoId}`;
    this.cursor = sessionStartMs;
  }

  seek(t: TimestampMs): void {
    this.cursor = t;
  }

  reportedTime(): TimestampMs {
    return this.cursor;
  }

  /** Playback offset handed to the media element. */
  get positionSeconds(): number {
    return (this.cursor - this.sessionStartMs) / 1000;
  }

  currentFrame(): [number, TimestampMs] | null {
    return this.frames ? frameAt(this.frames, this.cursor) : null;
  }
}
