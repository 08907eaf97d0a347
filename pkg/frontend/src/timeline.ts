import type { SessionWindow, TimestampMs } from "./types";

/** Anything that follows the shared cursor: charts, activity track, video. */
export interface TimeBoundComponent {
  readonly name: string;
  seek(t: TimestampMs): void;
  reportedTime(): TimestampMs;
}

export interface ViewState {
  sessionId: string;
  cursorT: TimestampMs;
  playing: boolean;
  timeRange: { from: TimestampMs; to: TimestampMs };
}

/**
 * Single source of truth for the timeline cursor. Every registered
 * component is seeked on each cursor move, so after any setCursor all
 * components report the same t. Playback is driven by the client clock
 * (tick), not by the video element, so sessions without media still play.
 */
export class TimelineStore {
  private readonly components: TimeBoundComponent[] = [];
  private cursor: TimestampMs;
  private isPlaying = false;
  private range: { from: TimestampMs; to: TimestampMs };

  constructor(
    readonly sessionId: string,
    readonly window: SessionWindow,
  ) {
    if (window.start >= window.end) {
      throw new Error(`degenerate window ${window.start}..${window.end}`);
    }
    this.cursor = window.start;
    this.range = { from: window.start, to: window.end };
  }

  register(component: TimeBoundComponent): void {
    this.components.push(component);
    component.seek(this.cursor);
  }

  get state(): ViewState {
    return {
      sessionId: this.sessionId,
      cursorT: this.cursor,
      playing: this.isPlaying,
      timeRange: { ...this.range },
    };
  }

  get cursorT(): TimestampMs {
    return this.cursor;
  }

  /** Clamp into the session window, then fan out to every component. */
  setCursor(t: TimestampMs): ViewState {
    const clamped = Math.min(Math.max(t, this.window.start), this.window.end);
    this.cursor = clamped;
    for (const component of this.components) {
      component.seek(clamped);
    }
    return this.state;
  }

  setTimeRange(from: TimestampMs, to: TimestampMs): ViewState {
    const lo = Math.max(from, this.window.start);
    const hi = Math.min(to, this.window.end);
    if (lo >= hi) {
      throw new Error(`empty time range ${from}..${to}`);
    }
    this.range = { from: lo, to: hi };
    return this.state;
  }

  play(): void {
    this.isPlaying = true;
  }

  pause(): void {
    this.isPlaying = false;
  }

  /** Advance by one clock step while playing; pauses at the window end. */
  tick(elapsedMs: number, rate = 1): ViewState {
    if (this.isPlaying && elapsedMs > 0) {
      const next = this.cursor + Math.round(elapsedMs * rate);
      if (next >= this.window.end) {
        this.setCursor(this.window.end);
        this.isPlaying = false;
      } else {
        this.setCursor(next);
      }
    }
    return this.state;
  }

  /** The worst disagreement between the cursor and what components show. */
  maxComponentLagMs(): number {
    let worst = 0;
    for (const component of this.components) {
      worst = Math.max(worst, Math.abs(component.reportedTime() - this.cursor));
    }
    return worst;
  }
}
