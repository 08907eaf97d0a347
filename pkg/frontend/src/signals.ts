import type { ApiClient } from "./api";
import type { TimeBoundComponent } from "./timeline";
import type { SignalKind, SignalPointsPayload, TimestampMs } from "./types";

/**
 * One requested point per horizontal pixel is the most a chart can show;
 * the server additionally enforces its own cap.
 */
export function maxPointsForWidth(pixelWidth: number): number {
  return Math.max(1, Math.floor(pixelWidth));
}

/** A lazily loaded min/mean/max band for one signal kind. */
export class SignalChart implements TimeBoundComponent {
  readonly name: string;
  private cursor: TimestampMs = 0;
  private payload: SignalPointsPayload | null = null;

  constructor(
    private readonly client: ApiClient,
    private readonly sessionId: string,
    readonly kind: SignalKind,
    private readonly pixelWidth: number,
  ) {
    this.name = `chart-${kind}`;
  }

  /** Fetch (or refetch after a zoom) the band for the given range. */
  async load(from?: TimestampMs, to?: TimestampMs): Promise<SignalPointsPayload> {
    this.payload = await this.client.getSignal(this.sessionId, this.kind, {
      from,
      to,
      maxPoints: maxPointsForWidth(this.pixelWidth),
    });
    return this.payload;
  }

  get loaded(): boolean {
    return this.payload !== null;
  }

  get points(): SignalPointsPayload["points"] {
    return this.payload?.points ?? [];
  }

  seek(t: TimestampMs): void {
    this.cursor = t;
  }

  reportedTime(): TimestampMs {
    return this.cursor;
  }

  /** Value under the cursor line: the last loaded point at or before t. */
  valueAtCursor(): number | null {
    const points = this.points;
    let best: number | null = null;
    for (const point of points) {
      if (point.t > this.cursor) {
        break;
      }
      best = point.mean;
    }
    return best;
  }
}
