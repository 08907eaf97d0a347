import { resolveApiBase } from "./config";
import type {
  ActivitiesPayload,
  CatalogEntry,
  CorrelationsPayload,
  ErrorPayload,
  FramesPayload,
  PerformancePayload,
  SessionSummary,
  SignalKind,
  SignalPointsPayload,
  SummariesPayload,
  TimestampMs,
} from "./types";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    detail?: string,
  ) {
    super(detail ? `${code}: ${detail}` : code);
    this.name = "ApiError";
  }

  get notFound(): boolean {
    return this.status === 404;
  }
}

export interface SignalQuery {
  from?: TimestampMs;
  to?: TimestampMs;
  maxPoints?: number;
}

export interface CatalogQuery {
  learnerId?: string;
  from?: TimestampMs;
  to?: TimestampMs;
}

type FetchLike = (url: string) => Promise<Response>;

/** Thin typed client over the documented endpoints; nothing else. */
export class ApiClient {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl?: string, fetchFn?: FetchLike) {
    this.base = resolveApiBase(baseUrl);
    // Bind so a bare window.fetch reference keeps its receiver.
    this.fetchFn = fetchFn ?? ((url) => fetch(url));
  }

  async health(): Promise<{ status: string }> {
    return this.getJson("/healthz");
  }

  async listSessions(query: CatalogQuery = {}): Promise<CatalogEntry[]> {
    return this.getJson("/api/sessions", {
      learner_id: query.learnerId,
      from: query.from,
      to: query.to,
    });
  }

  async getSession(sessionId: string): Promise<SessionSummary> {
    return this.getJson(`/api/sessions/${encodeURIComponent(sessionId)}`);
  }

  async getSignal(
    sessionId: string,
    kind: SignalKind,
    query: SignalQuery = {},
  ): Promise<SignalPointsPayload> {
    return this.getJson(
      `/api/sessions/${encodeURIComponent(sessionId)}/signals/${kind}`,
      { from: query.from, to: query.to, max_points: query.maxPoints },
    );
  }

  async getActivities(sessionId: string): Promise<ActivitiesPayload> {
    return this.getJson(`/api/sessions/${encodeURIComponent(sessionId)}/activities`);
  }

  async getCorrelations(sessionId: string): Promise<CorrelationsPayload> {
    return this.getJson(
      `/api/sessions/${encodeURIComponent(sessionId)}/analytics/correlations`,
    );
  }

  async getPerformance(sessionId: string): Promise<PerformancePayload> {
    return this.getJson(`/api/sessions/${encodeURIComponent(sessionId)}/performance`);
  }

  async getSummaries(sessionId: string): Promise<SummariesPayload> {
    return this.getJson(`/api/sessions/${encodeURIComponent(sessionId)}/summaries`);
  }

  async getFrames(sessionId: string, videoId: string): Promise<FramesPayload> {
    return this.getJson(
      `/api/sessions/${encodeURIComponent(sessionId)}/frames/${encodeURIComponent(videoId)}`,
    );
  }

  /** URL for a media file; handed to the video element, which range-requests it. */
  mediaUrl(sessionId: string, name: string): string {
    return `${this.base}/api/sessions/${encodeURIComponent(sessionId)}/media/${encodeURIComponent(name)}`;
  }

  private async getJson<T>(
    path: string,
    params?: Record<string, string | number | undefined>,
  ): Promise<T> {
    let url = this.base + path;
    if (params) {
      const search = new URLSearchParams();
      for (const [key, value] of Object.entries(params)) {
        if (value !== undefined) {
          search.set(key, String(value));
        }
      }
      const encoded = search.toString();
      if (encoded) {
        url += `?${encoded}`;
      }
    }
    const response = await this.fetchFn(url);
    if (!response.ok) {
      let payload: ErrorPayload | undefined;
      try {
        payload = (await response.json()) as ErrorPayload;
      } catch {
        payload = undefined;
      }
      throw new ApiError(response.status, payload?.error ?? "http_error", payload?.detail);
    }
    return (await response.json()) as T;
  }
}
