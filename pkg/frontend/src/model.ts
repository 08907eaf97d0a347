import { ApiClient, ApiError } from "./api";
import { ActivityTrack } from "./activityTrack";
import { buildHeatmap, HeatmapModel } from "./heatmap";
import { buildPerformanceView, PerformanceModel } from "./performance";
import { SignalChart } from "./signals";
import { TimelineStore } from "./timeline";
import { VideoScrubber } from "./video";
import type { SessionSummary, SummariesPayload } from "./types";

export interface DashboardModel {
  summary: SessionSummary;
  timeline: TimelineStore;
  charts: SignalChart[];
  activityTrack: ActivityTrack;
  videos: VideoScrubber[];
  heatmap: HeatmapModel;
  performance: PerformanceModel;
  summaries: SummariesPayload;
}

export type BundleResult =
  | { ok: true; model: DashboardModel }
  | { ok: false; banner: string };

/**
 * Fetch everything a session view needs up front except the signal bands,
 * which each chart loads lazily sized to the viewport. Failures come back
 * as a banner message instead of a thrown error so the catalog stays up.
 */
export async function loadSessionBundle(
  client: ApiClient,
  sessionId: string,
  viewportPixelWidth: number,
): Promise<BundleResult> {
  try {
    const [summary, activities, correlations, performance, summaries] = await Promise.all([
      client.getSession(sessionId),
      client.getActivities(sessionId),
      client.getCorrelations(sessionId),
      client.getPerformance(sessionId),
      client.getSummaries(sessionId),
    ]);
    const timeline = new TimelineStore(sessionId, summary.window);
    const charts = summary.signals
      .filter((descriptor) => descriptor.row_count > 0)
      .map((descriptor) => new SignalChart(client, sessionId, descriptor.kind, viewportPixelWidth));
    const activityTrack = new ActivityTrack(activities);
    const videos = summary.frame_videos.map(
      (videoId) => new VideoScrubber(videoId, summary.window.start),
    );
    for (const component of [...charts, activityTrack, ...videos]) {
      timeline.register(component);
    }
    return {
      ok: true,
      model: {
        summary,
        timeline,
        charts,
        activityTrack,
        videos,
        heatmap: buildHeatmap(correlations),
        performance: buildPerformanceView(performance),
        summaries,
      },
    };
  } catch (error) {
    if (error instanceof ApiError) {
      const what = error.notFound ? `no session ${JSON.stringify(sessionId)}` : error.message;
      return { ok: false, banner: `failed to load session: ${what}` };
    }
    return { ok: false, banner: `failed to load session: ${String(error)}` };
  }
}
