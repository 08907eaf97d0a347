export { ApiClient, ApiError } from "./api";
export type { CatalogQuery, SignalQuery } from "./api";
export { resolveApiBase } from "./config";
export { ActivityTrack, intervalAt } from "./activityTrack";
export { buildHeatmap, formatCell } from "./heatmap";
export type { HeatmapCell, HeatmapModel } from "./heatmap";
export { loadSessionBundle } from "./model";
export type { BundleResult, DashboardModel } from "./model";
export { buildPerformanceView, formatGain } from "./performance";
export type { PerformanceBar, PerformanceModel } from "./performance";
export { maxPointsForWidth, SignalChart } from "./signals";
export { TimelineStore } from "./timeline";
export type { TimeBoundComponent, ViewState } from "./timeline";
export { frameAt, VideoScrubber } from "./video";
export * from "./types";
