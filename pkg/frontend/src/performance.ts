import type { PerformancePayload } from "./types";

export interface PerformanceBar {
  item: string;
  /** Bar heights in [0, 1]; null renders as a missing bar. */
  pre: number | null;
  post: number | null;
}

export interface PerformanceModel {
  bars: PerformanceBar[];
  preMean: number;
  postMean: number;
  gain: number;
  gainLabel: string;
}

/** "+0.5", "-0.25", "+0": sign always shown, trailing zeros dropped. */
export function formatGain(gain: number): string {
  const rounded = Math.round(gain * 100) / 100;
  const sign = rounded < 0 ? "-" : "+";
  return sign + String(Math.abs(rounded));
}

export function buildPerformanceView(payload: PerformancePayload): PerformanceModel {
  return {
    bars: payload.per_item.map(([item, pre, post]) => ({ item, pre, post })),
    preMean: payload.pre_mean,
    postMean: payload.post_mean,
    gain: payload.gain,
    gainLabel: formatGain(payload.gain),
  };
}
