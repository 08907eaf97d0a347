import type { CorrelationsPayload, SignalKind } from "./types";

export interface HeatmapCell {
  row: SignalKind;
  col: SignalKind;
  value: number | null;
  /** Rendered text; undefined correlations are blank cells. */
  text: string;
  tooltip: string | null;
}

export interface HeatmapModel {
  kinds: SignalKind[];
  cells: HeatmapCell[][];
}

export function formatCell(value: number | null): { text: string; tooltip: string | null } {
  if (value === null) {
    return { text: "", tooltip: "undefined" };
  }
  return { text: value.toFixed(2), tooltip: null };
}

/** Pure view over the payload; no r is recomputed client-side. */
export function buildHeatmap(payload: CorrelationsPayload): HeatmapModel {
  const cells = payload.r.map((rowValues, i) =>
    rowValues.map((value, j) => {
      const { text, tooltip } = formatCell(value);
      return {
        row: payload.kinds[i],
        col: payload.kinds[j],
        value,
        text,
        tooltip,
      };
    }),
  );
  return { kinds: [...payload.kinds], cells };
}
