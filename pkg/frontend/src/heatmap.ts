/**
 * Heatmap view model: turns a coverage payload into per-cell display
 * records. Every number shown is lifted verbatim from the payload — the
 * model only picks colors and formats tooltip text.
 */

import { bitrateColor, powerColor, type PowerRange, DEFAULT_POWER_RANGE } from "./palette.js";
import type { BitrateTier, CoveragePayload } from "./types.js";

export type HeatmapMode = "power" | "bitrate";

export interface HeatmapCell {
  col: number;
  row: number;
  power_dbm: number | null;
  snr_db: number | null;
  rate_mbps: number | null;
  serving_site: string | null;
  color: string;
  tooltip: string;
}

export interface HeatmapModel {
  mode: HeatmapMode;
  width_cells: number;
  height_cells: number;
  cells: HeatmapCell[];
}

function tooltipFor(cell: Omit<HeatmapCell, "color" | "tooltip">): string {
  if (cell.power_dbm === null || cell.serving_site === null) {
    return `(${cell.col}, ${cell.row}): unreached`;
  }
  return (
    `(${cell.col}, ${cell.row}): ${cell.power_dbm} dBm, ` +
    `SNR ${cell.snr_db} dB, ${cell.rate_mbps} Mbit/s via ${cell.serving_site}`
  );
}

export function buildHeatmap(
  coverage: CoveragePayload,
  mode: HeatmapMode,
  tiers: readonly BitrateTier[],
  range: PowerRange = DEFAULT_POWER_RANGE,
): HeatmapModel {
  const { width_cells, height_cells } = coverage;
  const cells: HeatmapCell[] = [];
  for (let row = 0; row < height_cells; row += 1) {
    for (let col = 0; col < width_cells; col += 1) {
      const index = row * width_cells + col;
      const base = {
        col,
        row,
        power_dbm: coverage.power_dbm[index] ?? null,
        snr_db: coverage.snr_db[index] ?? null,
        rate_mbps: coverage.rate_mbps[index] ?? null,
        serving_site: coverage.serving_site[index] ?? null,
      };
      const color =
        mode === "power" ? powerColor(base.power_dbm, range) : bitrateColor(base.rate_mbps, tiers);
      cells.push({ ...base, color, tooltip: tooltipFor(base) });
    }
  }
  return { mode, width_cells, height_cells, cells };
}
