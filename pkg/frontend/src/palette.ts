/**
 * Color mapping for overlays.
 *
 * Power uses a fixed dBm range with a configurable clamp so colors stay
 * comparable across runs instead of auto-scaling to each result. Bitrate
 * uses one discrete color per tier of the scenario's own bitrate table,
 * so the map's legend is exactly the table the service applied.
 *
 * Everything here is linear interpolation and lookup — no signal math.
 */

import type { BitrateTier } from "./types.js";

export interface PowerRange {
  /** Values at or below this clamp to the cold end. */
  min_dbm: number;
  /** Values at or above this clamp to the hot end. */
  max_dbm: number;
}

/** Default display range: thermal floor up to a strong indoor signal. */
export const DEFAULT_POWER_RANGE: PowerRange = { min_dbm: -90.0, max_dbm: -30.0 };

const COLD: readonly [number, number, number] = [34, 60, 120]; // deep blue
const HOT: readonly [number, number, number] = [236, 92, 32]; // hot orange

export const UNREACHED_COLOR = "rgb(148, 148, 148)";

function channel(a: number, b: number, t: number): number {
  return Math.round(a + (b - a) * t);
}

/** Linear two-stop ramp between the clamped range ends. */
export function powerColor(powerDbm: number | null, range: PowerRange = DEFAULT_POWER_RANGE): string {
  if (powerDbm === null) return UNREACHED_COLOR;
  const span = range.max_dbm - range.min_dbm;
  const clamped = Math.min(range.max_dbm, Math.max(range.min_dbm, powerDbm));
  const t = span > 0 ? (clamped - range.min_dbm) / span : 0;
  return `rgb(${channel(COLD[0], HOT[0], t)}, ${channel(COLD[1], HOT[1], t)}, ${channel(COLD[2], HOT[2], t)})`;
}

/** One fixed color per tier position, fastest tier first. */
const TIER_COLORS: readonly string[] = [
  "rgb(27, 158, 119)", // fastest tier: green
  "rgb(217, 165, 33)", // middle tier: amber
  "rgb(166, 97, 26)", // slowest tier: brown
  "rgb(117, 112, 179)",
  "rgb(231, 41, 138)",
  "rgb(102, 166, 30)",
];

export const ZERO_RATE_COLOR = "rgb(80, 80, 80)";

/**
 * Discrete bitrate palette keyed by the scenario's own tiers. Rates are
 * matched exactly — every on-screen rate comes from the service, which
 * only ever emits values from this table (or zero).
 */
export function bitrateColor(rateMbps: number | null, tiers: readonly BitrateTier[]): string {
  if (rateMbps === null) return UNREACHED_COLOR;
  if (rateMbps === 0) return ZERO_RATE_COLOR;
  const index = tiers.findIndex((tier) => tier.rate_mbps === rateMbps);
  if (index === -1) return ZERO_RATE_COLOR;
  return TIER_COLORS[index % TIER_COLORS.length]!;
}

export interface LegendEntry {
  label: string;
  color: string;
}

export function bitrateLegend(tiers: readonly BitrateTier[]): LegendEntry[] {
  const entries = tiers.map((tier, index) => ({
    label: `≥ ${tier.snr_threshold_db} dB SNR → ${tier.rate_mbps} Mbit/s`,
    color: TIER_COLORS[index % TIER_COLORS.length]!,
  }));
  entries.push({ label: "below every tier → 0 Mbit/s", color: ZERO_RATE_COLOR });
  entries.push({ label: "unreached", color: UNREACHED_COLOR });
  return entries;
}
