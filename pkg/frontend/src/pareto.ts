/**
 * Cost-versus-coverage scatter model for optimize results. Display
 * coordinates are a linear normalization of the service's numbers; the
 * numbers themselves are shown untouched.
 */

import type { ParetoPayload, ParetoPoint } from "./types.js";

export interface ScatterPoint {
  index: number;
  total_cost: number;
  weighted_coverage: number;
  assignment: Readonly<Record<string, string>>;
  /** 0..1 position across the plot, left = cheapest. */
  x: number;
  /** 0..1 position up the plot, top = best coverage. */
  y: number;
  label: string;
}

export type ParetoModel =
  | { kind: "front"; points: ScatterPoint[] }
  | { kind: "empty"; message: string };

export const EMPTY_FRONT_MESSAGE =
  "no feasible placement: no equipment assignment satisfies every receiver's minimum bitrate";

function normalize(value: number, min: number, max: number): number {
  return max > min ? (value - min) / (max - min) : 0.5;
}

function describe(point: ParetoPoint): string {
  const picks = Object.entries(point.assignment)
    .map(([site, equipment]) => `${site}=${equipment}`)
    .sort();
  const what = picks.length === 0 ? "install nothing" : picks.join(", ");
  return `cost ${point.total_cost} → coverage ${point.weighted_coverage} (${what})`;
}

export function buildParetoModel(payload: ParetoPayload): ParetoModel {
  if (payload.points.length === 0) return { kind: "empty", message: EMPTY_FRONT_MESSAGE };
  const costs = payload.points.map((p) => p.total_cost);
  const values = payload.points.map((p) => p.weighted_coverage);
  const [minCost, maxCost] = [Math.min(...costs), Math.max(...costs)];
  const [minValue, maxValue] = [Math.min(...values), Math.max(...values)];
  return {
    kind: "front",
    points: payload.points.map((point, index) => ({
      index,
      total_cost: point.total_cost,
      weighted_coverage: point.weighted_coverage,
      assignment: point.assignment,
      x: normalize(point.total_cost, minCost, maxCost),
      y: normalize(point.weighted_coverage, minValue, maxValue),
      label: describe(point),
    })),
  };
}
