/**
 * Path inspector view model: line-of-sight cells, the clearance
 * envelope around them, which cells each obstacle blocks, and the
 * link-budget breakdown — all exactly as the service reported them.
 * The displayed total is the service's received power, never a local
 * sum, and unreachable links get a plain-language antenna explanation
 * built from the scenario's own equipment record.
 */

import type { CellPair, PathPayload, SchemeDocument } from "./types.js";

export interface BudgetRow {
  label: string;
  /** "+" adds to the budget, "-" subtracts. */
  sign: "+" | "-";
  value_db: number;
}

export interface BlockedSegment {
  obstacle_id: string;
  material_label: string;
  loss_per_cell_db: number;
  cells: CellPair[];
}

export interface PathModel {
  site_id: string;
  receiver_id: string;
  equipment_id: string;
  reachable: boolean;
  los_cells: CellPair[];
  /** Envelope half-width in cells for each line-of-sight cell. */
  thickness_cells: number[];
  /** Every cell inside the clearance envelope, line-of-sight included. */
  envelope_cells: CellPair[];
  blocked: BlockedSegment[];
  /** Budget terms; their exact sum is the service's received power. */
  budget_rows: BudgetRow[] | null;
  received_dbm: number | null;
  snr_db: number | null;
  rate_mbps: number | null;
  distance_m: number | null;
  /** Why the link is unreachable, when it is. */
  explanation: string | null;
}

function dedupeCells(groups: readonly CellPair[][]): CellPair[] {
  const seen = new Set<string>();
  const out: CellPair[] = [];
  for (const group of groups) {
    for (const cell of group) {
      const key = `${cell[0]},${cell[1]}`;
      if (!seen.has(key)) {
        seen.add(key);
        out.push(cell);
      }
    }
  }
  return out;
}

function missExplanation(payload: PathPayload, scheme: SchemeDocument): string {
  const equipment = scheme.equipment.find((e) => e.id === payload.equipment_id);
  const antenna = equipment?.pattern;
  if (antenna !== undefined && antenna.kind === "sector") {
    return (
      `receiver '${payload.receiver_id}' lies outside the ${antenna.width_deg}° sector ` +
      `of '${payload.equipment_id}' aimed at ${antenna.azimuth_deg}° ` +
      `from site '${payload.site_id}'`
    );
  }
  if (antenna !== undefined && antenna.kind === "beam") {
    return (
      `'${payload.equipment_id}' is a point-to-point beam serving only cell ` +
      `(${antenna.partner_cell[0]}, ${antenna.partner_cell[1]}); ` +
      `receiver '${payload.receiver_id}' is elsewhere`
    );
  }
  return `receiver '${payload.receiver_id}' is outside the antenna coverage of '${payload.equipment_id}'`;
}

export function buildPathModel(payload: PathPayload, scheme: SchemeDocument): PathModel {
  const budget = payload.budget;
  const blocked: BlockedSegment[] = Object.entries(payload.obstacle_cells).map(
    ([obstacle_id, cells]) => {
      const obstacle = scheme.obstacles.find((o) => o.id === obstacle_id);
      return {
        obstacle_id,
        material_label: obstacle?.material_label ?? obstacle_id,
        loss_per_cell_db: obstacle?.loss_per_cell_db ?? 0,
        cells,
      };
    },
  );
  return {
    site_id: payload.site_id,
    receiver_id: payload.receiver_id,
    equipment_id: payload.equipment_id,
    reachable: payload.reachable,
    los_cells: payload.los_cells,
    thickness_cells: payload.thickness_cells,
    envelope_cells: dedupeCells(payload.zone_cells),
    blocked,
    budget_rows:
      budget === null
        ? null
        : [
            { label: "transmit power", sign: "+", value_db: budget.tx_power_dbm },
            { label: "transmit antenna gain", sign: "+", value_db: budget.tx_gain_dbi },
            { label: "receive antenna gain", sign: "+", value_db: budget.rx_gain_dbi },
            { label: "obstacle loss", sign: "-", value_db: budget.obstacle_loss_db },
            { label: "free-space loss", sign: "-", value_db: budget.fsl_db },
          ],
    received_dbm: budget === null ? null : budget.received_dbm,
    snr_db: budget === null ? null : budget.snr_db,
    rate_mbps: budget === null ? null : budget.rate_mbps,
    distance_m: budget === null ? null : budget.distance_m,
    explanation: payload.reachable ? null : missExplanation(payload, scheme),
  };
}
