/**
 * Wire types for the planning service.
 *
 * These mirror the JSON documents the HTTP API exchanges, field for
 * field. The UI never derives physics from them — every dBm, SNR, rate,
 * cost, and geometry figure on screen is a value the service computed.
 */

/** `[col, row]` grid coordinates, column-major-agnostic, 0-based. */
export type CellPair = [number, number];

export interface BitrateTier {
  snr_threshold_db: number;
  rate_mbps: number;
}

export interface ObstacleDocument {
  id: string;
  cells: CellPair[];
  loss_per_cell_db: number;
  material_label: string;
  calibratable: boolean;
}

export type AntennaPattern =
  | { kind: "omni" }
  | { kind: "sector"; azimuth_deg: number; width_deg: number }
  | { kind: "beam"; partner_cell: CellPair };

export interface EquipmentDocument {
  id: string;
  tx_power_dbm: number;
  tx_gain_dbi: number;
  cost: number;
  pattern: AntennaPattern;
}

export interface SiteDocument {
  id: string;
  cell: CellPair;
  infra_cost: number;
  allowed_equipment: string[] | null;
  existing_equipment: string | null;
}

export interface ReceiverDocument {
  id: string;
  cell: CellPair;
  weight: number;
  min_bitrate_mbps: number;
  noise_dbm: number;
  rx_gain_dbi: number;
  measured_power_dbm: number | null;
  measured_from_site: string | null;
}

export interface SchemeDocument {
  width_cells: number;
  height_cells: number;
  cell_size_m: number;
  frequency_ghz: number;
  bitrate_table: BitrateTier[];
  obstacles: ObstacleDocument[];
  equipment: EquipmentDocument[];
  sites: SiteDocument[];
  receivers: ReceiverDocument[];
}

export interface ScenarioDocument {
  format_version: number;
  annotations: Record<string, string>;
  scheme: SchemeDocument;
}

// --- service envelopes -------------------------------------------------------

export interface ScenarioRef {
  id: string;
  revision: number;
}

export interface ScenarioEnvelope extends ScenarioRef {
  scenario: ScenarioDocument;
}

export type RunKind = "coverage" | "optimize" | "calibrate";
export type RunStatus = "queued" | "running" | "done" | "failed";

export interface RunRecord {
  run_id: string;
  scenario_id: string;
  scenario_revision: number;
  kind: RunKind;
  params: Record<string, unknown>;
  inputs_hash: string;
  status: RunStatus;
  error: string | null;
}

export interface Violation {
  code: string;
  message: string;
}

// --- result payloads ----------------------------------------------------------

export interface ReceiverRow {
  receiver_id: string;
  site_id: string | null;
  received_dbm: number | null;
  snr_db: number | null;
  rate_mbps: number;
  meets_min_bitrate: boolean;
}

/** Flat row-major grids: index = row * width_cells + col. */
export interface CoveragePayload {
  kind: "coverage";
  assignment: Record<string, string>;
  width_cells: number;
  height_cells: number;
  power_dbm: (number | null)[];
  snr_db: (number | null)[];
  rate_mbps: number[];
  serving_site: (string | null)[];
  receivers: ReceiverRow[];
  feasible: boolean;
}

export interface ParetoPoint {
  assignment: Record<string, string>;
  total_cost: number;
  weighted_coverage: number;
  per_receiver_rates: Record<string, number>;
}

export interface ParetoPayload {
  kind: "pareto";
  solver: string;
  seed: number | null;
  evaluations: number;
  points: ParetoPoint[];
}

export interface InsertedObstacle {
  id: string;
  cells: CellPair[];
  loss_per_cell_db: number;
  material_label: string;
  calibratable: boolean;
}

export interface CalibrationPayload {
  kind: "calibration";
  fitted_losses_db: Record<string, number>;
  residual_before_db: number;
  residual_after_db: number;
  per_measurement_error_db: Record<string, number>;
  inserted_obstacles: InsertedObstacle[];
}

export interface PathBudget {
  tx_power_dbm: number;
  tx_gain_dbi: number;
  rx_gain_dbi: number;
  obstacle_loss_db: number;
  fsl_db: number;
  received_dbm: number;
  snr_db: number;
  rate_mbps: number;
  distance_m: number;
}

export interface PathPayload {
  kind: "path";
  site_id: string;
  receiver_id: string;
  equipment_id: string;
  reachable: boolean;
  los_cells: CellPair[];
  thickness_cells: number[];
  zone_cells: CellPair[][];
  obstacle_cells: Record<string, CellPair[]>;
  budget: PathBudget | null;
}

export type ResultPayload = CoveragePayload | ParetoPayload | CalibrationPayload;
