/**
 * Calibration view model: before/after residuals, fitted per-material
 * losses, per-measurement errors, and the invisible obstacles the
 * service inserted to explain unaccounted loss. Inserted obstacles are
 * flagged so the grid draws them distinctly from authored ones.
 */

import type { CalibrationPayload, CellPair } from "./types.js";

export interface FittedLossRow {
  material_label: string;
  loss_per_cell_db: number;
}

export interface MeasurementErrorRow {
  receiver_id: string;
  error_db: number;
}

export interface InsertedObstacleMark {
  id: string;
  cells: CellPair[];
  loss_per_cell_db: number;
  material_label: string;
  /** Always true here; authored obstacles never carry it. */
  inserted: true;
}

export interface CalibrationModel {
  residual_before_db: number;
  residual_after_db: number;
  improved: boolean;
  fitted: FittedLossRow[];
  measurement_errors: MeasurementErrorRow[];
  inserted: InsertedObstacleMark[];
}

export function buildCalibrationModel(payload: CalibrationPayload): CalibrationModel {
  return {
    residual_before_db: payload.residual_before_db,
    residual_after_db: payload.residual_after_db,
    improved: payload.residual_after_db < payload.residual_before_db,
    fitted: Object.entries(payload.fitted_losses_db)
      .map(([material_label, loss_per_cell_db]) => ({ material_label, loss_per_cell_db }))
      .sort((a, b) => (a.material_label < b.material_label ? -1 : 1)),
    measurement_errors: Object.entries(payload.per_measurement_error_db)
      .map(([receiver_id, error_db]) => ({ receiver_id, error_db }))
      .sort((a, b) => (a.receiver_id < b.receiver_id ? -1 : 1)),
    inserted: payload.inserted_obstacles.map((obstacle) => ({
      id: obstacle.id,
      cells: obstacle.cells,
      loss_per_cell_db: obstacle.loss_per_cell_db,
      material_label: obstacle.material_label,
      inserted: true,
    })),
  };
}
