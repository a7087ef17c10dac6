/**
 * View state: which overlay is showing and which service results back
 * it. Every result is tagged with the exact scenario text it was
 * computed from; an overlay is stale whenever the editor's current
 * text differs, so edits flag results immediately and an undo back to
 * the computed version makes them current again.
 */

import type { PlannerClient } from "./api.js";
import { ApiError } from "./api.js";
import type { Json } from "./diff.js";
import type { EditorState } from "./editor.js";
import { RunFailedError, type RunController } from "./runs.js";
import type {
  CalibrationPayload,
  CoveragePayload,
  ParetoPayload,
  PathPayload,
} from "./types.js";

export type OverlayMode = "none" | "power" | "bitrate" | "path";

export interface TaggedResult<T> {
  payload: T;
  /** Editor canonical text at the moment the result applied. */
  scenarioText: string;
}

export class ViewState {
  overlayMode: OverlayMode = "none";
  coverage: TaggedResult<CoveragePayload> | null = null;
  pareto: TaggedResult<ParetoPayload> | null = null;
  calibration: TaggedResult<CalibrationPayload> | null = null;
  path: TaggedResult<PathPayload> | null = null;

  selectedParetoIndex: number | null = null;
  highlightedSiteIds: readonly string[] = [];
  selectedPathLink: { site_id: string; receiver_id: string; equipment_id: string | null } | null =
    null;

  /** Error text from the most recent failed run or request, if any. */
  runError: string | null = null;
  busy = false;

  private listeners = new Set<() => void>();

  constructor(
    private readonly editor: EditorState,
    private readonly runs: RunController,
    private readonly client: PlannerClient,
  ) {
    editor.subscribe(() => this.emit());
  }

  subscribe(listener: () => void): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  /** True when the result no longer matches the document on screen. */
  isStale<T>(tagged: TaggedResult<T> | null): boolean {
    return tagged !== null && tagged.scenarioText !== this.editor.canonicalText();
  }

  setOverlayMode(mode: OverlayMode): void {
    this.overlayMode = mode;
    this.emit();
  }

  /**
   * Runs execute against the saved scenario, so unsaved edits are saved
   * first; a save rejection aborts the run and leaves its notices up.
   */
  private async ensureSaved(): Promise<string | null> {
    if (this.editor.serverId === null || this.editor.dirty) {
      const saved = await this.editor.save();
      if (!saved) return null;
    }
    return this.editor.serverId;
  }

  private fail(error: unknown): void {
    if (error instanceof RunFailedError) {
      this.runError = error.record.error ?? "run failed";
    } else if (error instanceof ApiError) {
      this.runError = error.message;
    } else {
      this.runError = error instanceof Error ? error.message : String(error);
    }
  }

  private async withBusy<T>(work: () => Promise<T>): Promise<T | null> {
    this.busy = true;
    this.runError = null;
    this.emit();
    try {
      return await work();
    } catch (error) {
      this.fail(error);
      return null;
    } finally {
      this.busy = false;
      this.emit();
    }
  }

  /** Coverage run; no assignment means the scenario's installed equipment. */
  async runCoverage(assignment?: Record<string, string>): Promise<CoveragePayload | null> {
    return this.withBusy(async () => {
      const scenarioId = await this.ensureSaved();
      if (scenarioId === null) throw new Error("scenario not saved; fix the errors and retry");
      const params: Record<string, Json> = assignment === undefined ? {} : { assignment };
      const { result } = await this.runs.execute(scenarioId, "coverage", params);
      if (result.kind !== "coverage") throw new Error(`expected coverage, got ${result.kind}`);
      this.coverage = { payload: result, scenarioText: this.editor.canonicalText() };
      if (this.overlayMode !== "power" && this.overlayMode !== "bitrate") {
        this.overlayMode = "power";
      }
      return result;
    });
  }

  async runOptimize(params: Record<string, number | string> = {}): Promise<ParetoPayload | null> {
    return this.withBusy(async () => {
      const scenarioId = await this.ensureSaved();
      if (scenarioId === null) throw new Error("scenario not saved; fix the errors and retry");
      const { result } = await this.runs.execute(scenarioId, "optimize", params);
      if (result.kind !== "pareto") throw new Error(`expected pareto, got ${result.kind}`);
      this.pareto = { payload: result, scenarioText: this.editor.canonicalText() };
      this.selectedParetoIndex = null;
      this.highlightedSiteIds = [];
      return result;
    });
  }

  async runCalibrate(): Promise<CalibrationPayload | null> {
    return this.withBusy(async () => {
      const scenarioId = await this.ensureSaved();
      if (scenarioId === null) throw new Error("scenario not saved; fix the errors and retry");
      const { result } = await this.runs.execute(scenarioId, "calibrate", {});
      if (result.kind !== "calibration") throw new Error(`expected calibration, got ${result.kind}`);
      this.calibration = { payload: result, scenarioText: this.editor.canonicalText() };
      return result;
    });
  }

  /**
   * Select one point of the optimize front: fetch that decision's
   * coverage from the service and highlight its chosen sites. The
   * heatmap shown is the service's coverage run, nothing local.
   */
  async selectParetoPoint(index: number): Promise<CoveragePayload | null> {
    const front = this.pareto;
    if (front === null) return null;
    const point = front.payload.points[index];
    if (point === undefined) return null;
    this.selectedParetoIndex = index;
    this.highlightedSiteIds = Object.keys(point.assignment).sort();
    this.emit();
    return this.runCoverage({ ...point.assignment });
  }

  /** Fetch the service's path anatomy for one site→receiver link. */
  async inspectPath(
    siteId: string,
    receiverId: string,
    equipmentId?: string,
  ): Promise<PathPayload | null> {
    return this.withBusy(async () => {
      const scenarioId = await this.ensureSaved();
      if (scenarioId === null) throw new Error("scenario not saved; fix the errors and retry");
      const payload = await this.client.getPath(scenarioId, siteId, receiverId, equipmentId);
      this.path = { payload, scenarioText: this.editor.canonicalText() };
      this.selectedPathLink = {
        site_id: siteId,
        receiver_id: receiverId,
        equipment_id: equipmentId ?? null,
      };
      this.overlayMode = "path";
      return payload;
    });
  }
}
