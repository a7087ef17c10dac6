/**
 * Editor state: a client-side mirror of one scenario document plus the
 * drawing tools that mutate it.
 *
 * Every mutation goes through a {@link ScenarioDiff}; the undo stack
 * holds the applied diffs and undo applies the inverse, restoring the
 * exact prior document byte for byte. Edits are buffered locally and
 * only hit the service on {@link EditorState.save}.
 */

import { ApiError, type PlannerClient } from "./api.js";
import { applyDiff, invertDiff, type DiffOp, type Json, type ScenarioDiff } from "./diff.js";
import type {
  CellPair,
  ObstacleDocument,
  ReceiverDocument,
  ScenarioDocument,
  SiteDocument,
  Violation,
} from "./types.js";

export type Tool = "select" | "draw-obstacle" | "erase" | "place-site" | "place-receiver";

export interface MaterialChoice {
  material_label: string;
  loss_per_cell_db: number;
  calibratable: boolean;
}

export interface EditorNotice {
  kind: "validation" | "conflict" | "io";
  code: string;
  message: string;
  /** Id of the offending scenario element, when one can be named. */
  elementId: string | null;
}

export type ElementKind = "obstacle" | "site" | "receiver" | "equipment";

const PLURAL: Record<ElementKind, "obstacles" | "sites" | "receivers" | "equipment"> = {
  obstacle: "obstacles",
  site: "sites",
  receiver: "receivers",
  equipment: "equipment",
};

function compareCells(a: CellPair, b: CellPair): number {
  return a[0] - b[0] || a[1] - b[1];
}

export class EditorState {
  doc: ScenarioDocument;
  tool: Tool = "select";
  selectedMaterial: MaterialChoice = {
    material_label: "wall",
    loss_per_cell_db: 7.0,
    calibratable: true,
  };
  selectedEquipmentId: string | null = null;
  dirty = false;
  readonly undoStack: ScenarioDiff[] = [];
  notices: EditorNotice[] = [];

  serverId: string | null = null;
  serverRevision: number | null = null;

  /** Obstacle currently being drawn; new strokes extend it. */
  private activeObstacleId: string | null = null;
  private listeners = new Set<() => void>();

  constructor(
    private readonly client: PlannerClient,
    doc: ScenarioDocument,
  ) {
    this.doc = doc;
  }

  // --- change notification ----------------------------------------------------

  /** Subscribe to document changes (edits, undo, load). */
  subscribe(listener: () => void): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  /** The exact bytes the editor would save; also the undo-identity oracle. */
  canonicalText(): string {
    return JSON.stringify(this.doc);
  }

  // --- diff plumbing ------------------------------------------------------------

  applyEdit(diff: ScenarioDiff): void {
    this.doc = applyDiff(this.doc as unknown as Json, diff) as unknown as ScenarioDocument;
    this.undoStack.push(diff);
    this.dirty = true;
    this.emit();
  }

  get canUndo(): boolean {
    return this.undoStack.length > 0;
  }

  undo(): boolean {
    const diff = this.undoStack.pop();
    if (diff === undefined) return false;
    this.doc = applyDiff(this.doc as unknown as Json, invertDiff(diff)) as unknown as ScenarioDocument;
    this.dirty = true;
    this.emit();
    return true;
  }

  clearNotices(): void {
    this.notices = [];
  }

  private notify(notice: EditorNotice): void {
    this.notices.push(notice);
    this.emit();
  }

  // --- element lookup -----------------------------------------------------------

  private inBounds(col: number, row: number): boolean {
    const { width_cells, height_cells } = this.doc.scheme;
    return col >= 0 && row >= 0 && col < width_cells && row < height_cells;
  }

  siteAt(col: number, row: number): SiteDocument | undefined {
    return this.doc.scheme.sites.find((s) => s.cell[0] === col && s.cell[1] === row);
  }

  receiverAt(col: number, row: number): ReceiverDocument | undefined {
    return this.doc.scheme.receivers.find((r) => r.cell[0] === col && r.cell[1] === row);
  }

  obstacleAt(col: number, row: number): ObstacleDocument | undefined {
    return this.doc.scheme.obstacles.find((o) =>
      o.cells.some((c) => c[0] === col && c[1] === row),
    );
  }

  private freshId(prefix: string, taken: readonly { id: string }[]): string {
    const used = new Set(taken.map((t) => t.id));
    let n = 1;
    while (used.has(`${prefix}-${n}`)) n += 1;
    return `${prefix}-${n}`;
  }

  // --- drawing tools --------------------------------------------------------------

  /**
   * Draw one obstacle cell at (col, row) with the selected material.
   * The first stroke creates the obstacle; later strokes extend it, so
   * undoing a three-cell wall takes exactly three undos back to the
   * original document.
   */
  drawObstacleCell(col: number, row: number): void {
    if (!this.inBounds(col, row)) {
      this.notify({
        kind: "validation",
        code: "cell-out-of-bounds",
        message: `cell (${col}, ${row}) is outside the grid`,
        elementId: null,
      });
      return;
    }
    const obstacles = this.doc.scheme.obstacles;
    const active = obstacles.find((o) => o.id === this.activeObstacleId);
    if (active === undefined) {
      const id = this.freshId("obstacle", obstacles);
      const obstacle: ObstacleDocument = {
        id,
        cells: [[col, row]],
        loss_per_cell_db: this.selectedMaterial.loss_per_cell_db,
        material_label: this.selectedMaterial.material_label,
        calibratable: this.selectedMaterial.calibratable,
      };
      this.applyEdit({
        label: "draw obstacle",
        ops: [
          {
            kind: "splice",
            path: ["scheme", "obstacles"],
            index: obstacles.length,
            removed: [],
            inserted: [obstacle as unknown as Json],
          },
        ],
      });
      this.activeObstacleId = id;
      return;
    }
    if (active.cells.some((c) => c[0] === col && c[1] === row)) return; // already painted
    // Keep cells in the service's canonical (col, row) order so a saved
    // document reloads byte-identical.
    const index = active.cells.findIndex((c) => compareCells([col, row], c) < 0);
    const obstacleIndex = obstacles.indexOf(active);
    this.applyEdit({
      label: "draw obstacle cell",
      ops: [
        {
          kind: "splice",
          path: ["scheme", "obstacles", obstacleIndex, "cells"],
          index: index === -1 ? active.cells.length : index,
          removed: [],
          inserted: [[col, row] as unknown as Json],
        },
      ],
    });
  }

  /** Start a new obstacle on the next draw, instead of extending the last one. */
  finishObstacle(): void {
    this.activeObstacleId = null;
  }

  /**
   * Erase whatever occupies (col, row): an obstacle cell first (removing
   * the obstacle entirely when its last cell goes), then a site, then a
   * receiver. Returns what was erased.
   */
  eraseAt(col: number, row: number): "obstacle-cell" | "obstacle" | "site" | "receiver" | null {
    const scheme = this.doc.scheme;
    const obstacle = this.obstacleAt(col, row);
    if (obstacle !== undefined) {
      const obstacleIndex = scheme.obstacles.indexOf(obstacle);
      if (obstacle.cells.length === 1) {
        this.applyEdit({
          label: "erase obstacle",
          ops: [
            {
              kind: "splice",
              path: ["scheme", "obstacles"],
              index: obstacleIndex,
              removed: [obstacle as unknown as Json],
              inserted: [],
            },
          ],
        });
        if (this.activeObstacleId === obstacle.id) this.activeObstacleId = null;
        return "obstacle";
      }
      const cellIndex = obstacle.cells.findIndex((c) => c[0] === col && c[1] === row);
      this.applyEdit({
        label: "erase obstacle cell",
        ops: [
          {
            kind: "splice",
            path: ["scheme", "obstacles", obstacleIndex, "cells"],
            index: cellIndex,
            removed: [[col, row] as unknown as Json],
            inserted: [],
          },
        ],
      });
      return "obstacle-cell";
    }
    const site = this.siteAt(col, row);
    if (site !== undefined) {
      this.applyEdit({
        label: "erase site",
        ops: [
          {
            kind: "splice",
            path: ["scheme", "sites"],
            index: scheme.sites.indexOf(site),
            removed: [site as unknown as Json],
            inserted: [],
          },
        ],
      });
      return "site";
    }
    const receiver = this.receiverAt(col, row);
    if (receiver !== undefined) {
      this.applyEdit({
        label: "erase receiver",
        ops: [
          {
            kind: "splice",
            path: ["scheme", "receivers"],
            index: scheme.receivers.indexOf(receiver),
            removed: [receiver as unknown as Json],
            inserted: [],
          },
        ],
      });
      return "receiver";
    }
    return null;
  }

  /** Place a candidate site; one site per cell, enforced inline. */
  placeSite(col: number, row: number): SiteDocument | null {
    if (!this.inBounds(col, row)) {
      this.notify({
        kind: "validation",
        code: "cell-out-of-bounds",
        message: `cell (${col}, ${row}) is outside the grid`,
        elementId: null,
      });
      return null;
    }
    const occupant = this.siteAt(col, row);
    if (occupant !== undefined) {
      this.notify({
        kind: "validation",
        code: "duplicate-site",
        message: `cell (${col}, ${row}) already holds site '${occupant.id}'`,
        elementId: occupant.id,
      });
      return null;
    }
    const site: SiteDocument = {
      id: this.freshId("site", this.doc.scheme.sites),
      cell: [col, row],
      infra_cost: 0.0,
      allowed_equipment: null,
      existing_equipment: null,
    };
    this.applyEdit({
      label: "place site",
      ops: [
        {
          kind: "splice",
          path: ["scheme", "sites"],
          index: this.doc.scheme.sites.length,
          removed: [],
          inserted: [site as unknown as Json],
        },
      ],
    });
    return site;
  }

  placeReceiver(col: number, row: number): ReceiverDocument | null {
    if (!this.inBounds(col, row)) {
      this.notify({
        kind: "validation",
        code: "cell-out-of-bounds",
        message: `cell (${col}, ${row}) is outside the grid`,
        elementId: null,
      });
      return null;
    }
    const receiver: ReceiverDocument = {
      id: this.freshId("receiver", this.doc.scheme.receivers),
      cell: [col, row],
      weight: 1.0,
      min_bitrate_mbps: 0.0,
      noise_dbm: -95.0,
      rx_gain_dbi: 0.0,
      measured_power_dbm: null,
      measured_from_site: null,
    };
    this.applyEdit({
      label: "place receiver",
      ops: [
        {
          kind: "splice",
          path: ["scheme", "receivers"],
          index: this.doc.scheme.receivers.length,
          removed: [],
          inserted: [receiver as unknown as Json],
        },
      ],
    });
    return receiver;
  }

  /** Property-panel edit: set one field of one element. */
  setElementProperty(kind: ElementKind, id: string, key: string, value: Json): void {
    const plural = PLURAL[kind];
    const list = this.doc.scheme[plural] as readonly { id: string }[];
    const index = list.findIndex((item) => item.id === id);
    if (index === -1) throw new Error(`unknown ${kind} '${id}'`);
    const element = list[index]! as unknown as Record<string, Json>;
    if (!(key in element)) throw new Error(`${kind} has no property '${key}'`);
    const before = element[key]!;
    if (JSON.stringify(before) === JSON.stringify(value)) return;
    this.applyEdit({
      label: `set ${kind} ${key}`,
      ops: [{ kind: "assign", path: ["scheme", plural, index], key, before, after: value }],
    });
  }

  // --- persistence ---------------------------------------------------------------

  /**
   * Save the buffered document. New scenarios POST; existing ones PUT
   * with the last known revision. A 409 means someone else saved in
   * between: this is a single-user tool, so the local document wins —
   * we refresh the revision and write again, surfacing the conflict.
   * Validation failures surface as inline notices and leave the
   * document dirty. Returns true when the save landed.
   */
  async save(): Promise<boolean> {
    this.clearNotices();
    try {
      if (this.serverId === null) {
        const ref = await this.client.createScenario(this.doc);
        this.serverId = ref.id;
        this.serverRevision = ref.revision;
        this.dirty = false;
        this.emit();
        return true;
      }
      for (let attempt = 0; attempt < 3; attempt += 1) {
        try {
          const ref = await this.client.updateScenario(
            this.serverId,
            this.serverRevision ?? 0,
            this.doc,
          );
          this.serverRevision = ref.revision;
          this.dirty = false;
          this.emit();
          return true;
        } catch (error) {
          if (!(error instanceof ApiError) || error.status !== 409) throw error;
          const envelope = await this.client.getScenario(this.serverId);
          this.notify({
            kind: "conflict",
            code: "revision-conflict",
            message:
              `scenario changed elsewhere (now revision ${envelope.revision}); ` +
              "keeping this editor's version",
            elementId: null,
          });
          this.serverRevision = envelope.revision;
        }
      }
      this.notify({
        kind: "io",
        code: "save-retries-exhausted",
        message: "could not save: the scenario keeps changing elsewhere",
        elementId: null,
      });
      return false;
    } catch (error) {
      if (error instanceof ApiError && error.violations.length > 0) {
        for (const violation of error.violations) {
          this.notify({
            kind: "validation",
            code: violation.code,
            message: violation.message,
            elementId: this.matchViolationTarget(violation),
          });
        }
        return false;
      }
      this.notify({
        kind: "io",
        code: "save-failed",
        message: error instanceof Error ? error.message : String(error),
        elementId: null,
      });
      return false;
    }
  }

  /** Attach a service violation to the element whose id it names. */
  private matchViolationTarget(violation: Violation): string | null {
    const scheme = this.doc.scheme;
    const candidates = [
      ...scheme.sites,
      ...scheme.receivers,
      ...scheme.obstacles,
      ...scheme.equipment,
    ];
    for (const element of candidates) {
      if (violation.message.includes(`'${element.id}'`)) return element.id;
    }
    return null;
  }

  /** Load a scenario from the service, replacing the local document. */
  async load(scenarioId: string): Promise<void> {
    const envelope = await this.client.getScenario(scenarioId);
    this.doc = envelope.scenario;
    this.serverId = envelope.id;
    this.serverRevision = envelope.revision;
    this.undoStack.length = 0;
    this.activeObstacleId = null;
    this.dirty = false;
    this.clearNotices();
    this.emit();
  }
}
