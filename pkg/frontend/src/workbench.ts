/**
 * Workbench: the DOM shell tying the editor, runs, and overlays
 * together. Rendering is a full rebuild on every state change — the
 * documents are room-sized grids, so simplicity wins over diffing.
 *
 * Numbers shown on cells are copied verbatim from service payloads
 * into data attributes (`data-power-dbm`, `data-snr-db`,
 * `data-rate-mbps`, `data-serving-site`); the UI never derives them.
 */

import { buildCalibrationModel } from "./calibration.js";
import type { EditorState, Tool } from "./editor.js";
import { buildHeatmap } from "./heatmap.js";
import { buildPathModel } from "./inspector.js";
import { bitrateLegend } from "./palette.js";
import { buildParetoModel } from "./pareto.js";
import type { ViewState } from "./view.js";
import type { CellPair } from "./types.js";

const TOOLS: readonly { tool: Tool; label: string }[] = [
  { tool: "select", label: "Select" },
  { tool: "draw-obstacle", label: "Draw obstacle" },
  { tool: "erase", label: "Erase" },
  { tool: "place-site", label: "Place site" },
  { tool: "place-receiver", label: "Place receiver" },
];

export const MATERIAL_PRESETS = [
  { material_label: "wall", loss_per_cell_db: 7.0, calibratable: true },
  { material_label: "drywall", loss_per_cell_db: 3.0, calibratable: true },
  { material_label: "concrete", loss_per_cell_db: 12.0, calibratable: true },
  { material_label: "glass", loss_per_cell_db: 2.0, calibratable: false },
] as const;

function cellKey(cell: CellPair): string {
  return `${cell[0]},${cell[1]}`;
}

export class Workbench {
  /** Most recent user-triggered async action; tests await it. */
  lastAction: Promise<unknown> = Promise.resolve();

  /** Site picked as a path origin while in select mode. */
  private pathOriginSiteId: string | null = null;
  private selectedElement: { kind: "site" | "receiver" | "obstacle"; id: string } | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly editor: EditorState,
    private readonly view: ViewState,
  ) {
    root.classList.add("workbench");
    root.addEventListener("click", (event) => this.onClick(event));
    root.addEventListener("change", (event) => this.onChange(event));
    this.view.subscribe(() => this.render());
    this.render();
  }

  // --- event handling -------------------------------------------------------

  private onClick(event: Event): void {
    const target = event.target as HTMLElement | null;
    if (target === null) return;
    const cell = target.closest<HTMLElement>(".cell");
    if (cell !== null && cell.dataset["col"] !== undefined) {
      this.onCellClick(Number(cell.dataset["col"]), Number(cell.dataset["row"]));
      return;
    }
    const paretoPoint = target.closest<HTMLElement>(".pareto-point");
    if (paretoPoint !== null && paretoPoint.dataset["index"] !== undefined) {
      this.lastAction = this.view.selectParetoPoint(Number(paretoPoint.dataset["index"]));
      return;
    }
    const button = target.closest<HTMLElement>("button[data-action]");
    if (button !== null) this.onAction(button.dataset["action"] ?? "");
  }

  private onCellClick(col: number, row: number): void {
    switch (this.editor.tool) {
      case "draw-obstacle":
        this.editor.drawObstacleCell(col, row);
        break;
      case "erase":
        this.editor.eraseAt(col, row);
        break;
      case "place-site":
        this.editor.placeSite(col, row);
        break;
      case "place-receiver":
        this.editor.placeReceiver(col, row);
        break;
      case "select":
        this.onSelectCell(col, row);
        break;
    }
  }

  /**
   * Select mode doubles as the path picker: clicking a site arms it as
   * the origin, then clicking a receiver asks the service for that
   * link's anatomy.
   */
  private onSelectCell(col: number, row: number): void {
    const site = this.editor.siteAt(col, row);
    if (site !== undefined) {
      this.pathOriginSiteId = site.id;
      this.selectedElement = { kind: "site", id: site.id };
      this.render();
      return;
    }
    const receiver = this.editor.receiverAt(col, row);
    if (receiver !== undefined) {
      this.selectedElement = { kind: "receiver", id: receiver.id };
      if (this.pathOriginSiteId !== null) {
        const equipment = this.editor.selectedEquipmentId ?? undefined;
        this.lastAction = this.view.inspectPath(this.pathOriginSiteId, receiver.id, equipment);
        return;
      }
      this.render();
      return;
    }
    const obstacle = this.editor.obstacleAt(col, row);
    this.selectedElement = obstacle === undefined ? null : { kind: "obstacle", id: obstacle.id };
    this.render();
  }

  private onAction(action: string): void {
    switch (action) {
      case "undo":
        this.editor.undo();
        break;
      case "save":
        this.lastAction = this.editor.save();
        break;
      case "run-coverage":
        this.lastAction = this.view.runCoverage();
        break;
      case "run-optimize":
        this.lastAction = this.view.runOptimize();
        break;
      case "run-calibrate":
        this.lastAction = this.view.runCalibrate();
        break;
      case "overlay-power":
        this.view.setOverlayMode("power");
        break;
      case "overlay-bitrate":
        this.view.setOverlayMode("bitrate");
        break;
      case "overlay-none":
        this.view.setOverlayMode("none");
        break;
      default:
        if (action.startsWith("tool:")) {
          this.editor.finishObstacle();
          this.editor.tool = action.slice("tool:".length) as Tool;
          this.render();
        }
    }
  }

  private onChange(event: Event): void {
    const target = event.target as HTMLElement | null;
    if (target === null) return;
    if (target.matches("select[data-role='material']")) {
      const index = Number((target as HTMLSelectElement).value);
      const preset = MATERIAL_PRESETS[index];
      if (preset !== undefined) {
        this.editor.finishObstacle();
        this.editor.selectedMaterial = { ...preset };
      }
      return;
    }
    if (target.matches("[data-prop]") && this.selectedElement !== null) {
      const input = target as HTMLInputElement;
      const prop = input.dataset["prop"]!;
      const raw = input.value;
      const asNumber = Number(raw);
      const value = raw === "" ? null : Number.isNaN(asNumber) ? raw : asNumber;
      this.editor.setElementProperty(this.selectedElement.kind, this.selectedElement.id, prop, value);
    }
  }

  // --- rendering --------------------------------------------------------------

  render(): void {
    this.root.textContent = "";
    this.root.append(
      this.renderToolbar(),
      this.renderNotices(),
      this.renderStatus(),
      this.renderGrid(),
      this.renderSidePanel(),
    );
  }

  private el(tag: string, className?: string, text?: string): HTMLElement {
    const node = this.root.ownerDocument.createElement(tag);
    if (className !== undefined) node.className = className;
    if (text !== undefined) node.textContent = text;
    return node;
  }

  private renderToolbar(): HTMLElement {
    const bar = this.el("div", "toolbar");
    for (const { tool, label } of TOOLS) {
      const button = this.el("button", this.editor.tool === tool ? "active" : "", label);
      button.dataset["action"] = `tool:${tool}`;
      bar.append(button);
    }
    const material = this.el("select") as HTMLSelectElement;
    material.dataset["role"] = "material";
    MATERIAL_PRESETS.forEach((preset, index) => {
      const option = this.el("option") as HTMLOptionElement;
      option.value = String(index);
      option.textContent = `${preset.material_label} (${preset.loss_per_cell_db} dB/cell)`;
      option.selected = preset.material_label === this.editor.selectedMaterial.material_label;
      material.append(option);
    });
    bar.append(material);
    for (const [action, label] of [
      ["undo", "Undo"],
      ["save", "Save"],
      ["run-coverage", "Coverage"],
      ["run-optimize", "Optimize"],
      ["run-calibrate", "Calibrate"],
      ["overlay-power", "Power overlay"],
      ["overlay-bitrate", "Bitrate overlay"],
      ["overlay-none", "Hide overlay"],
    ] as const) {
      const button = this.el("button", undefined, label);
      button.dataset["action"] = action;
      if (action === "undo") (button as HTMLButtonElement).disabled = !this.editor.canUndo;
      bar.append(button);
    }
    return bar;
  }

  private renderNotices(): HTMLElement {
    const box = this.el("div", "notices");
    for (const notice of this.editor.notices) {
      const item = this.el("div", `notice notice-${notice.kind}`, notice.message);
      item.dataset["code"] = notice.code;
      if (notice.elementId !== null) item.dataset["elementId"] = notice.elementId;
      box.append(item);
    }
    if (this.view.runError !== null) {
      const item = this.el("div", "notice notice-run-error", this.view.runError);
      item.dataset["code"] = "run-failed";
      box.append(item);
    }
    return box;
  }

  private renderStatus(): HTMLElement {
    const status = this.el("div", "status");
    if (this.editor.dirty) status.append(this.el("span", "dirty-badge", "unsaved changes"));
    if (this.view.busy) status.append(this.el("span", "busy-badge", "working…"));
    const overlayStale =
      ((this.view.overlayMode === "power" || this.view.overlayMode === "bitrate") &&
        this.view.isStale(this.view.coverage)) ||
      (this.view.overlayMode === "path" && this.view.isStale(this.view.path));
    if (overlayStale || this.view.isStale(this.view.pareto) || this.view.isStale(this.view.calibration)) {
      status.append(
        this.el("span", "stale-badge", "results out of date — scenario edited since this run"),
      );
    }
    return status;
  }

  private invalidElementIds(): Set<string> {
    const ids = new Set<string>();
    for (const notice of this.editor.notices) {
      if (notice.kind === "validation" && notice.elementId !== null) ids.add(notice.elementId);
    }
    return ids;
  }

  private renderGrid(): HTMLElement {
    const scheme = this.editor.doc.scheme;
    const grid = this.el("div", "grid");
    grid.style.display = "grid";
    grid.style.gridTemplateColumns = `repeat(${scheme.width_cells}, var(--cell-size, 18px))`;

    const coverageTag = this.view.coverage;
    const showHeatmap =
      (this.view.overlayMode === "power" || this.view.overlayMode === "bitrate") &&
      coverageTag !== null;
    const heatmap = showHeatmap
      ? buildHeatmap(
          coverageTag.payload,
          this.view.overlayMode === "bitrate" ? "bitrate" : "power",
          scheme.bitrate_table,
        )
      : null;
    const heatmapStale = showHeatmap && this.view.isStale(coverageTag);

    const pathTag = this.view.path;
    const showPath = this.view.overlayMode === "path" && pathTag !== null;
    const pathModel = showPath ? buildPathModel(pathTag.payload, scheme) : null;
    const pathStale = showPath && this.view.isStale(pathTag);
    const losKeys = new Set((pathModel?.los_cells ?? []).map(cellKey));
    const envelopeKeys = new Set((pathModel?.envelope_cells ?? []).map(cellKey));
    const blockedBy = new Map<string, string[]>();
    for (const segment of pathModel?.blocked ?? []) {
      for (const cell of segment.cells) {
        const key = cellKey(cell);
        blockedBy.set(key, [...(blockedBy.get(key) ?? []), segment.obstacle_id]);
      }
    }

    const calibrationTag = this.view.calibration;
    const insertedByCell = new Map<string, string>();
    if (calibrationTag !== null && !this.view.isStale(calibrationTag)) {
      for (const obstacle of calibrationTag.payload.inserted_obstacles) {
        for (const cell of obstacle.cells) insertedByCell.set(cellKey(cell), obstacle.id);
      }
    }

    const siteByCell = new Map(scheme.sites.map((s) => [cellKey(s.cell), s]));
    const receiverByCell = new Map(scheme.receivers.map((r) => [cellKey(r.cell), r]));
    const obstacleByCell = new Map<string, { id: string; material_label: string; loss: number }>();
    for (const obstacle of scheme.obstacles) {
      for (const cell of obstacle.cells) {
        obstacleByCell.set(cellKey(cell), {
          id: obstacle.id,
          material_label: obstacle.material_label,
          loss: obstacle.loss_per_cell_db,
        });
      }
    }
    const invalid = this.invalidElementIds();
    const highlighted = new Set(this.view.highlightedSiteIds);

    if (heatmapStale || pathStale) grid.classList.add("stale");

    for (let row = 0; row < scheme.height_cells; row += 1) {
      for (let col = 0; col < scheme.width_cells; col += 1) {
        const key = `${col},${row}`;
        const cell = this.el("div", "cell");
        cell.dataset["col"] = String(col);
        cell.dataset["row"] = String(row);

        const obstacle = obstacleByCell.get(key);
        if (obstacle !== undefined) {
          cell.classList.add("obstacle");
          cell.dataset["obstacleId"] = obstacle.id;
          cell.title = `${obstacle.material_label}: ${obstacle.loss} dB per cell`;
          if (invalid.has(obstacle.id)) cell.classList.add("invalid");
        }
        const inserted = insertedByCell.get(key);
        if (inserted !== undefined) {
          cell.classList.add("obstacle", "inserted");
          cell.dataset["insertedObstacleId"] = inserted;
        }
        const site = siteByCell.get(key);
        if (site !== undefined) {
          cell.classList.add("site");
          cell.dataset["siteId"] = site.id;
          cell.title = `site ${site.id}`;
          if (highlighted.has(site.id)) cell.classList.add("assigned");
          if (invalid.has(site.id)) cell.classList.add("invalid");
          if (this.selectedElement?.kind === "site" && this.selectedElement.id === site.id) {
            cell.classList.add("selected");
          }
        }
        const receiver = receiverByCell.get(key);
        if (receiver !== undefined) {
          cell.classList.add("receiver");
          cell.dataset["receiverId"] = receiver.id;
          cell.title = `receiver ${receiver.id}`;
          if (invalid.has(receiver.id)) cell.classList.add("invalid");
          if (
            this.selectedElement?.kind === "receiver" &&
            this.selectedElement.id === receiver.id
          ) {
            cell.classList.add("selected");
          }
        }

        if (heatmap !== null) {
          const hm = heatmap.cells[row * scheme.width_cells + col]!;
          cell.style.backgroundColor = hm.color;
          cell.title = hm.tooltip;
          if (hm.power_dbm !== null) cell.dataset["powerDbm"] = String(hm.power_dbm);
          if (hm.snr_db !== null) cell.dataset["snrDb"] = String(hm.snr_db);
          if (hm.rate_mbps !== null) cell.dataset["rateMbps"] = String(hm.rate_mbps);
          if (hm.serving_site !== null) cell.dataset["servingSite"] = hm.serving_site;
        }

        if (pathModel !== null) {
          if (losKeys.has(key)) cell.classList.add("los");
          if (envelopeKeys.has(key)) cell.classList.add("envelope");
          const blockers = blockedBy.get(key);
          if (blockers !== undefined) {
            cell.classList.add("blocked");
            cell.dataset["blockedBy"] = blockers.join(" ");
          }
        }

        grid.append(cell);
      }
    }
    return grid;
  }

  private renderSidePanel(): HTMLElement {
    const side = this.el("div", "side");
    side.append(this.renderProperties());
    if (this.view.pareto !== null) side.append(this.renderPareto());
    if (this.view.calibration !== null) side.append(this.renderCalibration());
    if (this.view.overlayMode === "path" && this.view.path !== null) {
      side.append(this.renderInspector());
    }
    if (this.view.overlayMode === "bitrate") {
      const legend = this.el("div", "legend");
      for (const entry of bitrateLegend(this.editor.doc.scheme.bitrate_table)) {
        const row = this.el("div", "legend-row", entry.label);
        row.style.borderLeft = `12px solid ${entry.color}`;
        legend.append(row);
      }
      side.append(legend);
    }
    return side;
  }

  private renderProperties(): HTMLElement {
    const panel = this.el("div", "properties");
    const selected = this.selectedElement;
    if (selected === null) {
      panel.append(this.el("div", "hint", "select a site, receiver, or obstacle to edit it"));
      return panel;
    }
    const scheme = this.editor.doc.scheme;
    const element =
      selected.kind === "site"
        ? scheme.sites.find((s) => s.id === selected.id)
        : selected.kind === "receiver"
          ? scheme.receivers.find((r) => r.id === selected.id)
          : scheme.obstacles.find((o) => o.id === selected.id);
    if (element === undefined) {
      panel.append(this.el("div", "hint", "selection no longer exists"));
      return panel;
    }
    panel.append(this.el("h3", undefined, `${selected.kind} ${selected.id}`));
    const editable: Record<string, readonly string[]> = {
      site: ["infra_cost", "existing_equipment"],
      receiver: ["weight", "min_bitrate_mbps", "noise_dbm", "rx_gain_dbi", "measured_power_dbm", "measured_from_site"],
      obstacle: ["loss_per_cell_db", "material_label"],
    };
    for (const prop of editable[selected.kind] ?? []) {
      const row = this.el("label", "prop-row", `${prop} `);
      const input = this.el("input") as HTMLInputElement;
      input.dataset["prop"] = prop;
      const value = (element as unknown as Record<string, unknown>)[prop];
      input.value = value === null || value === undefined ? "" : String(value);
      row.append(input);
      panel.append(row);
    }
    return panel;
  }

  private renderPareto(): HTMLElement {
    const tagged = this.view.pareto!;
    const panel = this.el("div", "pareto");
    if (this.view.isStale(tagged)) panel.classList.add("stale");
    const model = buildParetoModel(tagged.payload);
    if (model.kind === "empty") {
      const empty = this.el("div", "pareto-empty", model.message);
      panel.append(empty);
      return panel;
    }
    panel.append(this.el("h3", undefined, "cost vs. coverage"));
    const plot = this.el("div", "pareto-plot");
    for (const point of model.points) {
      const dot = this.el("div", "pareto-point");
      dot.dataset["index"] = String(point.index);
      dot.dataset["totalCost"] = String(point.total_cost);
      dot.dataset["weightedCoverage"] = String(point.weighted_coverage);
      dot.style.left = `${Math.round(point.x * 100)}%`;
      dot.style.bottom = `${Math.round(point.y * 100)}%`;
      dot.title = point.label;
      if (this.view.selectedParetoIndex === point.index) dot.classList.add("selected");
      plot.append(dot);
    }
    panel.append(plot);
    return panel;
  }

  private renderCalibration(): HTMLElement {
    const tagged = this.view.calibration!;
    const panel = this.el("div", "calibration");
    if (this.view.isStale(tagged)) panel.classList.add("stale");
    const model = buildCalibrationModel(tagged.payload);
    panel.append(this.el("h3", undefined, "calibration"));
    const residuals = this.el("div", "residuals");
    const before = this.el("span", "residual-before", `before: ${model.residual_before_db} dB`);
    before.dataset["valueDb"] = String(model.residual_before_db);
    const after = this.el("span", "residual-after", `after: ${model.residual_after_db} dB`);
    after.dataset["valueDb"] = String(model.residual_after_db);
    residuals.append(before, after);
    panel.append(residuals);
    const fitted = this.el("div", "fitted");
    for (const row of model.fitted) {
      const item = this.el(
        "div",
        "fitted-row",
        `${row.material_label}: ${row.loss_per_cell_db} dB per cell`,
      );
      item.dataset["material"] = row.material_label;
      item.dataset["valueDb"] = String(row.loss_per_cell_db);
      fitted.append(item);
    }
    panel.append(fitted);
    const errors = this.el("div", "measurement-errors");
    for (const row of model.measurement_errors) {
      const item = this.el("div", "measurement-row", `${row.receiver_id}: ${row.error_db} dB`);
      item.dataset["receiverId"] = row.receiver_id;
      item.dataset["valueDb"] = String(row.error_db);
      errors.append(item);
    }
    panel.append(errors);
    if (model.inserted.length > 0) {
      const inserted = this.el("div", "inserted-obstacles");
      inserted.append(
        this.el("div", "hint", "unmodeled loss explained by inserted invisible obstacles:"),
      );
      for (const obstacle of model.inserted) {
        const item = this.el(
          "div",
          "inserted-row",
          `${obstacle.id} (${obstacle.material_label}): ${obstacle.loss_per_cell_db} dB per cell over ${obstacle.cells.length} cells`,
        );
        item.dataset["obstacleId"] = obstacle.id;
        inserted.append(item);
      }
      panel.append(inserted);
    }
    return panel;
  }

  private renderInspector(): HTMLElement {
    const tagged = this.view.path!;
    const panel = this.el("div", "inspector");
    if (this.view.isStale(tagged)) panel.classList.add("stale");
    const model = buildPathModel(tagged.payload, this.editor.doc.scheme);
    panel.append(
      this.el(
        "h3",
        undefined,
        `${model.site_id} → ${model.receiver_id} via ${model.equipment_id}`,
      ),
    );
    if (!model.reachable) {
      const miss = this.el("div", "explanation", model.explanation ?? "link unreachable");
      panel.append(miss);
      return panel;
    }
    const budget = this.el("div", "budget");
    for (const row of model.budget_rows ?? []) {
      const item = this.el(
        "div",
        "budget-row",
        `${row.sign} ${row.label}: ${row.value_db} dB`,
      );
      item.dataset["term"] = row.label;
      item.dataset["sign"] = row.sign;
      item.dataset["valueDb"] = String(row.value_db);
      budget.append(item);
    }
    const total = this.el("div", "budget-total", `= received: ${model.received_dbm} dBm`);
    total.dataset["term"] = "received";
    total.dataset["valueDb"] = String(model.received_dbm);
    budget.append(total);
    panel.append(budget);
    const stats = this.el("div", "path-stats");
    for (const [name, value, unit] of [
      ["distance", model.distance_m, "m"],
      ["snr", model.snr_db, "dB"],
      ["rate", model.rate_mbps, "Mbit/s"],
    ] as const) {
      const item = this.el("div", "path-stat", `${name}: ${value} ${unit}`);
      item.dataset["stat"] = name;
      item.dataset["value"] = String(value);
      stats.append(item);
    }
    panel.append(stats);
    for (const segment of model.blocked) {
      const item = this.el(
        "div",
        "blocked-segment",
        `${segment.obstacle_id} (${segment.material_label}, ${segment.loss_per_cell_db} dB per cell): ` +
          `${segment.cells.length} cells in the clearance zone`,
      );
      item.dataset["obstacleId"] = segment.obstacle_id;
      item.dataset["cellCount"] = String(segment.cells.length);
      item.dataset["lossPerCellDb"] = String(segment.loss_per_cell_db);
      panel.append(item);
    }
    return panel;
  }
}
