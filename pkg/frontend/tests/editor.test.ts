import { describe, expect, it } from "vitest";

import { PlannerClient } from "../src/api.js";
import { EditorState } from "../src/editor.js";
import type { ScenarioDocument, Violation } from "../src/types.js";
import { FakeService } from "./fakeService.js";
import { fixture, makeHarness, singleLinkHarness } from "./helpers.js";

const loadDoc = (): ScenarioDocument => fixture<ScenarioDocument>("scenario-single-link.json");

describe("obstacle drawing", () => {
  it("draw three wall cells, undo three times: scenario is byte-identical", () => {
    const { editor } = makeHarness(loadDoc());
    const original = editor.canonicalText();

    editor.tool = "draw-obstacle";
    editor.drawObstacleCell(4, 0);
    editor.drawObstacleCell(5, 0);
    editor.drawObstacleCell(6, 0);
    expect(editor.doc.scheme.obstacles).toHaveLength(1);
    expect(editor.doc.scheme.obstacles[0]!.cells).toHaveLength(3);
    expect(editor.undoStack).toHaveLength(3);

    expect(editor.undo()).toBe(true);
    expect(editor.undo()).toBe(true);
    expect(editor.undo()).toBe(true);
    expect(editor.canonicalText()).toBe(original);
    expect(editor.undo()).toBe(false);
  });

  it("keeps obstacle cells in canonical (col, row) order however they are drawn", () => {
    const { editor } = makeHarness(loadDoc());
    editor.drawObstacleCell(6, 0);
    editor.drawObstacleCell(4, 0);
    editor.drawObstacleCell(5, 0);
    expect(editor.doc.scheme.obstacles[0]!.cells).toEqual([
      [4, 0],
      [5, 0],
      [6, 0],
    ]);
  });

  it("uses the selected material for new obstacles", () => {
    const { editor } = makeHarness(loadDoc());
    editor.selectedMaterial = { material_label: "concrete", loss_per_cell_db: 12.0, calibratable: true };
    editor.drawObstacleCell(3, 0);
    const obstacle = editor.doc.scheme.obstacles[0]!;
    expect(obstacle.material_label).toBe("concrete");
    expect(obstacle.loss_per_cell_db).toBe(12.0);
  });

  it("ignores repeat strokes on a cell already in the active obstacle", () => {
    const { editor } = makeHarness(loadDoc());
    editor.drawObstacleCell(4, 0);
    editor.drawObstacleCell(4, 0);
    expect(editor.undoStack).toHaveLength(1);
  });

  it("finishObstacle starts a separate obstacle on the next stroke", () => {
    const { editor } = makeHarness(loadDoc());
    editor.drawObstacleCell(4, 0);
    editor.finishObstacle();
    editor.drawObstacleCell(6, 0);
    expect(editor.doc.scheme.obstacles).toHaveLength(2);
  });

  it("rejects strokes outside the grid with an inline notice", () => {
    const { editor } = makeHarness(loadDoc());
    const original = editor.canonicalText();
    editor.drawObstacleCell(99, 0);
    expect(editor.canonicalText()).toBe(original);
    expect(editor.notices[0]!.code).toBe("cell-out-of-bounds");
  });
});

describe("erase", () => {
  it("erases one obstacle cell, and the whole obstacle with its last cell", () => {
    const { editor } = makeHarness(loadDoc());
    const original = editor.canonicalText();
    editor.drawObstacleCell(4, 0);
    editor.drawObstacleCell(5, 0);
    expect(editor.eraseAt(5, 0)).toBe("obstacle-cell");
    expect(editor.eraseAt(4, 0)).toBe("obstacle");
    expect(editor.doc.scheme.obstacles).toHaveLength(0);
    expect(editor.eraseAt(4, 0)).toBeNull();
    // Four edits on the stack; four undos restore the original exactly.
    expect(editor.undoStack).toHaveLength(4);
    editor.undo();
    editor.undo();
    editor.undo();
    editor.undo();
    expect(editor.canonicalText()).toBe(original);
  });

  it("erases sites and receivers too", () => {
    const { editor } = makeHarness(loadDoc());
    expect(editor.eraseAt(0, 0)).toBe("site");
    expect(editor.doc.scheme.sites).toHaveLength(0);
    expect(editor.eraseAt(10, 0)).toBe("receiver");
    expect(editor.doc.scheme.receivers).toHaveLength(0);
  });
});

describe("placement", () => {
  it("places a site with fresh id and default properties", () => {
    const { editor } = makeHarness(loadDoc());
    const site = editor.placeSite(3, 0);
    expect(site).not.toBeNull();
    expect(site!.id).toBe("site-1");
    expect(site!.cell).toEqual([3, 0]);
    expect(editor.doc.scheme.sites.map((s) => s.id)).toEqual(["s1", "site-1"]);
  });

  it("placing a site on an occupied site cell raises an inline duplicate-site error", () => {
    const { editor } = makeHarness(loadDoc());
    const before = editor.canonicalText();
    const result = editor.placeSite(0, 0); // s1 lives here
    expect(result).toBeNull();
    expect(editor.canonicalText()).toBe(before);
    expect(editor.undoStack).toHaveLength(0);
    const notice = editor.notices[0]!;
    expect(notice.code).toBe("duplicate-site");
    expect(notice.elementId).toBe("s1");
    expect(notice.message).toContain("'s1'");
  });

  it("places receivers with service-default properties", () => {
    const { editor } = makeHarness(loadDoc());
    const receiver = editor.placeReceiver(7, 0);
    expect(receiver!.id).toBe("receiver-1");
    expect(receiver!.noise_dbm).toBe(-95.0);
    expect(receiver!.weight).toBe(1.0);
  });

  it("skips ids already taken when minting fresh ones", () => {
    const { editor } = makeHarness(loadDoc());
    editor.placeSite(3, 0);
    editor.placeSite(4, 0);
    expect(editor.doc.scheme.sites.map((s) => s.id)).toEqual(["s1", "site-1", "site-2"]);
  });
});

describe("property panel edits", () => {
  it("sets an element property through a reversible diff", () => {
    const { editor } = makeHarness(loadDoc());
    const original = editor.canonicalText();
    editor.setElementProperty("receiver", "r1", "min_bitrate_mbps", 18.0);
    expect(editor.doc.scheme.receivers[0]!.min_bitrate_mbps).toBe(18.0);
    editor.undo();
    expect(editor.canonicalText()).toBe(original);
  });

  it("refuses unknown elements and unknown properties", () => {
    const { editor } = makeHarness(loadDoc());
    expect(() => editor.setElementProperty("site", "nope", "infra_cost", 1)).toThrow(/unknown site/);
    expect(() => editor.setElementProperty("site", "s1", "nope", 1)).toThrow(/no property/);
  });
});

describe("persistence", () => {
  it("save then reload renders an identical scenario", async () => {
    const h = await singleLinkHarness();
    h.editor.drawObstacleCell(4, 0);
    h.editor.drawObstacleCell(5, 0);
    h.editor.placeSite(15, 0);
    const edited = h.editor.canonicalText();

    expect(await h.editor.save()).toBe(true);
    expect(h.editor.dirty).toBe(false);

    await h.editor.load(h.scenarioId);
    expect(h.editor.canonicalText()).toBe(edited);
  });

  it("creates new scenarios on first save, then updates in place", async () => {
    const { editor, service } = makeHarness(loadDoc());
    expect(await editor.save()).toBe(true);
    const id = editor.serverId!;
    expect(editor.serverRevision).toBe(1);
    editor.placeSite(3, 0);
    expect(await editor.save()).toBe(true);
    expect(editor.serverRevision).toBe(2);
    expect(service.scenarios.get(id)!.revision).toBe(2);
  });

  it("a concurrent save is surfaced via 409 and resolved last-write-wins", async () => {
    const h = await singleLinkHarness();
    h.editor.placeSite(3, 0);
    const localText = h.editor.canonicalText();

    h.service.bumpRevision(h.scenarioId); // someone else saved meanwhile

    expect(await h.editor.save()).toBe(true);
    const conflict = h.editor.notices.find((n) => n.kind === "conflict");
    expect(conflict).toBeDefined();
    expect(conflict!.message).toMatch(/keeping this editor's version/);
    // The local document won.
    expect(JSON.stringify(h.service.getStoredDoc(h.scenarioId))).toBe(localText);
    expect(h.editor.dirty).toBe(false);
  });

  it("validation failures surface inline on the offending element", async () => {
    const h = await singleLinkHarness();
    h.editor.setElementProperty("site", "s1", "allowed_equipment", ["no-such-radio"]);
    h.service.nextSaveViolations = fixture<{ violations: Violation[] }>(
      "violations-422.json",
    ).violations;

    expect(await h.editor.save()).toBe(false);
    expect(h.editor.dirty).toBe(true);
    const notice = h.editor.notices[0]!;
    expect(notice.kind).toBe("validation");
    expect(notice.code).toBe("unknown-equipment");
    expect(notice.elementId).toBe("s1");
    expect(notice.message).toContain("no-such-radio");
  });

  it("keeps retrying after repeated conflicts, then reports failure", async () => {
    const service = new FakeService();
    const doc = loadDoc();
    const id = service.seedScenario(doc);
    // Another writer lands a save just before every attempt of ours.
    let puts = 0;
    const client = new PlannerClient("http://fake", async (url, init) => {
      if ((init?.method ?? "GET") === "PUT") {
        puts += 1;
        service.bumpRevision(id);
      }
      return service.fetch(url, init);
    });
    const editor = new EditorState(client, structuredClone(doc));
    await editor.load(id);
    editor.placeSite(3, 0);

    expect(await editor.save()).toBe(false);
    expect(puts).toBe(3);
    expect(editor.notices.filter((n) => n.kind === "conflict")).toHaveLength(3);
    expect(editor.notices.at(-1)!.code).toBe("save-retries-exhausted");
  });
});
