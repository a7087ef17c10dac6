/**
 * Shared test rig: fixture loading plus a wired editor/view/service
 * harness. Fixtures are bytes captured from the real service, so
 * assertions compare against genuine computed payloads.
 */

import { readFileSync } from "node:fs";
import path from "node:path";
import { fileURLToPath } from "node:url";

import { PlannerClient } from "../src/api.js";
import { EditorState } from "../src/editor.js";
import { RunController } from "../src/runs.js";
import { ViewState } from "../src/view.js";
import type {
  CalibrationPayload,
  CoveragePayload,
  ParetoPayload,
  PathPayload,
  ScenarioDocument,
} from "../src/types.js";
import { FakeService } from "./fakeService.js";

const HERE = path.dirname(fileURLToPath(import.meta.url));

export function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(path.join(HERE, "fixtures", name), "utf8")) as T;
}

export interface Harness {
  service: FakeService;
  client: PlannerClient;
  editor: EditorState;
  runs: RunController;
  view: ViewState;
}

/** Editor + view wired to a fake service with zero-delay polling. */
export function makeHarness(doc: ScenarioDocument): Harness {
  const service = new FakeService();
  const client = new PlannerClient("http://fake", service.fetch);
  const editor = new EditorState(client, structuredClone(doc));
  const runs = new RunController(client, { sleep: async () => {}, pollMs: 0 });
  const view = new ViewState(editor, runs, client);
  return { service, client, editor, runs, view };
}

/** Harness preloaded with the thick-walls scenario and all its results. */
export async function thickWallsHarness(): Promise<Harness & { scenarioId: string }> {
  const doc = fixture<ScenarioDocument>("scenario-thick-walls.json");
  const harness = makeHarness(doc);
  const scenarioId = harness.service.seedScenario(doc);
  harness.service.seedPareto(scenarioId, fixture<ParetoPayload>("pareto-thick-walls.json"));
  harness.service.seedCoverage(
    scenarioId,
    {},
    fixture<CoveragePayload>("coverage-thick-walls.empty.json"),
  );
  harness.service.seedCoverage(
    scenarioId,
    { west: "ap-basic" },
    fixture<CoveragePayload>("coverage-thick-walls.west=ap-basic.json"),
  );
  harness.service.seedCoverage(
    scenarioId,
    { east: "ap-basic" },
    fixture<CoveragePayload>("coverage-thick-walls.east=ap-basic.json"),
  );
  harness.service.seedCoverage(
    scenarioId,
    { west: "ap-basic", east: "ap-basic" },
    fixture<CoveragePayload>("coverage-thick-walls.east=ap-basic+west=ap-basic.json"),
  );
  harness.service.seedPath(
    scenarioId,
    "west",
    "annex",
    "ap-basic",
    fixture<PathPayload>("path-thick-walls.json"),
  );
  await harness.editor.load(scenarioId);
  return { ...harness, scenarioId };
}

export async function singleLinkHarness(): Promise<Harness & { scenarioId: string }> {
  const doc = fixture<ScenarioDocument>("scenario-single-link.json");
  const harness = makeHarness(doc);
  const scenarioId = harness.service.seedScenario(doc);
  harness.service.seedCoverage(
    scenarioId,
    { s1: "e1" },
    fixture<CoveragePayload>("coverage-single-link.s1=e1.json"),
  );
  harness.service.seedPath(
    scenarioId,
    "s1",
    "r1",
    "e1",
    fixture<PathPayload>("path-single-link.json"),
  );
  await harness.editor.load(scenarioId);
  return { ...harness, scenarioId };
}

export async function sectorMissHarness(): Promise<Harness & { scenarioId: string }> {
  const doc = fixture<ScenarioDocument>("scenario-sector-miss.json");
  const harness = makeHarness(doc);
  const scenarioId = harness.service.seedScenario(doc);
  harness.service.seedPath(
    scenarioId,
    "mast",
    "gate",
    null,
    fixture<PathPayload>("path-sector-miss.json"),
  );
  await harness.editor.load(scenarioId);
  return { ...harness, scenarioId };
}

export async function calibrationHarness(): Promise<Harness & { scenarioId: string }> {
  const doc = fixture<ScenarioDocument>("scenario-calibration.json");
  const harness = makeHarness(doc);
  const scenarioId = harness.service.seedScenario(doc);
  harness.service.seedCalibration(
    scenarioId,
    fixture<CalibrationPayload>("calibration-result.json"),
  );
  await harness.editor.load(scenarioId);
  return { ...harness, scenarioId };
}
