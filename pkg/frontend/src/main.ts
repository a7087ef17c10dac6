/**
 * Browser bootstrap: wire the client, editor, view state, and workbench
 * into `#app`. The service base URL defaults to the page's own origin
 * and can be overridden with `?api=http://host:port`.
 */

import { PlannerClient } from "./api.js";
import { EditorState } from "./editor.js";
import { RunController } from "./runs.js";
import { ViewState } from "./view.js";
import { Workbench } from "./workbench.js";
import type { ScenarioDocument } from "./types.js";

/** A fresh, valid scenario to start drawing into. */
export function blankScenario(): ScenarioDocument {
  return {
    format_version: 1,
    annotations: { title: "untitled plan" },
    scheme: {
      width_cells: 30,
      height_cells: 20,
      cell_size_m: 1.0,
      frequency_ghz: 2.44,
      bitrate_table: [
        { snr_threshold_db: 25.0, rate_mbps: 54.0 },
        { snr_threshold_db: 15.0, rate_mbps: 18.0 },
        { snr_threshold_db: 4.0, rate_mbps: 1.0 },
      ],
      obstacles: [],
      equipment: [
        {
          id: "ap-omni",
          tx_power_dbm: 18.0,
          tx_gain_dbi: 6.0,
          cost: 60.0,
          pattern: { kind: "omni" },
        },
      ],
      sites: [],
      receivers: [],
    },
  };
}

export async function start(root: HTMLElement): Promise<Workbench> {
  const params = new URLSearchParams(window.location.search);
  const base = params.get("api") ?? window.location.origin;
  const client = new PlannerClient(base);
  const editor = new EditorState(client, blankScenario());
  const scenarioId = params.get("scenario");
  if (scenarioId !== null) await editor.load(scenarioId);
  const runs = new RunController(client);
  const view = new ViewState(editor, runs, client);
  return new Workbench(root, editor, view);
}

const appRoot = typeof document !== "undefined" ? document.getElementById("app") : null;
if (appRoot !== null) {
  start(appRoot).catch((error) => {
    appRoot.textContent = `failed to start: ${error instanceof Error ? error.message : error}`;
  });
}
