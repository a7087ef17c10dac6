/**
 * Run lifecycle: submit a run to the service and poll its status until
 * it settles. The service computes everything; this module only ferries
 * records back and forth.
 */

import type { PlannerClient } from "./api.js";
import type { Json } from "./diff.js";
import type { ResultPayload, RunKind, RunRecord } from "./types.js";

export type SleepFn = (ms: number) => Promise<void>;

const realSleep: SleepFn = (ms) => new Promise((resolve) => setTimeout(resolve, ms));

/** A run the service reported as failed; carries the service's error text. */
export class RunFailedError extends Error {
  constructor(readonly record: RunRecord) {
    super(record.error ?? "run failed");
    this.name = "RunFailedError";
  }
}

export interface CompletedRun {
  record: RunRecord;
  result: ResultPayload;
}

export class RunController {
  constructor(
    private readonly client: PlannerClient,
    private readonly options: { pollMs?: number; sleep?: SleepFn; maxPolls?: number } = {},
  ) {}

  /**
   * Start a run and poll until it is done or failed. Resolves with the
   * run record and its result payload; rejects with {@link RunFailedError}
   * carrying the service's error when the run fails.
   */
  async execute(
    scenarioId: string,
    kind: RunKind,
    params: Record<string, Json> = {},
  ): Promise<CompletedRun> {
    const sleep = this.options.sleep ?? realSleep;
    const pollMs = this.options.pollMs ?? 250;
    const maxPolls = this.options.maxPolls ?? 2400;
    const started = await this.client.startRun(scenarioId, kind, params);
    let record = await this.client.getRun(started.run_id);
    for (let polls = 0; record.status === "queued" || record.status === "running"; polls += 1) {
      if (polls >= maxPolls) throw new Error(`run ${record.run_id} did not settle`);
      await sleep(pollMs);
      record = await this.client.getRun(started.run_id);
    }
    if (record.status === "failed") throw new RunFailedError(record);
    const result = await this.client.getRunResult(record.run_id);
    return { record, result };
  }
}
