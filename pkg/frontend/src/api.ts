/**
 * Typed client for the planning service HTTP API. This is the only
 * place the workbench talks to the outside world; everything else
 * consumes the returned payloads verbatim.
 */

import type {
  CalibrationPayload,
  CoveragePayload,
  ParetoPayload,
  PathPayload,
  ResultPayload,
  RunKind,
  RunRecord,
  ScenarioDocument,
  ScenarioEnvelope,
  ScenarioRef,
  Violation,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

/** Non-2xx response, with the parsed body and any validation codes. */
export class ApiError extends Error {
  readonly status: number;
  readonly detail: unknown;
  readonly violations: Violation[];

  constructor(status: number, detail: unknown) {
    super(describeDetail(status, detail));
    this.name = "ApiError";
    this.status = status;
    this.detail = detail;
    this.violations = extractViolations(detail);
  }
}

function describeDetail(status: number, detail: unknown): string {
  if (typeof detail === "string") return `HTTP ${status}: ${detail}`;
  const violations = extractViolations(detail);
  if (violations.length > 0) {
    const lines = violations.map((v) => `${v.code}: ${v.message}`);
    return `HTTP ${status}: ${lines.join("; ")}`;
  }
  return `HTTP ${status}`;
}

function extractViolations(detail: unknown): Violation[] {
  if (
    typeof detail === "object" &&
    detail !== null &&
    Array.isArray((detail as { violations?: unknown }).violations)
  ) {
    return (detail as { violations: Violation[] }).violations;
  }
  return [];
}

async function errorDetail(response: Response): Promise<unknown> {
  let body: unknown = null;
  try {
    body = await response.json();
  } catch {
    return null;
  }
  if (typeof body === "object" && body !== null && "detail" in body) {
    return (body as { detail: unknown }).detail;
  }
  return body;
}

export class PlannerClient {
  private readonly base: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.base = baseUrl.replace(/\/$/, "");
    // Default to the platform fetch, bound so it keeps its receiver.
    this.fetchImpl = fetchImpl ?? ((url, init) => fetch(url, init));
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.base}${path}`, init);
    if (!response.ok) {
      throw new ApiError(response.status, await errorDetail(response));
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  createScenario(doc: ScenarioDocument): Promise<ScenarioRef> {
    return this.post<ScenarioRef>("/scenarios", doc);
  }

  listScenarios(): Promise<{ scenarios: ScenarioRef[] }> {
    return this.request<{ scenarios: ScenarioRef[] }>("/scenarios");
  }

  getScenario(id: string): Promise<ScenarioEnvelope> {
    return this.request<ScenarioEnvelope>(`/scenarios/${encodeURIComponent(id)}`);
  }

  updateScenario(id: string, revision: number, doc: ScenarioDocument): Promise<ScenarioRef> {
    return this.request<ScenarioRef>(`/scenarios/${encodeURIComponent(id)}`, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ revision, scenario: doc }),
    });
  }

  startRun(
    scenarioId: string,
    kind: RunKind,
    params: Record<string, unknown>,
  ): Promise<{ run_id: string; status: string }> {
    return this.post(`/scenarios/${encodeURIComponent(scenarioId)}/runs`, { kind, params });
  }

  listRuns(scenarioId: string): Promise<{ runs: RunRecord[] }> {
    return this.request<{ runs: RunRecord[] }>(
      `/scenarios/${encodeURIComponent(scenarioId)}/runs`,
    );
  }

  getRun(runId: string): Promise<RunRecord> {
    return this.request<RunRecord>(`/runs/${encodeURIComponent(runId)}`);
  }

  getRunResult(runId: string): Promise<ResultPayload> {
    return this.request<ResultPayload>(`/runs/${encodeURIComponent(runId)}/result`);
  }

  getCoverageResult(runId: string): Promise<CoveragePayload> {
    return this.getRunResult(runId) as Promise<CoveragePayload>;
  }

  getParetoResult(runId: string): Promise<ParetoPayload> {
    return this.getRunResult(runId) as Promise<ParetoPayload>;
  }

  getCalibrationResult(runId: string): Promise<CalibrationPayload> {
    return this.getRunResult(runId) as Promise<CalibrationPayload>;
  }

  getPath(
    scenarioId: string,
    siteId: string,
    receiverId: string,
    equipmentId?: string,
  ): Promise<PathPayload> {
    const query = equipmentId === undefined ? "" : `?equipment=${encodeURIComponent(equipmentId)}`;
    return this.request<PathPayload>(
      `/scenarios/${encodeURIComponent(scenarioId)}/path/` +
        `${encodeURIComponent(siteId)}/${encodeURIComponent(receiverId)}${query}`,
    );
  }
}
