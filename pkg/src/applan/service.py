"""HTTP planning service: scenario CRUD plus an asynchronous run queue.

Scenarios are persisted as canonical scenario files in a data directory
(written atomically); each carries a revision number that must match on
update, so concurrent editors get a conflict instead of silently losing
work.  Runs execute on a small thread pool against a snapshot of the
scenario taken when the run was created, and move through
queued -> running -> done | failed, never backwards.

Error mapping: 400 malformed request bodies, 404 unknown ids, 409
revision conflicts (and results requested before a run finished),
422 scenario or parameter validation failures with coded violations.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from contextlib import asynccontextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from fastapi import FastAPI, HTTPException, Request

from .artifacts import calibration_payload, coverage_payload, pareto_payload, path_payload
from .calibrate import (
    CalibrationConfig,
    DanglingMeasurementError,
    NoMeasurementsError,
    calibrate,
)
from .grid import PlacementDecision, validate_decision
from .optimize import (
    InstanceTooLargeError,
    SearchParams,
    brute_force_pareto,
    variant_probability_search,
)
from .scenario import (
    MalformedSyntaxError,
    ScenarioError,
    ScenarioFile,
    SchemaViolationError,
    UnsupportedVersionError,
    parse_scenario_file,
    serialize_scenario,
    write_atomic,
)

__all__ = ["create_app"]

RUN_KINDS = ("coverage", "optimize", "calibrate")


@dataclass
class _ScenarioRecord:
    id: str
    revision: int
    raw: bytes  # canonical scenario file bytes


@dataclass
class _RunRecord:
    id: str
    scenario_id: str
    scenario_revision: int
    kind: str
    params: dict[str, Any]
    inputs_hash: str
    snapshot: ScenarioFile
    status: str = "queued"
    error: str | None = None
    result: dict[str, Any] | None = None

    def public(self) -> dict[str, Any]:
        return {
            "run_id": self.id,
            "scenario_id": self.scenario_id,
            "scenario_revision": self.scenario_revision,
            "kind": self.kind,
            "params": self.params,
            "inputs_hash": self.inputs_hash,
            "status": self.status,
            "error": self.error,
        }


_STATUS_ORDER = {"queued": 0, "running": 1, "done": 2, "failed": 2}


class _State:
    """All mutable service state behind one lock."""

    def __init__(self, data_dir: Path, max_workers: int | None) -> None:
        self.data_dir = data_dir
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.lock = threading.Lock()
        self.scenarios: dict[str, _ScenarioRecord] = {}
        self.runs: dict[str, _RunRecord] = {}
        self.executor = ThreadPoolExecutor(
            max_workers=max_workers or min(4, os.cpu_count() or 1),
            thread_name_prefix="plan-run",
        )
        self._load_existing()

    def _load_existing(self) -> None:
        for path in sorted(self.data_dir.glob("*.json")):
            try:
                raw = path.read_bytes()
                scenario = parse_scenario_file(raw)
            except (OSError, ScenarioError):
                continue  # foreign or damaged file; leave it alone
            record = _ScenarioRecord(id=path.stem, revision=1, raw=serialize_scenario(scenario))
            self.scenarios[record.id] = record

    def scenario_path(self, scenario_id: str) -> Path:
        return self.data_dir / f"{scenario_id}.json"

    def advance_run(self, run_id: str, status: str, **updates: Any) -> None:
        with self.lock:
            run = self.runs[run_id]
            if _STATUS_ORDER[status] < _STATUS_ORDER[run.status]:
                return  # never move backwards
            run.status = status
            for key, value in updates.items():
                setattr(run, key, value)


async def _read_json_object(request: Request, what: str) -> dict[str, Any]:
    body = await request.body()
    try:
        doc = json.loads(body)
    except json.JSONDecodeError:
        raise HTTPException(status_code=400, detail=f"{what} body is not valid JSON")
    if not isinstance(doc, dict):
        raise HTTPException(status_code=400, detail=f"{what} body must be a JSON object")
    return doc


def _parse_or_422(doc: dict[str, Any]) -> tuple[ScenarioFile, bytes]:
    try:
        raw = (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")
        scenario = parse_scenario_file(raw)
    except SchemaViolationError as exc:
        raise HTTPException(
            status_code=422,
            detail={
                "violations": [
                    {"code": v.code, "message": v.message} for v in exc.violations
                ]
            },
        )
    except UnsupportedVersionError as exc:
        raise HTTPException(
            status_code=422,
            detail={"violations": [{"code": "unsupported-version", "message": str(exc)}]},
        )
    except MalformedSyntaxError as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    return scenario, serialize_scenario(scenario)


def _decision_from_params(snapshot: ScenarioFile, params: dict[str, Any]) -> PlacementDecision:
    if params.get("existing"):
        decision = PlacementDecision.from_dict(
            {site.id: site.existing_equipment for site in snapshot.scheme.sites}
        )
    else:
        assignment = params.get("assignment", {})
        if not isinstance(assignment, dict):
            raise ValueError("params.assignment must be a map of site id to equipment id")
        decision = PlacementDecision.from_dict(assignment)
    violations = validate_decision(snapshot.scheme, decision)
    if violations:
        raise ValueError("; ".join(f"{v.code}: {v.message}" for v in violations))
    return decision


def _execute_run(state: _State, run_id: str) -> None:
    with state.lock:
        run = state.runs[run_id]
        if run.status != "queued":
            return
    state.advance_run(run_id, "running")
    try:
        if run.kind == "coverage":
            decision = _decision_from_params(run.snapshot, run.params)
            result = coverage_payload(run.snapshot.scheme, decision)
        elif run.kind == "optimize":
            solver = run.params.get("solver", "vps")
            if solver == "oracle":
                result = pareto_payload(brute_force_pareto(run.snapshot.scheme), "oracle")
            elif solver == "vps":
                allowed = {"seed", "population", "generations", "elite_fraction",
                           "learning_rate", "prob_floor", "budget_levels"}
                overrides = {k: v for k, v in run.params.items() if k in allowed}
                params = SearchParams(**overrides)
                result = pareto_payload(
                    variant_probability_search(run.snapshot.scheme, params), "vps"
                )
            else:
                raise ValueError(f"unknown solver {solver!r} (use 'oracle' or 'vps')")
        else:  # calibrate
            allowed = {
                "absorption_min_dB", "absorption_max_dB", "quantum_dB",
                "invisible_trigger_dB", "max_passes", "seed", "unreachable_penalty_dB",
            }
            overrides = {k: v for k, v in run.params.items() if k in allowed}
            config = CalibrationConfig(**overrides)
            result = calibration_payload(calibrate(run.snapshot.scheme, config))
        state.advance_run(run_id, "done", result=result)
    except (
        ValueError,
        KeyError,
        NoMeasurementsError,
        DanglingMeasurementError,
        InstanceTooLargeError,
    ) as exc:
        state.advance_run(run_id, "failed", error=str(exc))


def create_app(data_dir: Path | str, max_workers: int | None = None) -> FastAPI:
    """Build the planning service around one data directory."""
    state = _State(Path(data_dir), max_workers)

    @asynccontextmanager
    async def lifespan(_app: FastAPI):
        yield
        state.executor.shutdown(wait=False, cancel_futures=True)

    app = FastAPI(title="plan service", lifespan=lifespan)
    app.state.planner = state

    @app.post("/scenarios", status_code=201)
    async def create_scenario(request: Request) -> dict[str, Any]:
        doc = await _read_json_object(request, "scenario")
        scenario, raw = _parse_or_422(doc)
        scenario_id = f"s-{uuid.uuid4().hex[:12]}"
        with state.lock:
            write_atomic(state.scenario_path(scenario_id), raw)
            state.scenarios[scenario_id] = _ScenarioRecord(scenario_id, 1, raw)
        return {"id": scenario_id, "revision": 1}

    @app.get("/scenarios")
    async def list_scenarios() -> dict[str, Any]:
        with state.lock:
            rows = [
                {"id": record.id, "revision": record.revision}
                for record in sorted(state.scenarios.values(), key=lambda r: r.id)
            ]
        return {"scenarios": rows}

    def _get_scenario(scenario_id: str) -> _ScenarioRecord:
        record = state.scenarios.get(scenario_id)
        if record is None:
            raise HTTPException(status_code=404, detail=f"unknown scenario {scenario_id!r}")
        return record

    @app.get("/scenarios/{scenario_id}")
    async def get_scenario(scenario_id: str) -> dict[str, Any]:
        with state.lock:
            record = _get_scenario(scenario_id)
            return {
                "id": record.id,
                "revision": record.revision,
                "scenario": json.loads(record.raw),
            }

    @app.put("/scenarios/{scenario_id}")
    async def update_scenario(scenario_id: str, request: Request) -> dict[str, Any]:
        doc = await _read_json_object(request, "scenario update")
        if "revision" not in doc or "scenario" not in doc:
            raise HTTPException(
                status_code=400,
                detail="scenario update body needs 'revision' and 'scenario' fields",
            )
        if not isinstance(doc["revision"], int) or isinstance(doc["revision"], bool):
            raise HTTPException(status_code=400, detail="'revision' must be an integer")
        if not isinstance(doc["scenario"], dict):
            raise HTTPException(status_code=400, detail="'scenario' must be a JSON object")
        scenario, raw = _parse_or_422(doc["scenario"])
        with state.lock:
            record = _get_scenario(scenario_id)
            if doc["revision"] != record.revision:
                raise HTTPException(
                    status_code=409,
                    detail=(
                        f"revision conflict: expected {record.revision}, "
                        f"got {doc['revision']}"
                    ),
                )
            record.revision += 1
            record.raw = raw
            write_atomic(state.scenario_path(scenario_id), raw)
            return {"id": record.id, "revision": record.revision}

    @app.get("/scenarios/{scenario_id}/path/{site_id}/{receiver_id}")
    async def get_path(
        scenario_id: str,
        site_id: str,
        receiver_id: str,
        equipment: str | None = None,
    ) -> dict[str, Any]:
        with state.lock:
            record = _get_scenario(scenario_id)
            raw = record.raw
        scheme = parse_scenario_file(raw).scheme
        try:
            return path_payload(scheme, site_id, receiver_id, equipment)
        except KeyError as exc:
            raise HTTPException(status_code=404, detail=str(exc.args[0])) from exc
        except ValueError as exc:
            raise HTTPException(
                status_code=422,
                detail={"violations": [{"code": "no-equipment", "message": str(exc)}]},
            ) from exc

    @app.post("/scenarios/{scenario_id}/runs", status_code=202)
    async def start_run(scenario_id: str, request: Request) -> dict[str, Any]:
        doc = await _read_json_object(request, "run request")
        kind = doc.get("kind")
        if kind not in RUN_KINDS:
            raise HTTPException(
                status_code=422,
                detail={
                    "violations": [
                        {
                            "code": "unknown-run-kind",
                            "message": f"kind must be one of {', '.join(RUN_KINDS)}",
                        }
                    ]
                },
            )
        params = doc.get("params", {})
        if not isinstance(params, dict):
            raise HTTPException(status_code=400, detail="'params' must be a JSON object")

        with state.lock:
            record = _get_scenario(scenario_id)
            snapshot = parse_scenario_file(record.raw)
            run_id = f"r-{uuid.uuid4().hex[:12]}"
            digest = hashlib.sha256(
                record.raw + json.dumps({"kind": kind, "params": params}, sort_keys=True).encode()
            ).hexdigest()
            state.runs[run_id] = _RunRecord(
                id=run_id,
                scenario_id=scenario_id,
                scenario_revision=record.revision,
                kind=kind,
                params=params,
                inputs_hash=digest,
                snapshot=snapshot,
            )
        state.executor.submit(_execute_run, state, run_id)
        return {"run_id": run_id, "status": "queued"}

    @app.get("/scenarios/{scenario_id}/runs")
    async def list_runs(scenario_id: str) -> dict[str, Any]:
        with state.lock:
            _get_scenario(scenario_id)
            rows = [
                run.public()
                for run in state.runs.values()
                if run.scenario_id == scenario_id
            ]
        return {"runs": rows}

    @app.get("/runs/{run_id}")
    async def get_run(run_id: str) -> dict[str, Any]:
        with state.lock:
            run = state.runs.get(run_id)
            if run is None:
                raise HTTPException(status_code=404, detail=f"unknown run {run_id!r}")
            return run.public()

    @app.get("/runs/{run_id}/result")
    async def get_run_result(run_id: str) -> dict[str, Any]:
        with state.lock:
            run = state.runs.get(run_id)
            if run is None:
                raise HTTPException(status_code=404, detail=f"unknown run {run_id!r}")
            if run.status == "failed":
                raise HTTPException(status_code=409, detail=f"run failed: {run.error}")
            if run.status != "done" or run.result is None:
                raise HTTPException(
                    status_code=409, detail=f"run is {run.status}, result not ready"
                )
            return run.result

    return app
