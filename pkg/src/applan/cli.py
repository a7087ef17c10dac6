"""Command-line front end: plan coverage | optimize | calibrate | validate | serve.

Exit codes: 0 on success, 1 on operational errors (missing files,
malformed scenarios, bad arguments), 2 when the scenario is infeasible
(a receiver misses its minimum bitrate, or no feasible placement exists).

All artifacts are written atomically (temp file + rename) so a crash
never leaves a half-written file behind.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Sequence

from .artifacts import calibration_payload, coverage_payload, pareto_payload
from .calibrate import (
    CalibrationConfig,
    DanglingMeasurementError,
    NoMeasurementsError,
    apply_calibration,
    calibrate,
)
from .grid import PlacementDecision, validate_decision, validate_scheme
from .optimize import (
    InstanceTooLargeError,
    SearchParams,
    brute_force_pareto,
    variant_probability_search,
)
from .scenario import (
    ScenarioError,
    ScenarioFile,
    parse_scenario_file,
    serialize_scenario,
    write_atomic,
)

__all__ = ["main"]

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2


def _write_json(path: Path, payload: dict[str, Any]) -> None:
    write_atomic(path, (json.dumps(payload, indent=2, ensure_ascii=False) + "\n").encode("utf-8"))


def _load_scenario(path: str) -> ScenarioFile:
    return parse_scenario_file(Path(path).read_bytes())


def _load_decision(path: str) -> PlacementDecision:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(doc, dict) or not isinstance(doc.get("assignment"), dict):
        raise ValueError(f"{path}: a decision file is a JSON object with an 'assignment' map")
    return PlacementDecision.from_dict(doc["assignment"])


def _existing_decision(scenario: ScenarioFile) -> PlacementDecision:
    return PlacementDecision.from_dict(
        {site.id: site.existing_equipment for site in scenario.scheme.sites}
    )


def _fmt(value: float | None) -> str:
    return "-" if value is None else f"{value:.2f}"


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        scenario = _load_scenario(args.scenario)
    except ScenarioError as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_ERROR
    violations = validate_scheme(scenario.scheme)
    if violations:  # parse_scenario_file already rejects these, but stay defensive
        for violation in violations:
            print(f"{violation.code}: {violation.message}", file=sys.stderr)
        return EXIT_ERROR
    scheme = scenario.scheme
    print(
        f"ok: {scheme.width_cells}x{scheme.height_cells} cells, "
        f"{len(scheme.obstacles)} obstacles, {len(scheme.sites)} sites, "
        f"{len(scheme.equipment)} equipment types, {len(scheme.receivers)} receivers"
    )
    return EXIT_OK


def cmd_coverage(args: argparse.Namespace) -> int:
    scenario = _load_scenario(args.scenario)
    if args.decision and args.existing:
        print("use either --decision or --existing, not both", file=sys.stderr)
        return EXIT_ERROR
    if args.decision:
        decision = _load_decision(args.decision)
    elif args.existing:
        decision = _existing_decision(scenario)
    else:
        decision = PlacementDecision()

    violations = validate_decision(scenario.scheme, decision)
    if violations:
        for violation in violations:
            print(f"{violation.code}: {violation.message}", file=sys.stderr)
        return EXIT_ERROR

    payload = coverage_payload(scenario.scheme, decision)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_json(out_dir / "coverage.json", payload)

    print("receiver  site      dBm      snr_dB   rate_mbps  meets_min")
    for row in payload["receivers"]:
        print(
            f"{row['receiver_id']:<9} {row['site_id'] or '-':<9} "
            f"{_fmt(row['received_dbm']):>8} {_fmt(row['snr_db']):>8} "
            f"{row['rate_mbps']:>9.1f}  {'yes' if row['meets_min_bitrate'] else 'NO'}"
        )
    print(f"wrote {out_dir / 'coverage.json'}")
    return EXIT_OK if payload["feasible"] else EXIT_INFEASIBLE


def cmd_optimize(args: argparse.Namespace) -> int:
    scenario = _load_scenario(args.scenario)
    if args.solver == "oracle":
        result = brute_force_pareto(scenario.scheme)
    else:
        params = SearchParams(
            seed=args.seed,
            population=args.population,
            generations=args.generations,
            budget_levels=args.budget_levels,
        )
        result = variant_probability_search(scenario.scheme, params)

    payload = pareto_payload(result, args.solver)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_json(out_dir / "pareto.json", payload)
    for index, point in enumerate(payload["points"]):
        _write_json(out_dir / f"decision_{index:03d}.json", {"assignment": point["assignment"]})

    print("point  cost        coverage    assignment")
    for index, point in enumerate(payload["points"]):
        assignment = ", ".join(f"{s}={e}" for s, e in sorted(point["assignment"].items())) or "-"
        print(
            f"{index:<6} {point['total_cost']:<11.2f} "
            f"{point['weighted_coverage']:<11.2f} {assignment}"
        )
    print(f"wrote {out_dir / 'pareto.json'} ({len(payload['points'])} points)")
    return EXIT_OK if payload["points"] else EXIT_INFEASIBLE


def cmd_calibrate(args: argparse.Namespace) -> int:
    scenario = _load_scenario(args.scenario)
    config = CalibrationConfig()
    result = calibrate(scenario.scheme, config)

    payload = calibration_payload(result)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_json(out_dir / "calibration.json", payload)

    calibrated = apply_calibration(scenario.scheme, result)
    write_atomic(
        out_dir / "scenario_calibrated.json",
        serialize_scenario(replace(scenario, scheme=calibrated)),
    )

    print(f"residual before: {result.residual_before_dB:.3f} dB")
    print(f"residual after:  {result.residual_after_dB:.3f} dB")
    for obstacle_id, loss in sorted(result.fitted_losses.items()):
        print(f"  {obstacle_id}: {loss:.2f} dB/cell")
    if result.inserted_obstacles:
        names = ", ".join(o.id for o in result.inserted_obstacles)
        print(f"inserted obstacles: {names}")
    print(f"wrote {out_dir / 'calibration.json'} and {out_dir / 'scenario_calibrated.json'}")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(Path(args.data_dir), max_workers=args.workers)
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plan",
        description="Plan wireless access-point placements on a cell grid.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="check a scenario file")
    p_validate.add_argument("scenario")
    p_validate.set_defaults(func=cmd_validate)

    p_coverage = sub.add_parser("coverage", help="coverage map of one placement decision")
    p_coverage.add_argument("scenario")
    p_coverage.add_argument("--decision", help="decision JSON file to evaluate")
    p_coverage.add_argument(
        "--existing", action="store_true", help="evaluate the as-built equipment instead"
    )
    p_coverage.add_argument("--out", default=".", help="output directory")
    p_coverage.set_defaults(func=cmd_coverage)

    p_optimize = sub.add_parser("optimize", help="search the cost/coverage Pareto front")
    p_optimize.add_argument("scenario")
    p_optimize.add_argument("--solver", choices=("oracle", "vps"), required=True)
    p_optimize.add_argument("--seed", type=int, default=0)
    p_optimize.add_argument("--population", type=int, default=SearchParams.population)
    p_optimize.add_argument("--generations", type=int, default=SearchParams.generations)
    p_optimize.add_argument("--budget-levels", type=int, default=SearchParams.budget_levels)
    p_optimize.add_argument("--out", default=".", help="output directory")
    p_optimize.set_defaults(func=cmd_optimize)

    p_calibrate = sub.add_parser("calibrate", help="fit absorptions to measurements")
    p_calibrate.add_argument("scenario")
    p_calibrate.add_argument("--out", default=".", help="output directory")
    p_calibrate.set_defaults(func=cmd_calibrate)

    p_serve = sub.add_parser("serve", help="run the HTTP planning service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--data-dir", default="./plan-data")
    p_serve.add_argument("--workers", type=int, default=None, help="run executor threads")
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; 2 means "infeasible" here, so
        # remap while letting --help keep its clean exit
        return EXIT_OK if exc.code in (0, None) else EXIT_ERROR
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (NoMeasurementsError, DanglingMeasurementError, InstanceTooLargeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
