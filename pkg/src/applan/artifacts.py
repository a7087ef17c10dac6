"""JSON-ready result payloads shared by the CLI and the HTTP service.

Both front ends emit exactly these dictionaries, so a command-line run
and a service run of the same request produce byte-identical results.
Payloads carry no wall-clock timings: repeated runs with the same seed
must serialize identically.
"""

from __future__ import annotations

from typing import Any

from .calibrate import CalibrationResult
from .grid import GridScheme, PlacementDecision, ReceiverCell
from .optimize import ObjectiveVector, ParetoResult
from .propagation import (
    CoverageMap,
    best_link,
    build_path_profile,
    coverage_map,
    link_budget,
)

__all__ = [
    "calibration_payload",
    "coverage_payload",
    "pareto_payload",
    "path_payload",
]


def _receiver_row(scheme: GridScheme, decision: PlacementDecision, rx: ReceiverCell) -> dict:
    budget = best_link(scheme, decision, rx)
    if budget is None:
        return {
            "receiver_id": rx.id,
            "site_id": None,
            "received_dbm": None,
            "snr_db": None,
            "rate_mbps": 0.0,
            "meets_min_bitrate": rx.min_bitrate_mbps <= 0.0,
        }
    return {
        "receiver_id": rx.id,
        "site_id": budget.site_id,
        "received_dbm": budget.received_dBm,
        "snr_db": budget.snr_dB,
        "rate_mbps": budget.rate_mbps,
        "meets_min_bitrate": budget.rate_mbps >= rx.min_bitrate_mbps,
    }


def coverage_payload(scheme: GridScheme, decision: PlacementDecision) -> dict[str, Any]:
    """Coverage of one decision: flat row-major grids plus receiver rows."""
    cov: CoverageMap = coverage_map(scheme, decision)
    receivers = [_receiver_row(scheme, decision, rx) for rx in scheme.receivers]
    return {
        "kind": "coverage",
        "assignment": decision.as_dict(),
        "width_cells": cov.width_cells,
        "height_cells": cov.height_cells,
        "power_dbm": list(cov.power_dBm),
        "snr_db": list(cov.snr_dB),
        "rate_mbps": list(cov.rate_mbps),
        "serving_site": list(cov.serving_site),
        "receivers": receivers,
        "feasible": all(r["meets_min_bitrate"] for r in receivers),
    }


def _point_doc(decision: PlacementDecision, objective: ObjectiveVector) -> dict:
    return {
        "assignment": decision.as_dict(),
        "total_cost": objective.total_cost,
        "weighted_coverage": objective.weighted_coverage,
        "per_receiver_rates": dict(sorted(objective.per_receiver_rates.items())),
    }


def pareto_payload(result: ParetoResult, solver: str) -> dict[str, Any]:
    """A Pareto front as data, sorted by ascending cost."""
    return {
        "kind": "pareto",
        "solver": solver,
        "seed": result.seed,
        "evaluations": result.evaluations,
        "points": [_point_doc(decision, objective) for decision, objective in result.points],
    }


def path_payload(
    scheme: GridScheme,
    site_id: str,
    receiver_id: str,
    equipment_id: str | None = None,
) -> dict[str, Any]:
    """Anatomy of one site-to-receiver path for inspection UIs.

    Carries the line-of-sight cells, the Fresnel thickness envelope, the
    full zone footprint (one cross-section cell list per line-of-sight
    cell, clipped to the grid), the zone cells each obstacle occupies,
    and the full link budget for the chosen equipment (defaulting to
    what is installed on the site).
    ``reachable`` is false when the antenna pattern does not radiate
    toward the receiver; the geometry is still reported.

    Raises ``KeyError`` for unknown ids and ``ValueError`` when no
    equipment is given and none is installed.
    """
    site = scheme.site_by_id(site_id)
    rx = scheme.receiver_by_id(receiver_id)
    equip_id = equipment_id if equipment_id is not None else site.existing_equipment
    if equip_id is None:
        raise ValueError(
            f"site {site_id!r} has no installed equipment; pass an equipment id"
        )
    equip = scheme.equipment_by_id(equip_id)

    profile = build_path_profile(scheme, site.cell, rx.cell)
    occupied: dict[str, set[tuple[int, int]]] = {}
    for segment in profile.segments:
        for obstacle in scheme.obstacles:
            if obstacle.id not in segment.occupancy:
                continue
            hits = occupied.setdefault(obstacle.id, set())
            hits.update(
                (cell.col, cell.row)
                for cell in segment.segment_cells
                if cell in obstacle.cells
            )

    budget = link_budget(
        scheme,
        site,
        equip,
        rx.cell,
        rx_gain_dBi=rx.rx_gain_dBi,
        noise_dBm=rx.noise_dBm,
        rx_id=rx.id,
    )
    return {
        "kind": "path",
        "site_id": site.id,
        "receiver_id": rx.id,
        "equipment_id": equip.id,
        "reachable": budget is not None,
        "los_cells": [[cell.col, cell.row] for cell in profile.los_cells],
        "thickness_cells": list(profile.thickness_cells),
        "zone_cells": [
            [[cell.col, cell.row] for cell in segment.segment_cells]
            for segment in profile.segments
        ],
        "obstacle_cells": {
            obstacle_id: sorted(cells)
            for obstacle_id, cells in sorted(occupied.items())
        },
        "budget": None
        if budget is None
        else {
            "tx_power_dbm": equip.tx_power_dBm,
            "tx_gain_dbi": equip.tx_gain_dBi,
            "rx_gain_dbi": rx.rx_gain_dBi,
            "obstacle_loss_db": budget.obstacle_loss_dB,
            "fsl_db": budget.fsl_dB,
            "received_dbm": budget.received_dBm,
            "snr_db": budget.snr_dB,
            "rate_mbps": budget.rate_mbps,
            "distance_m": budget.distance_m,
        },
    }


def calibration_payload(result: CalibrationResult) -> dict[str, Any]:
    """Fitted losses, residuals and inserted-obstacle proposals as data."""
    return {
        "kind": "calibration",
        "fitted_losses_db": dict(sorted(result.fitted_losses.items())),
        "residual_before_db": result.residual_before_dB,
        "residual_after_db": result.residual_after_dB,
        "per_measurement_error_db": dict(sorted(result.per_measurement_error_dB.items())),
        "inserted_obstacles": [
            {
                "id": o.id,
                "cells": [[c.col, c.row] for c in sorted(o.cells)],
                "loss_per_cell_db": o.loss_per_cell_dB,
                "material_label": o.material_label,
                "calibratable": o.calibratable,
            }
            for o in result.inserted_obstacles
        ],
    }
