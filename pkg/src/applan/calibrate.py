"""Fit obstacle absorptions to field measurements; find unmodeled absorbers.

Receivers can carry a measured received power from one specific site's
existing equipment.  Calibration adjusts the per-cell absorption of every
obstacle marked calibratable so the propagation model reproduces those
measurements as closely as possible (L1 residual), then inserts synthetic
"invisible" obstacles on measurement paths that are obstacle-free yet
still much weaker than predicted, and refits.

Predicted power is linear in the per-cell losses with geometry-only
coefficients, so the model is sampled once per measurement path and the
coordinate-descent fit reduces to cheap vector arithmetic while staying
numerically identical to re-running the propagation engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Mapping

import numpy as np

from .grid import Cell, GridScheme, Obstacle, distance_m, in_sector
from .propagation import (
    DEFAULT_SATURATION_DBM,
    PathProfile,
    build_path_profile,
    free_space_loss,
    path_obstacle_loss,
)

__all__ = [
    "CalibrationConfig",
    "CalibrationResult",
    "DanglingMeasurementError",
    "NoMeasurementsError",
    "apply_calibration",
    "calibrate",
    "detect_invisible_obstacles",
    "fit_absorptions",
    "residual",
]

# Guard against one-ulp rounding when a discrepancy is meant to sit exactly
# on the insertion trigger.
_TRIGGER_EPS = 1e-9

INVISIBLE_MATERIAL_LABEL = "invisible"


class NoMeasurementsError(ValueError):
    """The scheme has no receiver with a field measurement."""


class DanglingMeasurementError(ValueError):
    """A measurement references a site that cannot transmit.

    Either the site id is unknown or the site has no existing equipment
    installed.
    """


@dataclass(frozen=True)
class CalibrationConfig:
    """Bounds and knobs of the measurement fit."""

    absorption_min_dB: float = 0.0
    absorption_max_dB: float = 30.0
    quantum_dB: float = 0.5
    invisible_trigger_dB: float = 10.0
    max_passes: int = 20
    seed: int = 0
    unreachable_penalty_dB: float = 200.0

    def __post_init__(self) -> None:
        if self.absorption_min_dB < 0:
            raise ValueError("absorption_min_dB must be non-negative")
        if self.absorption_max_dB < self.absorption_min_dB:
            raise ValueError("absorption_max_dB must be at least absorption_min_dB")
        if self.quantum_dB <= 0:
            raise ValueError("quantum_dB must be positive")
        if self.invisible_trigger_dB <= 0:
            raise ValueError("invisible_trigger_dB must be positive")
        if self.max_passes < 1:
            raise ValueError("max_passes must be at least 1")
        if self.unreachable_penalty_dB <= 0:
            raise ValueError("unreachable_penalty_dB must be positive")


@dataclass(frozen=True)
class CalibrationResult:
    """Outcome of a fit: final losses, residuals and per-measurement errors.

    ``fitted_losses`` reports every obstacle's final per-cell loss
    (non-calibratable ones keep their catalog values).  Residuals are L1
    sums over all measurements.
    """

    fitted_losses: Mapping[str, float]
    residual_before_dB: float
    residual_after_dB: float
    per_measurement_error_dB: Mapping[str, float]
    inserted_obstacles: tuple[Obstacle, ...] = ()


class _MeasurementModel:
    """Per-measurement linear model: predicted = base - coeffs * losses.

    The coefficient of each obstacle is obtained by pricing the path with
    that obstacle alone at 1 dB per cell, so partial-blockage and
    whole-zone blockage behave exactly as in the propagation engine
    (both depend on geometry only, never on loss values).
    """

    def __init__(self, scheme: GridScheme, config: CalibrationConfig) -> None:
        self.scheme = scheme
        self.config = config
        self.obstacle_ids = [o.id for o in scheme.obstacles]

        rx_ids: list[str] = []
        measured: list[float] = []
        reachable: list[bool] = []
        base: list[float] = []
        coeff_rows: list[list[float]] = []
        profiles: list[PathProfile | None] = []

        unit_obstacles = {
            o.id: [
                replace(other, loss_per_cell_dB=1.0 if other.id == o.id else 0.0)
                for other in scheme.obstacles
            ]
            for o in scheme.obstacles
        }

        for rx in scheme.receivers:
            if rx.measured_power_dBm is None or rx.measured_from_site is None:
                continue
            try:
                site = scheme.site_by_id(rx.measured_from_site)
            except KeyError:
                raise DanglingMeasurementError(
                    f"receiver {rx.id!r} measurement references unknown site "
                    f"{rx.measured_from_site!r}"
                ) from None
            if site.existing_equipment is None:
                raise DanglingMeasurementError(
                    f"receiver {rx.id!r} measurement references site {site.id!r} "
                    "which has no existing equipment"
                )
            try:
                equip = scheme.equipment_by_id(site.existing_equipment)
            except KeyError:
                raise DanglingMeasurementError(
                    f"site {site.id!r} existing equipment "
                    f"{site.existing_equipment!r} is not in the catalog"
                ) from None

            rx_ids.append(rx.id)
            measured.append(rx.measured_power_dBm)

            if not in_sector(site.cell, equip.pattern, rx.cell):
                reachable.append(False)
                base.append(0.0)
                coeff_rows.append([0.0] * len(self.obstacle_ids))
                profiles.append(None)
                continue

            gains = equip.tx_power_dBm + equip.tx_gain_dBi + rx.rx_gain_dBi
            profile = build_path_profile(scheme, site.cell, rx.cell)
            profiles.append(profile)
            reachable.append(True)
            if rx.cell == site.cell:
                base.append(DEFAULT_SATURATION_DBM)
                coeff_rows.append([0.0] * len(self.obstacle_ids))
                continue
            dist = distance_m(site.cell, rx.cell, scheme.cell_size_m)
            base.append(gains - free_space_loss(dist))
            coeff_rows.append(
                [
                    path_obstacle_loss(profile, unit_obstacles[obstacle_id])
                    for obstacle_id in self.obstacle_ids
                ]
            )

        self.rx_ids = rx_ids
        self.measured = np.array(measured)
        self.reachable = np.array(reachable, dtype=bool)
        self.base = np.array(base)
        self.coeffs = np.array(coeff_rows).reshape(len(rx_ids), len(self.obstacle_ids))
        self.profiles = profiles

    def catalog_losses(self) -> np.ndarray:
        return np.array([o.loss_per_cell_dB for o in self.scheme.obstacles])

    def predicted(self, losses: np.ndarray) -> np.ndarray:
        """Predicted received power per measurement; unreachable rows are
        meaningless and masked out by the caller."""
        if not self.obstacle_ids:
            return self.base.copy()
        return self.base - self.coeffs @ losses

    def errors(self, losses: np.ndarray) -> np.ndarray:
        errs = np.abs(self.measured - self.predicted(losses))
        return np.where(self.reachable, errs, self.config.unreachable_penalty_dB)

    def residual(self, losses: np.ndarray) -> float:
        return float(self.errors(losses).sum())


def _losses_vector(scheme: GridScheme, losses: Mapping[str, float]) -> np.ndarray:
    known = {o.id for o in scheme.obstacles}
    unknown = sorted(set(losses) - known)
    if unknown:
        raise ValueError(f"losses name unknown obstacle ids: {unknown}")
    return np.array([losses.get(o.id, o.loss_per_cell_dB) for o in scheme.obstacles])


def residual(
    scheme: GridScheme,
    losses: Mapping[str, float],
    config: CalibrationConfig | None = None,
) -> float:
    """L1 measurement residual under candidate per-cell losses, in dB.

    Obstacles absent from ``losses`` keep their catalog values.  Every
    measured receiver contributes the absolute gap between its measured
    and predicted power; measurements whose site cannot radiate toward
    them at all contribute the configured penalty instead.
    """
    config = config or CalibrationConfig()
    model = _MeasurementModel(scheme, config)
    if not model.rx_ids:
        raise NoMeasurementsError("scheme has no measured receivers")
    return model.residual(_losses_vector(scheme, losses))


def _quantum_grid(config: CalibrationConfig) -> np.ndarray:
    span = config.absorption_max_dB - config.absorption_min_dB
    steps = int(math.floor(span / config.quantum_dB + 1e-9))
    return config.absorption_min_dB + config.quantum_dB * np.arange(steps + 1)


def fit_absorptions(scheme: GridScheme, config: CalibrationConfig | None = None) -> CalibrationResult:
    """Fit calibratable absorptions to measurements by coordinate descent.

    Each pass scans the calibratable obstacles in id order; for each one
    every value on the quantum grid is priced and the residual-minimizing
    value is kept (ties go to the smallest loss).  Stops when a full pass
    changes nothing or after the configured number of passes.
    Non-calibratable obstacles are never touched.
    """
    config = config or CalibrationConfig()
    model = _MeasurementModel(scheme, config)
    if not model.rx_ids:
        raise NoMeasurementsError("scheme has no measured receivers")

    losses = model.catalog_losses()
    residual_before = model.residual(losses)

    calibratable = sorted(
        (i for i, o in enumerate(scheme.obstacles) if o.calibratable),
        key=lambda i: scheme.obstacles[i].id,
    )
    grid = _quantum_grid(config)

    if calibratable and len(grid):
        reachable = model.reachable
        penalty_total = float((~reachable).sum()) * config.unreachable_penalty_dB
        for _pass in range(config.max_passes):
            changed = False
            for index in calibratable:
                column = model.coeffs[:, index]
                partial = model.predicted(losses) + column * losses[index]
                # Residual for every grid value of this obstacle at once:
                # shape (measurements, grid values).
                predicted_sweep = partial[:, None] - np.outer(column, grid)
                errs = np.abs(model.measured[:, None] - predicted_sweep)
                totals = errs[reachable].sum(axis=0) + penalty_total
                best = int(np.argmin(totals))
                if losses[index] != grid[best]:
                    losses[index] = grid[best]
                    changed = True
            if not changed:
                break

    fitted = {o.id: float(value) for o, value in zip(scheme.obstacles, losses)}
    return CalibrationResult(
        fitted_losses=fitted,
        residual_before_dB=residual_before,
        residual_after_dB=model.residual(losses),
        per_measurement_error_dB={
            rx_id: float(err) for rx_id, err in zip(model.rx_ids, model.errors(losses))
        },
    )


def _apply_losses(scheme: GridScheme, losses: Mapping[str, float]) -> GridScheme:
    obstacles = tuple(
        replace(o, loss_per_cell_dB=losses.get(o.id, o.loss_per_cell_dB))
        for o in scheme.obstacles
    )
    return replace(scheme, obstacles=obstacles)


def _disc_cells(scheme: GridScheme, center: Cell, radius: int) -> frozenset[Cell]:
    cells = []
    for d_row in range(-radius, radius + 1):
        for d_col in range(-radius, radius + 1):
            if d_col * d_col + d_row * d_row <= radius * radius:
                cell = Cell(center.col + d_col, center.row + d_row)
                if scheme.contains(cell):
                    cells.append(cell)
    return frozenset(cells)


def _unique_obstacle_id(base: str, taken: set[str]) -> str:
    if base not in taken:
        return base
    suffix = 2
    while f"{base}-{suffix}" in taken:
        suffix += 1
    return f"{base}-{suffix}"


def detect_invisible_obstacles(
    scheme: GridScheme, config: CalibrationConfig | None = None
) -> list[Obstacle]:
    """Propose obstacles explaining over-predicted clear-path measurements.

    Only measurements whose Fresnel zone intersects no obstacle at all are
    considered.  When predicted minus measured reaches the trigger, a disc
    of cells is proposed at the path's midpoint LOS cell with radius equal
    to the Fresnel thickness there; its per-cell loss spreads the whole
    discrepancy evenly over the LOS cells the disc covers.  The scheme is
    not modified; proposals are returned (marked calibratable, labeled
    "invisible").
    """
    config = config or CalibrationConfig()
    model = _MeasurementModel(scheme, config)
    if not model.rx_ids:
        raise NoMeasurementsError("scheme has no measured receivers")

    losses = model.catalog_losses()
    predicted = model.predicted(losses)

    taken = {o.id for o in scheme.obstacles}
    proposals: list[Obstacle] = []
    for index, rx_id in enumerate(model.rx_ids):
        if not model.reachable[index]:
            continue
        if model.coeffs.shape[1] and model.coeffs[index].any():
            continue  # path already crosses a modeled obstacle
        discrepancy = float(predicted[index] - model.measured[index])
        if discrepancy < config.invisible_trigger_dB - _TRIGGER_EPS:
            continue
        profile = model.profiles[index]
        assert profile is not None  # reachable measurements always carry one
        midpoint = len(profile.los_cells) // 2
        center = profile.los_cells[midpoint]
        radius = profile.thickness_cells[midpoint]
        cells = _disc_cells(scheme, center, radius)
        los_in_disc = sum(1 for cell in profile.los_cells if cell in cells)
        obstacle_id = _unique_obstacle_id(f"invisible-{rx_id}", taken)
        taken.add(obstacle_id)
        proposals.append(
            Obstacle(
                id=obstacle_id,
                cells=cells,
                loss_per_cell_dB=discrepancy / los_in_disc,
                material_label=INVISIBLE_MATERIAL_LABEL,
                calibratable=True,
            )
        )
    return proposals


def apply_calibration(scheme: GridScheme, result: CalibrationResult) -> GridScheme:
    """A new scheme with fitted losses applied and proposals appended.

    The input scheme is left untouched.
    """
    updated = _apply_losses(scheme, result.fitted_losses)
    if result.inserted_obstacles:
        existing = {o.id for o in updated.obstacles}
        additions = tuple(o for o in result.inserted_obstacles if o.id not in existing)
        updated = replace(updated, obstacles=updated.obstacles + additions)
    return updated


def calibrate(scheme: GridScheme, config: CalibrationConfig | None = None) -> CalibrationResult:
    """Full pipeline: fit, hunt for invisible obstacles, fit again.

    The reported residual_before is measured on the untouched input; the
    residual_after and per-measurement errors come from the final fit.
    Inserted obstacles are reported with their final fitted losses and are
    included in ``fitted_losses``.
    """
    config = config or CalibrationConfig()
    first = fit_absorptions(scheme, config)

    fitted_scheme = _apply_losses(scheme, first.fitted_losses)
    inserted = detect_invisible_obstacles(fitted_scheme, config)
    if not inserted:
        return first

    augmented = replace(
        fitted_scheme, obstacles=fitted_scheme.obstacles + tuple(inserted)
    )
    second = fit_absorptions(augmented, config)
    final_inserted = tuple(
        replace(o, loss_per_cell_dB=second.fitted_losses[o.id]) for o in inserted
    )
    return CalibrationResult(
        fitted_losses=second.fitted_losses,
        residual_before_dB=first.residual_before_dB,
        residual_after_dB=second.residual_after_dB,
        per_measurement_error_dB=second.per_measurement_error_dB,
        inserted_obstacles=final_inserted,
    )
