"""Domain types and discrete geometry for grid-based WLAN planning.

A planning scheme lives on a uniform square-cell grid.  Cells are addressed
as ``(col, row)`` index pairs.  Distances between cells are Euclidean,
center to center, scaled by the cell size in meters.  Bearings (used by
sector antennas) are measured in degrees from the +col axis, turning
positive toward +row, normalized to ``[0, 360)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

__all__ = [
    "AntennaPattern",
    "Beam",
    "BitrateTable",
    "CandidateSite",
    "Cell",
    "DEFAULT_BITRATE_TABLE",
    "DEFAULT_NOISE_DBM",
    "EquipmentType",
    "GridScheme",
    "Obstacle",
    "Omni",
    "PlacementDecision",
    "ReceiverCell",
    "Sector",
    "Violation",
    "bearing_deg",
    "cells_of_line",
    "distance_m",
    "in_sector",
    "validate_decision",
    "validate_scheme",
]

DEFAULT_NOISE_DBM = -95.0


@dataclass(frozen=True, order=True)
class Cell:
    """A grid cell address (column first, then row)."""

    col: int
    row: int


@dataclass(frozen=True)
class Omni:
    """Radiates in every direction."""


@dataclass(frozen=True)
class Sector:
    """Radiates into an angular sector around ``azimuth_deg``.

    A target is covered when its bearing from the antenna lies within
    ``width_deg / 2`` of the azimuth (boundary inclusive).  A width of 360
    behaves exactly like an omnidirectional antenna.
    """

    azimuth_deg: float
    width_deg: float


@dataclass(frozen=True)
class Beam:
    """A point-to-point link aimed at one partner cell."""

    partner_cell: Cell


AntennaPattern = Omni | Sector | Beam


@dataclass(frozen=True)
class Obstacle:
    """A set of grid cells sharing one per-cell signal absorption.

    ``loss_per_cell_dB`` is stored as a positive attenuation magnitude.
    ``calibratable`` marks absorptions that a measurement fit may adjust.
    """

    id: str
    cells: frozenset[Cell]
    loss_per_cell_dB: float
    material_label: str = ""
    calibratable: bool = False


@dataclass(frozen=True)
class EquipmentType:
    """A deployable radio model: power, gain, cost and antenna pattern."""

    id: str
    tx_power_dBm: float
    tx_gain_dBi: float
    cost: float
    pattern: AntennaPattern = field(default_factory=Omni)


@dataclass(frozen=True)
class CandidateSite:
    """A cell where equipment may be installed.

    ``allowed_equipment`` of ``None`` means every equipment type in the
    scheme's catalog is allowed.  ``existing_equipment`` records what is
    already installed today (used by calibration and as-built coverage).
    """

    id: str
    cell: Cell
    infra_cost: float = 0.0
    allowed_equipment: tuple[str, ...] | None = None
    existing_equipment: str | None = None


@dataclass(frozen=True)
class ReceiverCell:
    """A demand point that wants coverage, with optional field measurement.

    ``measured_power_dBm`` / ``measured_from_site`` must be set together:
    a measurement is a received power observed from one specific site's
    existing equipment.
    """

    id: str
    cell: Cell
    weight: float = 1.0
    min_bitrate_mbps: float = 0.0
    noise_dBm: float = DEFAULT_NOISE_DBM
    rx_gain_dBi: float = 0.0
    measured_power_dBm: float | None = None
    measured_from_site: str | None = None


@dataclass(frozen=True)
class BitrateTable:
    """Step function from SNR to link rate.

    ``steps`` holds ``(snr_threshold_dB, rate_mbps)`` rows with strictly
    decreasing thresholds and strictly decreasing rates.  An SNR at or
    above a threshold earns that row's rate; below every threshold the
    rate is zero.
    """

    steps: tuple[tuple[float, float], ...]


DEFAULT_BITRATE_TABLE = BitrateTable(steps=((25.0, 54.0), (15.0, 18.0), (4.0, 1.0)))


@dataclass(frozen=True)
class GridScheme:
    """A complete planning scene: grid, obstacles, sites, catalog, demand."""

    width_cells: int
    height_cells: int
    cell_size_m: float
    frequency_GHz: float = 2.44
    obstacles: tuple[Obstacle, ...] = ()
    sites: tuple[CandidateSite, ...] = ()
    equipment: tuple[EquipmentType, ...] = ()
    receivers: tuple[ReceiverCell, ...] = ()
    bitrate_table: BitrateTable = DEFAULT_BITRATE_TABLE

    def contains(self, cell: Cell) -> bool:
        return 0 <= cell.col < self.width_cells and 0 <= cell.row < self.height_cells

    def site_by_id(self, site_id: str) -> CandidateSite:
        for site in self.sites:
            if site.id == site_id:
                return site
        raise KeyError(f"unknown site id: {site_id!r}")

    def equipment_by_id(self, equipment_id: str) -> EquipmentType:
        for equip in self.equipment:
            if equip.id == equipment_id:
                return equip
        raise KeyError(f"unknown equipment id: {equipment_id!r}")

    def receiver_by_id(self, receiver_id: str) -> ReceiverCell:
        for rx in self.receivers:
            if rx.id == receiver_id:
                return rx
        raise KeyError(f"unknown receiver id: {receiver_id!r}")

    def allowed_equipment_ids(self, site: CandidateSite) -> tuple[str, ...]:
        """Equipment ids installable at ``site`` (``None`` means the whole catalog)."""
        if site.allowed_equipment is None:
            return tuple(equip.id for equip in self.equipment)
        return site.allowed_equipment


@dataclass(frozen=True)
class PlacementDecision:
    """Which equipment type, if any, each candidate site receives.

    Stored as ``(site_id, equipment_id)`` pairs sorted by site id; sites
    left out carry no equipment.  At most one assignment per site is
    enforced at construction.  The sorted-tuple form makes decisions
    hashable and gives them a stable lexicographic order used for
    deterministic tie-breaking.
    """

    assignments: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        ordered = tuple(sorted(self.assignments))
        site_ids = [site_id for site_id, _ in ordered]
        if len(set(site_ids)) != len(site_ids):
            raise ValueError("a site may carry at most one equipment assignment")
        object.__setattr__(self, "assignments", ordered)

    @classmethod
    def from_dict(cls, assignment: Mapping[str, str | None]) -> "PlacementDecision":
        return cls(tuple((s, e) for s, e in assignment.items() if e is not None))

    def equipment_at(self, site_id: str) -> str | None:
        for sid, equipment_id in self.assignments:
            if sid == site_id:
                return equipment_id
        return None

    def as_dict(self) -> dict[str, str]:
        return dict(self.assignments)


@dataclass(frozen=True)
class Violation:
    """One machine-readable validation finding."""

    code: str
    message: str


def _check_unique_ids(kind: str, ids: Iterable[str], out: list[Violation]) -> None:
    seen: set[str] = set()
    for item_id in ids:
        if item_id in seen:
            out.append(Violation("duplicate-id", f"duplicate {kind} id {item_id!r}"))
        seen.add(item_id)


def validate_scheme(scheme: GridScheme) -> list[Violation]:
    """Check every structural rule of a scheme; return violations as data.

    An empty list means the scheme is well-formed.  Violations carry a
    stable ``code`` (for programmatic handling) and a human message.
    """
    out: list[Violation] = []

    if scheme.width_cells <= 0 or scheme.height_cells <= 0:
        out.append(Violation("grid-size", "grid must have positive width and height"))
    if scheme.cell_size_m <= 0:
        out.append(Violation("grid-size", "cell_size_m must be positive"))
    if scheme.frequency_GHz <= 0:
        out.append(Violation("grid-size", "frequency_GHz must be positive"))

    _check_unique_ids("obstacle", (o.id for o in scheme.obstacles), out)
    _check_unique_ids("site", (s.id for s in scheme.sites), out)
    _check_unique_ids("equipment", (e.id for e in scheme.equipment), out)
    _check_unique_ids("receiver", (r.id for r in scheme.receivers), out)

    equipment_ids = {e.id for e in scheme.equipment}
    site_ids = {s.id for s in scheme.sites}

    for obstacle in scheme.obstacles:
        if not obstacle.cells:
            out.append(Violation("obstacle-empty", f"obstacle {obstacle.id!r} has no cells"))
        if obstacle.loss_per_cell_dB < 0:
            out.append(
                Violation(
                    "negative-loss",
                    f"obstacle {obstacle.id!r} has negative loss_per_cell_dB",
                )
            )
        for cell in obstacle.cells:
            if not scheme.contains(cell):
                out.append(
                    Violation(
                        "cell-out-of-bounds",
                        f"obstacle {obstacle.id!r} cell ({cell.col}, {cell.row}) "
                        "is outside the grid",
                    )
                )

    for equip in scheme.equipment:
        if equip.cost < 0:
            out.append(Violation("negative-cost", f"equipment {equip.id!r} has negative cost"))
        pattern = equip.pattern
        if isinstance(pattern, Sector) and not 0 < pattern.width_deg <= 360:
            out.append(
                Violation(
                    "sector-width",
                    f"equipment {equip.id!r} sector width must be in (0, 360]",
                )
            )
        if isinstance(pattern, Beam) and not scheme.contains(pattern.partner_cell):
            out.append(
                Violation(
                    "cell-out-of-bounds",
                    f"equipment {equip.id!r} beam partner cell is outside the grid",
                )
            )

    cells_taken: dict[Cell, str] = {}
    for site in scheme.sites:
        if not scheme.contains(site.cell):
            out.append(
                Violation(
                    "cell-out-of-bounds",
                    f"site {site.id!r} cell ({site.cell.col}, {site.cell.row}) "
                    "is outside the grid",
                )
            )
        if site.cell in cells_taken:
            out.append(
                Violation(
                    "duplicate-site-cell",
                    f"sites {cells_taken[site.cell]!r} and {site.id!r} share cell "
                    f"({site.cell.col}, {site.cell.row})",
                )
            )
        else:
            cells_taken[site.cell] = site.id
        if site.infra_cost < 0:
            out.append(Violation("negative-cost", f"site {site.id!r} has negative infra_cost"))
        allowed = scheme.allowed_equipment_ids(site)
        if not allowed:
            out.append(
                Violation(
                    "allowed-equipment-empty",
                    f"site {site.id!r} allows no equipment at all",
                )
            )
        for equipment_id in allowed:
            if equipment_id not in equipment_ids:
                out.append(
                    Violation(
                        "unknown-equipment",
                        f"site {site.id!r} allows unknown equipment {equipment_id!r}",
                    )
                )
        if site.existing_equipment is not None:
            if site.existing_equipment not in equipment_ids:
                out.append(
                    Violation(
                        "unknown-equipment",
                        f"site {site.id!r} existing equipment "
                        f"{site.existing_equipment!r} is not in the catalog",
                    )
                )
            elif site.existing_equipment not in allowed:
                out.append(
                    Violation(
                        "existing-not-allowed",
                        f"site {site.id!r} existing equipment "
                        f"{site.existing_equipment!r} is not in its allowed list",
                    )
                )

    for rx in scheme.receivers:
        if not scheme.contains(rx.cell):
            out.append(
                Violation(
                    "cell-out-of-bounds",
                    f"receiver {rx.id!r} cell ({rx.cell.col}, {rx.cell.row}) "
                    "is outside the grid",
                )
            )
        if rx.weight < 0:
            out.append(Violation("negative-weight", f"receiver {rx.id!r} has negative weight"))
        if rx.min_bitrate_mbps < 0:
            out.append(
                Violation(
                    "negative-min-bitrate",
                    f"receiver {rx.id!r} has negative min_bitrate_mbps",
                )
            )
        has_power = rx.measured_power_dBm is not None
        has_site = rx.measured_from_site is not None
        if has_power != has_site:
            out.append(
                Violation(
                    "measurement-pair",
                    f"receiver {rx.id!r} must set measured_power_dBm and "
                    "measured_from_site together",
                )
            )
        if has_site and rx.measured_from_site not in site_ids:
            out.append(
                Violation(
                    "unknown-site",
                    f"receiver {rx.id!r} measurement references unknown site "
                    f"{rx.measured_from_site!r}",
                )
            )

    steps = scheme.bitrate_table.steps
    if not steps:
        out.append(Violation("bitrate-table", "bitrate table must have at least one step"))
    for (t_hi, r_hi), (t_lo, r_lo) in zip(steps, steps[1:]):
        if not (t_hi > t_lo and r_hi > r_lo):
            out.append(
                Violation(
                    "bitrate-table",
                    "bitrate table thresholds and rates must be strictly decreasing",
                )
            )
            break
    if any(r < 0 for _, r in steps):
        out.append(Violation("bitrate-table", "bitrate table rates must be non-negative"))

    return out


def validate_decision(scheme: GridScheme, decision: PlacementDecision) -> list[Violation]:
    """Check a placement decision against a scheme's sites and catalog."""
    out: list[Violation] = []
    for site_id, equipment_id in decision.assignments:
        try:
            site = scheme.site_by_id(site_id)
        except KeyError:
            out.append(Violation("unknown-site", f"decision names unknown site {site_id!r}"))
            continue
        allowed = scheme.allowed_equipment_ids(site)
        if equipment_id not in allowed:
            out.append(
                Violation(
                    "equipment-not-allowed",
                    f"equipment {equipment_id!r} is not allowed at site {site_id!r}",
                )
            )
    return out


def cells_of_line(a: Cell, b: Cell) -> list[Cell]:
    """Integer line-drawing cells from ``a`` to ``b``, inclusive.

    Classic 8-connected midpoint walk: exactly ``max(|dcol|, |drow|) + 1``
    cells, stepping at most one cell per axis between neighbors.  The walk
    always runs in a canonical endpoint order internally, so the two
    directions of the same segment visit the same set of cells.
    """
    if (a.col, a.row) > (b.col, b.row):
        return list(reversed(cells_of_line(b, a)))

    x, y = a.col, a.row
    dx = abs(b.col - a.col)
    dy = abs(b.row - a.row)
    step_x = 1 if a.col < b.col else -1
    step_y = 1 if a.row < b.row else -1
    err = dx - dy
    cells = [Cell(x, y)]
    while x != b.col or y != b.row:
        doubled = 2 * err
        if doubled > -dy:
            err -= dy
            x += step_x
        if doubled < dx:
            err += dx
            y += step_y
        cells.append(Cell(x, y))
    return cells


def distance_m(a: Cell, b: Cell, cell_size_m: float) -> float:
    """Euclidean center-to-center distance between two cells, in meters."""
    return math.hypot(b.col - a.col, b.row - a.row) * cell_size_m


def bearing_deg(origin: Cell, target: Cell) -> float:
    """Bearing of ``target`` from ``origin`` in degrees in ``[0, 360)``.

    Zero points along +col; angles grow toward +row.  The bearing of a
    cell to itself is defined as 0.
    """
    angle = math.degrees(math.atan2(target.row - origin.row, target.col - origin.col))
    return angle % 360.0


def in_sector(ap_cell: Cell, pattern: AntennaPattern, target: Cell) -> bool:
    """Whether ``target`` is radiated by an antenna at ``ap_cell``.

    Omni antennas cover everything.  Sector antennas cover targets whose
    bearing is within half the sector width of the azimuth (inclusive);
    the antenna's own cell is always covered.  Beam antennas cover only
    their own cell and the declared partner cell.
    """
    if isinstance(pattern, Omni):
        return True
    if isinstance(pattern, Beam):
        return target == ap_cell or target == pattern.partner_cell
    if target == ap_cell:
        return True
    offset = (bearing_deg(ap_cell, target) - pattern.azimuth_deg + 180.0) % 360.0 - 180.0
    return abs(offset) <= pattern.width_deg / 2.0
