"""Radio propagation over a cell grid: path loss, link budgets, coverage.

The model is deliberately coarse but fully deterministic: free-space loss
plus per-cell obstacle absorption, where an obstacle attenuates a link in
proportion to how much of the link's first Fresnel zone it blocks.  The
zone is discretized as one cross-path segment of cells per line-of-sight
cell, whose thickness grows toward the middle of the link.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .grid import (
    BitrateTable,
    Cell,
    CandidateSite,
    EquipmentType,
    GridScheme,
    Obstacle,
    PlacementDecision,
    ReceiverCell,
    cells_of_line,
    distance_m,
    in_sector,
)

__all__ = [
    "CoverageMap",
    "DEFAULT_SATURATION_DBM",
    "LinkBudget",
    "PathProfile",
    "SegmentSample",
    "best_link",
    "bitrate",
    "build_path_profile",
    "coverage_map",
    "free_space_loss",
    "fresnel_thickness_cells",
    "link_budget",
    "path_obstacle_loss",
    "received_power",
]

# First-Fresnel-radius coefficient for the fixed 2.44 GHz carrier, with all
# distances in meters.
FRESNEL_COEFF = 0.3531

# Received power reported when the target sits on the transmitter's own cell.
DEFAULT_SATURATION_DBM = 0.0

# Per-obstacle, per-segment partial-blockage knee: at or below this share of
# a segment's cells the obstacle attenuates proportionally, above it the
# full per-cell loss applies.
_PARTIAL_BLOCK_RATIO = 0.25

# Per-obstacle whole-zone occupancy above which the obstacle is treated as a
# solid blocker along every segment it touches.
_ZONE_BLOCK_RATIO = 0.30


def free_space_loss(distance_m: float) -> float:
    """Free-space path loss in dB at the model's fixed carrier frequency.

    Distances below one meter (including zero) are clamped to one meter,
    so the loss is always at least 40 dB.
    """
    return 40.0 + 20.0 * math.log10(max(distance_m, 1.0))


def fresnel_thickness_cells(d_to_ap_m: float, d_to_rx_m: float, cell_size_m: float) -> int:
    """Discretized first-Fresnel-zone thickness, in whole cells.

    Args:
        d_to_ap_m: distance from the sample point to the transmitter, meters.
        d_to_rx_m: distance from the sample point to the receiver, meters.
        cell_size_m: grid cell edge length, meters.

    Returns:
        A thickness of at least one cell.  Radii below 1.5 cells collapse
        to a single cell; larger radii are floored to whole cells.
    """
    if d_to_ap_m <= 0.0 or d_to_rx_m <= 0.0:
        return 1
    radius = (FRESNEL_COEFF / cell_size_m) * math.sqrt(
        d_to_ap_m * d_to_rx_m / (d_to_ap_m + d_to_rx_m)
    )
    if radius < 1.5:
        return 1
    return int(math.floor(radius))


@dataclass(frozen=True)
class SegmentSample:
    """The Fresnel-zone cross-section attached to one line-of-sight cell.

    ``occupancy`` maps obstacle id to ``(occupied_cells, occupied_ratio)``
    for every obstacle that intersects the segment; absent obstacles
    occupy nothing.
    """

    center_cell: Cell
    segment_cells: tuple[Cell, ...]
    occupancy: Mapping[str, tuple[int, float]]


@dataclass(frozen=True)
class PathProfile:
    """Discretized first Fresnel zone of one AP-to-receiver path."""

    ap_cell: Cell
    rx_cell: Cell
    los_cells: tuple[Cell, ...]
    thickness_cells: tuple[int, ...]
    segments: tuple[SegmentSample, ...]


def _iround(value: float) -> int:
    # Round half toward +inf so opposite fractional offsets stay deterministic.
    return int(math.floor(value + 0.5))


def build_path_profile(scheme: GridScheme, ap_cell: Cell, rx_cell: Cell) -> PathProfile:
    """Trace the line-of-sight cells and their Fresnel segments.

    Each LOS cell gets one segment of cells running normal to the straight
    AP-to-receiver line (normal taken to the left of travel), stepped one
    cell at a time along the normal's dominant axis and clipped to the
    grid.  Odd thickness centers the segment on the LOS cell; even
    thickness places the extra cell on the left of travel.  A degenerate
    path (AP and receiver on the same cell) has a single one-cell segment.
    """
    los = tuple(cells_of_line(ap_cell, rx_cell))

    d_col = rx_cell.col - ap_cell.col
    d_row = rx_cell.row - ap_cell.row
    length = math.hypot(d_col, d_row)
    if length > 0.0:
        # Unit normal, left of travel, rescaled so the dominant axis steps
        # exactly one cell per unit offset.
        n_col = -d_row / length
        n_row = d_col / length
        dominant = max(abs(n_col), abs(n_row))
        step_col = n_col / dominant
        step_row = n_row / dominant
    else:
        step_col = step_row = 0.0

    thicknesses: list[int] = []
    segments: list[SegmentSample] = []
    for cell in los:
        d_ap = distance_m(cell, ap_cell, scheme.cell_size_m)
        d_rx = distance_m(cell, rx_cell, scheme.cell_size_m)
        thickness = fresnel_thickness_cells(d_ap, d_rx, scheme.cell_size_m)
        thicknesses.append(thickness)

        if thickness == 1 or length == 0.0:
            segment_cells: tuple[Cell, ...] = (cell,)
        else:
            cells = []
            for k in range(-((thickness - 1) // 2), thickness // 2 + 1):
                candidate = Cell(
                    cell.col + _iround(k * step_col),
                    cell.row + _iround(k * step_row),
                )
                if scheme.contains(candidate):
                    cells.append(candidate)
            segment_cells = tuple(cells)

        occupancy: dict[str, tuple[int, float]] = {}
        for obstacle in scheme.obstacles:
            occupied = sum(1 for c in segment_cells if c in obstacle.cells)
            if occupied:
                occupancy[obstacle.id] = (occupied, occupied / len(segment_cells))
        segments.append(SegmentSample(cell, segment_cells, occupancy))

    return PathProfile(ap_cell, rx_cell, los, tuple(thicknesses), tuple(segments))


def segment_loss(segment: SegmentSample, obstacles: Sequence[Obstacle]) -> float:
    """Attenuation contributed by one Fresnel segment, in dB.

    Per obstacle: a share of the segment at or below the partial-blockage
    knee attenuates proportionally to the share; above it the obstacle
    costs its full per-cell loss once.  Obstacles absent from the segment
    contribute nothing.
    """
    loss_by_id = {o.id: o.loss_per_cell_dB for o in obstacles}
    total = 0.0
    for obstacle_id, (_count, ratio) in segment.occupancy.items():
        loss = loss_by_id[obstacle_id]
        total += ratio * loss if ratio <= _PARTIAL_BLOCK_RATIO else loss
    return total


def path_obstacle_loss(profile: PathProfile, obstacles: Sequence[Obstacle]) -> float:
    """Total obstacle attenuation over a whole path, in dB.

    An obstacle occupying more than the whole-zone blockage share of all
    Fresnel cells of the profile counts as solid: it costs its full
    per-cell loss once per segment it intersects.  Every other obstacle
    contributes segment by segment under the partial-blockage rule.
    Contributions add across obstacles.
    """
    zone_cells = sum(len(s.segment_cells) for s in profile.segments)
    if zone_cells == 0:
        return 0.0

    occupied_total: dict[str, int] = {}
    segments_touched: dict[str, int] = {}
    for segment in profile.segments:
        for obstacle_id, (count, _ratio) in segment.occupancy.items():
            occupied_total[obstacle_id] = occupied_total.get(obstacle_id, 0) + count
            segments_touched[obstacle_id] = segments_touched.get(obstacle_id, 0) + 1

    loss_by_id = {o.id: o.loss_per_cell_dB for o in obstacles}
    blocked = {
        obstacle_id
        for obstacle_id, occupied in occupied_total.items()
        if occupied / zone_cells > _ZONE_BLOCK_RATIO
    }

    total = sum(loss_by_id[obstacle_id] * segments_touched[obstacle_id] for obstacle_id in blocked)
    for segment in profile.segments:
        for obstacle_id, (_count, ratio) in segment.occupancy.items():
            if obstacle_id in blocked:
                continue
            loss = loss_by_id[obstacle_id]
            total += ratio * loss if ratio <= _PARTIAL_BLOCK_RATIO else loss
    return total


@dataclass(frozen=True)
class LinkBudget:
    """Full accounting of one AP-to-target link.

    ``received_dBm`` always equals ``tx_power + tx_gain + rx_gain -
    obstacle_loss_dB - fsl_dB`` exactly; for a target on the AP's own cell
    the saturation constant is folded into ``fsl_dB`` to keep that
    identity.
    """

    site_id: str
    equipment_id: str
    target_cell: Cell
    rx_id: str | None
    distance_m: float
    fsl_dB: float
    obstacle_loss_dB: float
    received_dBm: float
    snr_dB: float
    rate_mbps: float


def bitrate(snr_dB: float, table: BitrateTable) -> float:
    """Link rate for an SNR: the first table step at or below it wins."""
    for threshold, rate in table.steps:
        if snr_dB >= threshold:
            return rate
    return 0.0


def link_budget(
    scheme: GridScheme,
    site: CandidateSite,
    equip: EquipmentType,
    target: Cell,
    *,
    rx_gain_dBi: float = 0.0,
    noise_dBm: float = -95.0,
    rx_id: str | None = None,
    saturation_dBm: float = DEFAULT_SATURATION_DBM,
) -> LinkBudget | None:
    """Compute one link end to end, or ``None`` when the antenna pattern
    does not radiate toward the target at all."""
    if not in_sector(site.cell, equip.pattern, target):
        return None

    gains = equip.tx_power_dBm + equip.tx_gain_dBi + rx_gain_dBi
    if target == site.cell:
        received = saturation_dBm
        fsl = gains - saturation_dBm
        obstacle_loss = 0.0
        dist = 0.0
    else:
        dist = distance_m(site.cell, target, scheme.cell_size_m)
        fsl = free_space_loss(dist)
        profile = build_path_profile(scheme, site.cell, target)
        obstacle_loss = path_obstacle_loss(profile, scheme.obstacles)
        received = gains - obstacle_loss - fsl

    snr = received - noise_dBm
    return LinkBudget(
        site_id=site.id,
        equipment_id=equip.id,
        target_cell=target,
        rx_id=rx_id,
        distance_m=dist,
        fsl_dB=fsl,
        obstacle_loss_dB=obstacle_loss,
        received_dBm=received,
        snr_dB=snr,
        rate_mbps=bitrate(snr, scheme.bitrate_table),
    )


def received_power(
    scheme: GridScheme,
    site: CandidateSite,
    equip: EquipmentType,
    target: Cell,
    *,
    rx_gain_dBi: float = 0.0,
    saturation_dBm: float = DEFAULT_SATURATION_DBM,
) -> float | None:
    """Received power at ``target`` in dBm, or ``None`` when unreachable.

    Unreachable means the antenna pattern does not radiate toward the
    target; attenuation alone never makes a link unreachable.
    """
    budget = link_budget(
        scheme,
        site,
        equip,
        target,
        rx_gain_dBi=rx_gain_dBi,
        saturation_dBm=saturation_dBm,
    )
    return None if budget is None else budget.received_dBm


def best_link(
    scheme: GridScheme,
    decision: PlacementDecision,
    rx: ReceiverCell,
    *,
    saturation_dBm: float = DEFAULT_SATURATION_DBM,
) -> LinkBudget | None:
    """Strongest link serving a receiver under a placement decision.

    Ties on received power go to the lexicographically smallest site id.
    Returns ``None`` when no assigned equipment radiates toward the
    receiver.
    """
    best: LinkBudget | None = None
    for site_id, equipment_id in decision.assignments:  # sorted by site id
        site = scheme.site_by_id(site_id)
        equip = scheme.equipment_by_id(equipment_id)
        budget = link_budget(
            scheme,
            site,
            equip,
            rx.cell,
            rx_gain_dBi=rx.rx_gain_dBi,
            noise_dBm=rx.noise_dBm,
            rx_id=rx.id,
            saturation_dBm=saturation_dBm,
        )
        if budget is None:
            continue
        if best is None or budget.received_dBm > best.received_dBm:
            best = budget
    return best


@dataclass(frozen=True)
class CoverageMap:
    """Best received power and rate for every cell of the grid.

    Grids are flat row-major tuples (index ``row * width + col``).
    Unreached cells hold ``None`` power, zero rate and ``None`` site.
    """

    width_cells: int
    height_cells: int
    power_dBm: tuple[float | None, ...]
    snr_dB: tuple[float | None, ...]
    rate_mbps: tuple[float, ...]
    serving_site: tuple[str | None, ...]

    def at(self, cell: Cell) -> tuple[float | None, float]:
        index = cell.row * self.width_cells + cell.col
        return self.power_dBm[index], self.rate_mbps[index]


def coverage_map(
    scheme: GridScheme,
    decision: PlacementDecision,
    *,
    saturation_dBm: float = DEFAULT_SATURATION_DBM,
) -> CoverageMap:
    """Evaluate the best link on every grid cell with default receiver
    parameters (0 dBi gain, the default noise floor)."""
    pairs = [
        (scheme.site_by_id(site_id), scheme.equipment_by_id(equipment_id))
        for site_id, equipment_id in decision.assignments
    ]
    power: list[float | None] = []
    snr: list[float | None] = []
    rate: list[float] = []
    serving: list[str | None] = []
    for row in range(scheme.height_cells):
        for col in range(scheme.width_cells):
            target = Cell(col, row)
            best: LinkBudget | None = None
            for site, equip in pairs:
                budget = link_budget(
                    scheme, site, equip, target, saturation_dBm=saturation_dBm
                )
                if budget is None:
                    continue
                if best is None or budget.received_dBm > best.received_dBm:
                    best = budget
            if best is None:
                power.append(None)
                snr.append(None)
                rate.append(0.0)
                serving.append(None)
            else:
                power.append(best.received_dBm)
                snr.append(best.snr_dB)
                rate.append(best.rate_mbps)
                serving.append(best.site_id)
    return CoverageMap(
        scheme.width_cells,
        scheme.height_cells,
        tuple(power),
        tuple(snr),
        tuple(rate),
        tuple(serving),
    )
