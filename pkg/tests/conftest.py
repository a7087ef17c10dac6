"""Shared scheme builders used across the test suite."""

from __future__ import annotations

import pytest

from applan.grid import (
    BitrateTable,
    CandidateSite,
    Cell,
    EquipmentType,
    GridScheme,
    Obstacle,
    Omni,
    ReceiverCell,
)


def make_scheme(
    width: int = 20,
    height: int = 20,
    cell_size: float = 5.0,
    obstacles: tuple[Obstacle, ...] = (),
    sites: tuple[CandidateSite, ...] = (),
    equipment: tuple[EquipmentType, ...] = (),
    receivers: tuple[ReceiverCell, ...] = (),
    bitrate_table: BitrateTable | None = None,
) -> GridScheme:
    kwargs = {}
    if bitrate_table is not None:
        kwargs["bitrate_table"] = bitrate_table
    return GridScheme(
        width_cells=width,
        height_cells=height,
        cell_size_m=cell_size,
        obstacles=obstacles,
        sites=sites,
        equipment=equipment,
        receivers=receivers,
        **kwargs,
    )


def std_radio(equip_id: str = "radio", tx_power: float = 18.0, tx_gain: float = 6.0,
              cost: float = 40.0) -> EquipmentType:
    return EquipmentType(
        id=equip_id, tx_power_dBm=tx_power, tx_gain_dBi=tx_gain, cost=cost, pattern=Omni()
    )


def wall(obstacle_id: str, cells: list[tuple[int, int]], loss: float,
         calibratable: bool = False) -> Obstacle:
    return Obstacle(
        id=obstacle_id,
        cells=frozenset(Cell(c, r) for c, r in cells),
        loss_per_cell_dB=loss,
        material_label="wall",
        calibratable=calibratable,
    )


def parity_instance() -> GridScheme:
    """Five sites, two radio types: 3^5 = 243 decisions, exactly enumerable.

    The exact Pareto front has six points ranging from one budget radio to
    a mixed two-radio deployment; cost-tied decisions exist (swapping which
    of two sites gets the better radio) so the deterministic lexicographic
    collapse is exercised, not just assumed.
    """
    lite = EquipmentType("lite", 12.0, 2.0, 60.0, Omni())
    maxi = EquipmentType("maxi", 20.0, 8.0, 150.0, Omni())
    barrier = Obstacle(
        id="partition",
        cells=frozenset(
            Cell(12, r) for r in list(range(0, 10)) + list(range(14, 24))
        ),
        loss_per_cell_dB=10.0,
        material_label="drywall",
        calibratable=False,
    )
    sites = (
        CandidateSite("s1", Cell(3, 3), infra_cost=10.0),
        CandidateSite("s2", Cell(20, 4), infra_cost=21.0),
        CandidateSite("s3", Cell(4, 19), infra_cost=45.0),
        CandidateSite("s4", Cell(19, 20), infra_cost=93.0),
        CandidateSite("s5", Cell(12, 11), infra_cost=189.0),
    )
    receivers = (
        ReceiverCell("r1", Cell(1, 1), weight=1.0),
        ReceiverCell("r2", Cell(22, 2), weight=2.0),
        ReceiverCell("r3", Cell(2, 22), weight=1.5),
        ReceiverCell("r4", Cell(22, 22), weight=1.0),
        ReceiverCell("r5", Cell(11, 12), weight=3.0, min_bitrate_mbps=1.0),
        ReceiverCell("r6", Cell(17, 11), weight=2.0),
    )
    return make_scheme(
        width=24,
        height=24,
        cell_size=16.0,
        obstacles=(barrier,),
        equipment=(lite, maxi),
        sites=sites,
        receivers=receivers,
    )


@pytest.fixture
def empty_scheme() -> GridScheme:
    return make_scheme()
