"""Path loss, Fresnel-zone discretization, link budgets, coverage maps."""

from __future__ import annotations

import math

import numpy as np
import pytest

from applan.grid import (
    BitrateTable,
    CandidateSite,
    Cell,
    EquipmentType,
    Obstacle,
    Omni,
    PlacementDecision,
    ReceiverCell,
    Sector,
    cells_of_line,
)
from applan.propagation import (
    best_link,
    bitrate,
    build_path_profile,
    coverage_map,
    free_space_loss,
    fresnel_thickness_cells,
    link_budget,
    path_obstacle_loss,
    received_power,
    segment_loss,
    SegmentSample,
)

from conftest import make_scheme, std_radio, wall


# --- free-space loss --------------------------------------------------------


def test_fsl_reference_points() -> None:
    assert free_space_loss(1.0) == pytest.approx(40.0, abs=1e-12)
    assert free_space_loss(10.0) == pytest.approx(60.0, abs=1e-12)
    assert free_space_loss(100.0) == pytest.approx(80.0, abs=1e-12)


def test_fsl_clamps_below_one_meter() -> None:
    assert free_space_loss(0.0) == 40.0
    assert free_space_loss(0.3) == 40.0


def test_fsl_strictly_increasing_beyond_clamp() -> None:
    rng = np.random.default_rng(2)
    for _ in range(1000):
        d1, d2 = sorted(rng.uniform(1.0, 5000.0, size=2))
        if d1 < d2:
            assert free_space_loss(d1) < free_space_loss(d2)


# --- Fresnel thickness ------------------------------------------------------


def test_fresnel_frozen_values() -> None:
    # 0.3531 * sqrt(50*50/100) = 0.3531 * 5 = 1.7655 -> floor -> 1
    assert fresnel_thickness_cells(50.0, 50.0, 1.0) == 1
    # 0.3531 * sqrt(1000*1000/2000) = 7.8955... -> 7
    assert fresnel_thickness_cells(1000.0, 1000.0, 1.0) == 7


def test_fresnel_endpoint_collapses_to_one() -> None:
    assert fresnel_thickness_cells(0.0, 123.0, 1.0) == 1
    assert fresnel_thickness_cells(123.0, 0.0, 1.0) == 1


def test_fresnel_small_radius_is_one_cell() -> None:
    # radius just below the 1.5-cell knee stays a single cell
    assert fresnel_thickness_cells(8.0, 8.0, 1.0) == 1


def test_fresnel_symmetry_and_midpoint_maximum() -> None:
    rng = np.random.default_rng(4)
    for _ in range(500):
        d1 = float(rng.uniform(1.0, 2000.0))
        d2 = float(rng.uniform(1.0, 2000.0))
        cell = float(rng.uniform(0.5, 10.0))
        assert fresnel_thickness_cells(d1, d2, cell) == fresnel_thickness_cells(d2, d1, cell)
    for total in (100.0, 500.0, 1800.0):
        mid = fresnel_thickness_cells(total / 2, total / 2, 1.0)
        for split in np.linspace(1.0, total - 1.0, 37):
            assert fresnel_thickness_cells(float(split), total - float(split), 1.0) <= mid


# --- path profiles ----------------------------------------------------------


def _long_path_scheme(obstacles=()):
    return make_scheme(width=2001, height=41, cell_size=1.0, obstacles=obstacles)


def test_profile_degenerate_path() -> None:
    scheme = make_scheme()
    profile = build_path_profile(scheme, Cell(4, 4), Cell(4, 4))
    assert profile.los_cells == (Cell(4, 4),)
    assert profile.thickness_cells == (1,)
    assert profile.segments[0].segment_cells == (Cell(4, 4),)


def test_profile_los_cells_match_line_and_endpoint_thickness() -> None:
    scheme = _long_path_scheme()
    profile = build_path_profile(scheme, Cell(0, 20), Cell(2000, 20))
    assert profile.los_cells == tuple(cells_of_line(Cell(0, 20), Cell(2000, 20)))
    assert profile.thickness_cells[0] == 1
    assert profile.thickness_cells[-1] == 1
    # one meter in from the AP the zone is still a single cell
    assert profile.thickness_cells[1] == 1
    # at the middle of a 2 km link the zone is 7 cells thick
    assert profile.thickness_cells[1000] == 7
    mid_segment = profile.segments[1000]
    assert mid_segment.segment_cells == tuple(Cell(1000, r) for r in range(17, 24))


def test_profile_segment_length_matches_thickness_inside_grid() -> None:
    scheme = _long_path_scheme()
    profile = build_path_profile(scheme, Cell(0, 20), Cell(2000, 20))
    for thickness, segment in zip(profile.thickness_cells, profile.segments):
        assert len(segment.segment_cells) == thickness


def test_profile_even_thickness_puts_extra_cell_left_of_travel() -> None:
    # 200 m link: midpoint radius 0.3531*sqrt(100*100/200) = 2.497 -> 2 cells
    scheme = make_scheme(width=201, height=21, cell_size=1.0)
    # traveling +col, left of travel is +row
    profile = build_path_profile(scheme, Cell(0, 10), Cell(200, 10))
    mid = 100
    thickness = profile.thickness_cells[mid]
    assert thickness == 2
    assert profile.segments[mid].segment_cells == (Cell(mid, 10), Cell(mid, 11))


def test_profile_diagonal_segments_run_normal_to_travel() -> None:
    scheme = make_scheme(width=600, height=600, cell_size=1.0)
    profile = build_path_profile(scheme, Cell(0, 0), Cell(599, 599))
    mid = len(profile.los_cells) // 2
    thickness = profile.thickness_cells[mid]
    assert thickness >= 3
    center = profile.segments[mid].center_cell
    # left of (+col,+row) travel is the (-row, +col)... normalized: (-1, +1)/sqrt2
    expected = tuple(
        Cell(center.col - k, center.row + k)
        for k in range(-((thickness - 1) // 2), thickness // 2 + 1)
    )
    assert set(profile.segments[mid].segment_cells) == set(expected)


def test_profile_occupancy_counts_wall_cells() -> None:
    barrier = wall("w", [(1000, r) for r in range(14, 27)], 7.0)
    scheme = _long_path_scheme(obstacles=(barrier,))
    profile = build_path_profile(scheme, Cell(0, 20), Cell(2000, 20))
    occupancy = profile.segments[1000].occupancy
    assert occupancy == {"w": (7, 1.0)}
    assert profile.segments[999].occupancy == {}


# --- segment and path loss --------------------------------------------------


def _segment_with_ratio(occupied: int, total: int, loss: float) -> tuple[SegmentSample, list]:
    cells = tuple(Cell(c, 0) for c in range(total))
    obstacle = Obstacle("o", frozenset(cells[:occupied]), loss)
    segment = SegmentSample(
        center_cell=cells[0],
        segment_cells=cells,
        occupancy={"o": (occupied, occupied / total)},
    )
    return segment, [obstacle]


def test_segment_loss_proportional_below_knee() -> None:
    segment, obstacles = _segment_with_ratio(1, 8, 7.0)
    assert segment_loss(segment, obstacles) == pytest.approx(0.875)


def test_segment_loss_full_above_knee() -> None:
    segment, obstacles = _segment_with_ratio(3, 8, 7.0)
    assert segment_loss(segment, obstacles) == pytest.approx(7.0)


def test_segment_loss_knee_boundary_is_proportional() -> None:
    segment, obstacles = _segment_with_ratio(2, 8, 7.0)
    assert segment_loss(segment, obstacles) == pytest.approx(1.75)


def test_segment_loss_empty_segment() -> None:
    segment = SegmentSample(Cell(0, 0), (Cell(0, 0),), {})
    assert segment_loss(segment, []) == 0.0


def test_path_loss_no_obstacles() -> None:
    scheme = make_scheme()
    profile = build_path_profile(scheme, Cell(0, 0), Cell(19, 19))
    assert path_obstacle_loss(profile, scheme.obstacles) == 0.0


def test_path_loss_thin_wall_uses_segment_rule() -> None:
    barrier = wall("w", [(1000, r) for r in range(14, 27)], 7.0)
    scheme = _long_path_scheme(obstacles=(barrier,))
    profile = build_path_profile(scheme, Cell(0, 20), Cell(2000, 20))
    # one fully cut segment, zone share far below the blockage knee
    assert path_obstacle_loss(profile, scheme.obstacles) == pytest.approx(7.0)


def test_path_loss_dense_blocker_charges_every_touched_segment() -> None:
    # 12-cell link, thickness 1 everywhere; a block over 5 LOS cells is
    # 5/12 = 41.7% of the zone -> solid: 5 segments * 7 dB = 35 dB.
    blocker = wall("w", [(c, 0) for c in range(4, 9)], 7.0)
    scheme = make_scheme(width=12, height=1, cell_size=1.0, obstacles=(blocker,))
    profile = build_path_profile(scheme, Cell(0, 0), Cell(11, 0))
    assert path_obstacle_loss(profile, scheme.obstacles) == pytest.approx(35.0)


def test_path_loss_contributions_add_across_obstacles() -> None:
    wall_a = wall("a", [(3, 0)], 7.0)
    wall_b = wall("b", [(8, 0)], 2.0)
    scheme = make_scheme(width=12, height=1, cell_size=1.0, obstacles=(wall_a, wall_b))
    profile = build_path_profile(scheme, Cell(0, 0), Cell(11, 0))
    assert path_obstacle_loss(profile, scheme.obstacles) == pytest.approx(9.0)


# --- bitrate ----------------------------------------------------------------


def test_bitrate_default_steps_inclusive() -> None:
    table = make_scheme().bitrate_table
    assert bitrate(61.0, table) == 54.0
    assert bitrate(25.0, table) == 54.0
    assert bitrate(24.999, table) == 18.0
    assert bitrate(15.0, table) == 18.0
    assert bitrate(4.0, table) == 1.0
    assert bitrate(3.999, table) == 0.0
    assert bitrate(-10.0, table) == 0.0


def test_bitrate_monotone_in_snr() -> None:
    table = BitrateTable(steps=((30.0, 100.0), (20.0, 40.0), (10.0, 12.0), (0.0, 2.0)))
    rng = np.random.default_rng(6)
    for _ in range(1000):
        s1, s2 = sorted(rng.uniform(-20.0, 50.0, size=2))
        assert bitrate(s1, table) <= bitrate(s2, table)


# --- received power and link budgets ----------------------------------------


def _ten_meter_scheme(obstacles=()):
    return make_scheme(
        width=20,
        height=1,
        cell_size=1.0,
        obstacles=obstacles,
        equipment=(std_radio("e1"),),
        sites=(CandidateSite("s1", Cell(0, 0), allowed_equipment=("e1",)),),
    )


def test_received_power_clear_path() -> None:
    scheme = _ten_meter_scheme()
    power = received_power(
        scheme, scheme.sites[0], scheme.equipment[0], Cell(10, 0), rx_gain_dBi=2.0
    )
    assert power == pytest.approx(-34.0, abs=1e-12)


def test_received_power_one_wall_cell() -> None:
    scheme = _ten_meter_scheme(obstacles=(wall("w", [(5, 0)], 7.0),))
    power = received_power(
        scheme, scheme.sites[0], scheme.equipment[0], Cell(10, 0), rx_gain_dBi=2.0
    )
    assert power == pytest.approx(-41.0, abs=1e-12)


def test_received_power_sector_miss_is_unreachable() -> None:
    equip = EquipmentType("e1", 18.0, 6.0, 40.0, Sector(azimuth_deg=180.0, width_deg=90.0))
    scheme = make_scheme(
        width=20,
        height=1,
        cell_size=1.0,
        equipment=(equip,),
        sites=(CandidateSite("s1", Cell(0, 0), allowed_equipment=("e1",)),),
    )
    assert received_power(scheme, scheme.sites[0], equip, Cell(10, 0)) is None


def test_received_power_same_cell_saturates() -> None:
    scheme = _ten_meter_scheme()
    assert received_power(scheme, scheme.sites[0], scheme.equipment[0], Cell(0, 0)) == 0.0


def test_link_budget_identity_random_triples() -> None:
    rng = np.random.default_rng(8)
    checked = 0
    for _scheme_index in range(20):
        cells = [(int(c), int(r)) for c, r in rng.integers(0, 20, size=(12, 2))]
        obstacles = tuple(
            wall(f"w{i}", [cells[i]], float(rng.uniform(0.5, 12.0))) for i in range(6)
        )
        equipment = tuple(
            EquipmentType(
                f"e{i}",
                float(rng.uniform(5.0, 25.0)),
                float(rng.uniform(0.0, 9.0)),
                40.0,
                Omni(),
            )
            for i in range(2)
        )
        sites = tuple(
            CandidateSite(f"s{i}", Cell(*cells[6 + i])) for i in range(3)
        )
        scheme = make_scheme(
            cell_size=float(rng.uniform(0.5, 8.0)),
            obstacles=obstacles,
            equipment=equipment,
            sites=sites,
        )
        for _ in range(100):
            site = sites[int(rng.integers(0, len(sites)))]
            equip = equipment[int(rng.integers(0, len(equipment)))]
            target = Cell(int(rng.integers(0, 20)), int(rng.integers(0, 20)))
            rx_gain = float(rng.uniform(0.0, 4.0))
            budget = link_budget(scheme, site, equip, target, rx_gain_dBi=rx_gain)
            assert budget is not None
            reconstructed = (
                equip.tx_power_dBm
                + equip.tx_gain_dBi
                + rx_gain
                - budget.obstacle_loss_dB
                - budget.fsl_dB
            )
            assert budget.received_dBm == reconstructed
            checked += 1
    assert checked == 2000


def test_received_power_monotone_under_obstacle_growth() -> None:
    rng = np.random.default_rng(9)
    base_cells: set[tuple[int, int]] = {(15, 14)}
    scheme = make_scheme(
        width=30,
        height=30,
        cell_size=2.0,
        equipment=(std_radio("e1"),),
        sites=(CandidateSite("s1", Cell(2, 15), allowed_equipment=("e1",)),),
    )
    site, equip = scheme.sites[0], scheme.equipment[0]
    target = Cell(27, 15)
    previous = math.inf
    for _ in range(300):
        base_cells.add((int(rng.integers(0, 30)), int(rng.integers(0, 30))))
        grown = make_scheme(
            width=30,
            height=30,
            cell_size=2.0,
            obstacles=(wall("w", sorted(base_cells), 6.0),),
            equipment=scheme.equipment,
            sites=scheme.sites,
        )
        power = received_power(grown, site, equip, target)
        assert power is not None
        assert power <= previous + 1e-9
        previous = power


def test_best_link_picks_strongest_and_breaks_ties_low() -> None:
    equipment = (std_radio("near", tx_power=18.0), std_radio("far", tx_power=18.0))
    sites = (
        CandidateSite("s1", Cell(5, 10)),
        CandidateSite("s2", Cell(15, 10)),
        CandidateSite("s3", Cell(12, 10)),
    )
    rx = ReceiverCell("r1", Cell(10, 10))
    scheme = make_scheme(equipment=equipment, sites=sites, receivers=(rx,))
    # s3 is closest -> strongest
    decision = PlacementDecision((("s1", "near"), ("s2", "near"), ("s3", "near")))
    budget = best_link(scheme, decision, rx)
    assert budget is not None and budget.site_id == "s3"
    # equidistant s1/s2 with the same radio tie -> lowest site id
    tie = PlacementDecision((("s1", "near"), ("s2", "near")))
    budget = best_link(scheme, tie, rx)
    assert budget is not None and budget.site_id == "s1"


def test_best_link_none_when_nothing_assigned() -> None:
    rx = ReceiverCell("r1", Cell(10, 10))
    scheme = make_scheme(receivers=(rx,))
    assert best_link(scheme, PlacementDecision(), rx) is None


def test_best_link_argmax_invariant_under_common_power_shift() -> None:
    rng = np.random.default_rng(10)
    for _ in range(50):
        site_cells = set()
        while len(site_cells) < 3:
            site_cells.add((int(rng.integers(0, 20)), int(rng.integers(0, 20))))
        site_cells = sorted(site_cells)
        equipment = tuple(
            EquipmentType(f"e{i}", float(rng.uniform(10, 20)), float(rng.uniform(0, 6)), 1.0)
            for i in range(2)
        )
        sites = tuple(CandidateSite(f"s{i}", Cell(*site_cells[i])) for i in range(3))
        rx_cell = Cell(int(rng.integers(0, 20)), int(rng.integers(0, 20)))
        if (rx_cell.col, rx_cell.row) in {(c.cell.col, c.cell.row) for c in sites}:
            continue  # a receiver on a site cell saturates and ignores power shifts
        rx = ReceiverCell("r", rx_cell)
        decision = PlacementDecision(
            tuple((f"s{i}", f"e{int(rng.integers(0, 2))}") for i in range(3))
        )
        scheme = make_scheme(equipment=equipment, sites=sites, receivers=(rx,))
        shifted_equipment = tuple(
            EquipmentType(e.id, e.tx_power_dBm + 11.5, e.tx_gain_dBi, e.cost, e.pattern)
            for e in equipment
        )
        shifted = make_scheme(equipment=shifted_equipment, sites=sites, receivers=(rx,))
        first = best_link(scheme, decision, rx)
        second = best_link(shifted, decision, rx)
        assert first is not None and second is not None
        assert first.site_id == second.site_id


# --- coverage maps ----------------------------------------------------------


def test_coverage_empty_decision_all_unreached() -> None:
    scheme = make_scheme(width=6, height=5)
    cov = coverage_map(scheme, PlacementDecision())
    assert cov.power_dBm == (None,) * 30
    assert cov.snr_dB == (None,) * 30
    assert cov.rate_mbps == (0.0,) * 30
    assert cov.serving_site == (None,) * 30


def test_coverage_single_ap_power_decays_with_distance() -> None:
    scheme = make_scheme(
        width=15,
        height=15,
        cell_size=4.0,
        equipment=(std_radio("e1"),),
        sites=(CandidateSite("s1", Cell(7, 7), allowed_equipment=("e1",)),),
    )
    cov = coverage_map(scheme, PlacementDecision((("s1", "e1"),)))
    ranked = []
    for row in range(15):
        for col in range(15):
            power, _rate = cov.at(Cell(col, row))
            assert power is not None
            ranked.append((math.hypot(col - 7, row - 7), power))
    ranked.sort()
    for (d1, p1), (d2, p2) in zip(ranked, ranked[1:]):
        if d2 > d1:
            assert p2 <= p1 + 1e-9


def test_coverage_agrees_with_best_link_at_receiver_cells() -> None:
    scheme = make_scheme(
        width=18,
        height=18,
        cell_size=3.0,
        obstacles=(wall("w", [(9, r) for r in range(4, 14)], 5.0),),
        equipment=(std_radio("e1"), std_radio("e2", tx_power=24.0, cost=120.0)),
        sites=(
            CandidateSite("s1", Cell(3, 9)),
            CandidateSite("s2", Cell(14, 9)),
        ),
        receivers=(
            ReceiverCell("r1", Cell(6, 6)),
            ReceiverCell("r2", Cell(12, 12)),
            ReceiverCell("r3", Cell(17, 0)),
        ),
    )
    decision = PlacementDecision((("s1", "e1"), ("s2", "e2")))
    cov = coverage_map(scheme, decision)
    for rx in scheme.receivers:
        budget = best_link(scheme, decision, rx)
        assert budget is not None
        power, rate = cov.at(rx.cell)
        assert power == pytest.approx(budget.received_dBm)
        assert rate == budget.rate_mbps
