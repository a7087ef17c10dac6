"""
Coverage heatmap for a small office
===================================

Build a two-room hall on a 24 x 16 grid, install one radio, and render
the resulting bitrate map as ASCII art.  Every cell is evaluated with the
full link budget: free-space loss over the cell-center distance plus the
attenuation of whatever the first Fresnel zone clips on the way.
"""

from applan.grid import (
    CandidateSite,
    Cell,
    EquipmentType,
    GridScheme,
    Obstacle,
    Omni,
    PlacementDecision,
    ReceiverCell,
)
from applan.propagation import best_link, coverage_map

# ---------------------------------------------------------------------------
# The floor: 24 x 16 cells of 4 m.  A concrete wall splits the floor into
# two rooms, with a doorway gap at rows 7-8.
# ---------------------------------------------------------------------------
wall_cells = frozenset(
    Cell(11, row) for row in range(16) if row not in (7, 8)
)
office = GridScheme(
    width_cells=24,
    height_cells=16,
    cell_size_m=4.0,
    obstacles=(
        Obstacle("room-divider", wall_cells, loss_per_cell_dB=12.0,
                 material_label="concrete"),
    ),
    sites=(
        CandidateSite("closet", Cell(4, 8)),
        CandidateSite("ceiling-east", Cell(18, 7)),
    ),
    equipment=(
        EquipmentType("office-ap", tx_power_dBm=10.0, tx_gain_dBi=2.0,
                      cost=80.0, pattern=Omni()),
    ),
    receivers=(
        ReceiverCell("desk-west", Cell(2, 2), weight=2.0),
        ReceiverCell("desk-east", Cell(21, 13), weight=1.0),
    ),
)

# ---------------------------------------------------------------------------
# Install the radio in the west closet and evaluate every cell.
# ---------------------------------------------------------------------------
decision = PlacementDecision((("closet", "office-ap"),))
grid = coverage_map(office, decision)

# One glyph per bitrate tier of the default table (54 / 18 / 1 Mbps).
def glyph(col: int, row: int) -> str:
    if Cell(col, row) in wall_cells:
        return "|"
    _power, rate = grid.at(Cell(col, row))
    if rate >= 54.0:
        return "#"
    if rate >= 18.0:
        return "+"
    if rate >= 1.0:
        return "."
    return " "

print("bitrate map ('#' 54 Mbps, '+' 18, '.' 1, ' ' none, '|' wall):")
for row in range(office.height_cells):
    print("  " + "".join(glyph(col, row) for col in range(office.width_cells)))

# ---------------------------------------------------------------------------
# The wall shadow is visible on the right half.  Check the two desks: the
# west desk sees the AP directly, the east desk sits behind the wall.
# ---------------------------------------------------------------------------
print()
print("receiver   power-dBm  snr-dB  rate-mbps  wall-loss-dB")
for rx in office.receivers:
    link = best_link(office, decision, rx)
    assert link is not None
    print(f"{rx.id:<10} {link.received_dBm:>9.2f} {link.snr_dB:>7.2f}"
          f" {link.rate_mbps:>10.1f} {link.obstacle_loss_dB:>13.2f}")

# ---------------------------------------------------------------------------
# Moving the radio to the east ceiling mount flips the shadow around: the
# doorway at rows 7-8 lets a corridor of signal through either way.
# ---------------------------------------------------------------------------
east = coverage_map(office, PlacementDecision((("ceiling-east", "office-ap"),)))
full_west = sum(1 for r in grid.rate_mbps if r >= 54.0)
full_east = sum(1 for r in east.rate_mbps if r >= 54.0)
print()
print(f"cells at full rate from closet:       {full_west} / {len(grid.rate_mbps)}")
print(f"cells at full rate from east ceiling: {full_east} / {len(east.rate_mbps)}")
