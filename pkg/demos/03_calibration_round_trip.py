"""
Calibrating absorptions from field measurements
===============================================

Catalog attenuation values are guesses until someone walks the floor with
a spectrum analyzer.  This demo plants a wall whose real loss is 7 dB per
cell while the plan says 3, plus a metal cabinet nobody drew at all, takes
six noisy readings, and lets the calibrator sort it out.
"""

from dataclasses import replace

import numpy as np

from applan.calibrate import calibrate
from applan.grid import (
    CandidateSite,
    Cell,
    EquipmentType,
    GridScheme,
    Obstacle,
    Omni,
    ReceiverCell,
)
from applan.propagation import received_power

# ---------------------------------------------------------------------------
# The planned hall: one AP already installed, one wall the plan knows about
# (cataloged at 3 dB/cell, flagged calibratable).
# ---------------------------------------------------------------------------
radio = EquipmentType("installed", 18.0, 5.0, cost=100.0, pattern=Omni())
catalog_wall = Obstacle(
    "inner-wall",
    frozenset(Cell(20, row) for row in range(3)),
    loss_per_cell_dB=3.0,
    material_label="plaster",
    calibratable=True,
)
ap = CandidateSite("ap", Cell(0, 1), existing_equipment="installed")
planned = GridScheme(
    width_cells=60,
    height_cells=9,
    cell_size_m=5.0,
    obstacles=(catalog_wall,),
    sites=(ap,),
    equipment=(radio,),
)

# ---------------------------------------------------------------------------
# The building as it really is: the wall eats 7 dB/cell, and a forgotten
# cabinet adds a flat 13 dB on the corridor toward (40, 7).  Simulated
# readings = true power + uniform +/-2 dB meter noise.
# ---------------------------------------------------------------------------
true_world = replace(planned, obstacles=(replace(catalog_wall, loss_per_cell_dB=7.0),))
rng = np.random.default_rng(42)
survey = {
    "r-wall-a": (Cell(40, 1), 0.0),
    "r-wall-b": (Cell(50, 1), 0.0),
    "r-clear-a": (Cell(10, 1), 0.0),
    "r-hidden": (Cell(40, 7), 13.0),   # the cabinet's shadow
    "r-clear-b": (Cell(10, 7), 0.0),
    "r-clear-c": (Cell(19, 8), 0.0),
}
receivers = []
for rx_id, (cell, cabinet_loss) in survey.items():
    truth = received_power(true_world, ap, radio, cell) - cabinet_loss
    reading = truth + float(rng.uniform(-2.0, 2.0))
    receivers.append(
        ReceiverCell(rx_id, cell, measured_power_dBm=reading, measured_from_site="ap")
    )
measured = replace(planned, receivers=tuple(receivers))

# ---------------------------------------------------------------------------
# Before: predictions straight from the catalog.
# ---------------------------------------------------------------------------
print("prediction errors with catalog values:")
for rx in measured.receivers:
    predicted = received_power(measured, ap, radio, rx.cell)
    print(f"  {rx.id:<9} measured {rx.measured_power_dBm:>8.2f} dBm"
          f"   predicted {predicted:>8.2f} dBm"
          f"   off by {abs(rx.measured_power_dBm - predicted):>5.2f} dB")

# ---------------------------------------------------------------------------
# Calibrate: fit the calibratable absorptions on a 0.5 dB grid, then look
# for paths that are still badly over-predicted (>= 10 dB) and drop a
# synthetic absorber at their midpoint, then refit everything together.
# ---------------------------------------------------------------------------
result = calibrate(measured)
print(f"\nresidual before: {result.residual_before_dB:.2f} dB"
      f"   after: {result.residual_after_dB:.2f} dB")
print(f"fitted inner-wall loss: {result.fitted_losses['inner-wall']:.2f} dB/cell"
      " (catalog said 3.00, building has 7.00)")
for obstacle in result.inserted_obstacles:
    print(f"proposed unmodeled absorber '{obstacle.id}': "
          f"{obstacle.loss_per_cell_dB:.2f} dB/cell over {len(obstacle.cells)} cells")

print("\nper-measurement error after calibration:")
for rx_id, error in result.per_measurement_error_dB.items():
    print(f"  {rx_id:<9} {error:>5.2f} dB")
