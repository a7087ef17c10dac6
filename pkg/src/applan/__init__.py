"""Grid-based wireless access-point placement planning workbench.

The package splits into five layers:

- :mod:`applan.grid` -- domain types (schemes, obstacles, sites, receivers,
  decisions) and discrete geometry primitives.
- :mod:`applan.propagation` -- path profiles, link budgets and coverage maps.
- :mod:`applan.optimize` -- bi-objective cost/coverage placement search.
- :mod:`applan.calibrate` -- fitting obstacle absorptions to measurements.
- :mod:`applan.scenario` / :mod:`applan.cli` / :mod:`applan.service` --
  the on-disk file format, the ``plan`` command and the HTTP service.
"""

from .calibrate import (
    CalibrationConfig,
    CalibrationResult,
    DanglingMeasurementError,
    NoMeasurementsError,
    apply_calibration,
    calibrate,
    detect_invisible_obstacles,
    fit_absorptions,
    residual,
)
from .grid import (
    Beam,
    BitrateTable,
    CandidateSite,
    Cell,
    DEFAULT_BITRATE_TABLE,
    EquipmentType,
    GridScheme,
    Obstacle,
    Omni,
    PlacementDecision,
    ReceiverCell,
    Sector,
    Violation,
    bearing_deg,
    cells_of_line,
    distance_m,
    in_sector,
    validate_decision,
    validate_scheme,
)
from .optimize import (
    InstanceTooLargeError,
    ObjectiveVector,
    ParetoResult,
    SearchParams,
    brute_force_pareto,
    dominates,
    evaluate,
    pareto_filter,
    variant_probability_search,
)
from .propagation import (
    CoverageMap,
    LinkBudget,
    PathProfile,
    SegmentSample,
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
)
from .scenario import (
    ScenarioError,
    ScenarioFile,
    MalformedSyntaxError,
    SchemaViolationError,
    UnsupportedVersionError,
    parse_scenario,
    parse_scenario_file,
    serialize_scenario,
)

__version__ = "0.1.0"
