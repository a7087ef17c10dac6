"""On-disk scenario files: strict JSON parsing and canonical serialization.

A scenario file is a JSON object with a mandatory ``format_version``, a
free-form ``annotations`` object and a ``scheme`` describing the full
planning scene.  Field names carry their units (``*_m``, ``*_db``,
``*_dbm``, ``*_ghz``, ``*_mbps``).  Cells are ``[col, row]`` pairs.
Sector azimuths are degrees from the +col axis turning toward +row.

Parsing is strict: unknown fields, missing required fields and wrong
types are rejected with machine-readable violation codes rather than
guessed around.  Serialization is canonical -- a parsed file re-serializes
to the exact same bytes -- which is what makes stored scenarios diffable
and lets the HTTP service detect genuine edits.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .grid import (
    Beam,
    BitrateTable,
    CandidateSite,
    Cell,
    EquipmentType,
    GridScheme,
    Obstacle,
    Omni,
    ReceiverCell,
    Sector,
    Violation,
    validate_scheme,
)

__all__ = [
    "FORMAT_VERSION",
    "MalformedSyntaxError",
    "ScenarioError",
    "ScenarioFile",
    "SchemaViolationError",
    "UnsupportedVersionError",
    "parse_scenario",
    "parse_scenario_file",
    "serialize_scenario",
    "write_atomic",
]

FORMAT_VERSION = 1


class ScenarioError(Exception):
    """Base class for scenario file problems."""


class MalformedSyntaxError(ScenarioError):
    """The bytes are not valid JSON at all."""


class UnsupportedVersionError(ScenarioError):
    """The file declares a format version this build does not speak."""


class SchemaViolationError(ScenarioError):
    """The JSON is well-formed but violates the scenario schema."""

    def __init__(self, violations: list[Violation]):
        self.violations = violations
        summary = "; ".join(f"{v.code}: {v.message}" for v in violations)
        super().__init__(summary or "schema violation")


@dataclass(frozen=True)
class ScenarioFile:
    """A parsed scenario: the scheme plus untouched annotations."""

    scheme: GridScheme
    annotations: dict[str, Any] = field(default_factory=dict)
    format_version: int = FORMAT_VERSION


def _fail(code: str, message: str) -> None:
    raise SchemaViolationError([Violation(code, message)])


def _require_object(value: Any, where: str) -> dict:
    if not isinstance(value, dict):
        _fail("wrong-type", f"{where} must be a JSON object")
    return value


def _require_array(value: Any, where: str) -> list:
    if not isinstance(value, list):
        _fail("wrong-type", f"{where} must be a JSON array")
    return value


def _check_keys(obj: dict, allowed: set[str], where: str) -> None:
    unknown = sorted(set(obj) - allowed)
    if unknown:
        _fail("unknown-field", f"{where} has unknown fields: {', '.join(unknown)}")


def _get(obj: dict, key: str, where: str) -> Any:
    if key not in obj:
        _fail("missing-field", f"{where} is missing required field {key!r}")
    return obj[key]


def _number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail("wrong-type", f"{where} must be a number")
    return float(value)


def _integer(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        _fail("wrong-type", f"{where} must be an integer")
    return value


def _string(value: Any, where: str) -> str:
    if not isinstance(value, str):
        _fail("wrong-type", f"{where} must be a string")
    return value


def _boolean(value: Any, where: str) -> bool:
    if not isinstance(value, bool):
        _fail("wrong-type", f"{where} must be a boolean")
    return value


def _cell(value: Any, where: str) -> Cell:
    array = _require_array(value, where)
    if len(array) != 2:
        _fail("wrong-type", f"{where} must be a [col, row] pair")
    return Cell(_integer(array[0], f"{where}[0]"), _integer(array[1], f"{where}[1]"))


def _pattern(value: Any, where: str) -> Omni | Sector | Beam:
    obj = _require_object(value, where)
    kind = _string(_get(obj, "kind", where), f"{where}.kind")
    if kind == "omni":
        _check_keys(obj, {"kind"}, where)
        return Omni()
    if kind == "sector":
        _check_keys(obj, {"kind", "azimuth_deg", "width_deg"}, where)
        return Sector(
            azimuth_deg=_number(_get(obj, "azimuth_deg", where), f"{where}.azimuth_deg"),
            width_deg=_number(_get(obj, "width_deg", where), f"{where}.width_deg"),
        )
    if kind == "beam":
        _check_keys(obj, {"kind", "partner_cell"}, where)
        return Beam(partner_cell=_cell(_get(obj, "partner_cell", where), f"{where}.partner_cell"))
    _fail("wrong-type", f"{where}.kind must be one of: omni, sector, beam")
    raise AssertionError("unreachable")


def _obstacle(value: Any, where: str) -> Obstacle:
    obj = _require_object(value, where)
    _check_keys(obj, {"id", "cells", "loss_per_cell_db", "material_label", "calibratable"}, where)
    cells = _require_array(_get(obj, "cells", where), f"{where}.cells")
    return Obstacle(
        id=_string(_get(obj, "id", where), f"{where}.id"),
        cells=frozenset(_cell(c, f"{where}.cells[{i}]") for i, c in enumerate(cells)),
        loss_per_cell_dB=_number(_get(obj, "loss_per_cell_db", where), f"{where}.loss_per_cell_db"),
        material_label=_string(obj.get("material_label", ""), f"{where}.material_label"),
        calibratable=_boolean(obj.get("calibratable", False), f"{where}.calibratable"),
    )


def _equipment(value: Any, where: str) -> EquipmentType:
    obj = _require_object(value, where)
    _check_keys(obj, {"id", "tx_power_dbm", "tx_gain_dbi", "cost", "pattern"}, where)
    return EquipmentType(
        id=_string(_get(obj, "id", where), f"{where}.id"),
        tx_power_dBm=_number(_get(obj, "tx_power_dbm", where), f"{where}.tx_power_dbm"),
        tx_gain_dBi=_number(_get(obj, "tx_gain_dbi", where), f"{where}.tx_gain_dbi"),
        cost=_number(_get(obj, "cost", where), f"{where}.cost"),
        pattern=_pattern(obj.get("pattern", {"kind": "omni"}), f"{where}.pattern"),
    )


def _site(value: Any, where: str) -> CandidateSite:
    obj = _require_object(value, where)
    _check_keys(
        obj, {"id", "cell", "infra_cost", "allowed_equipment", "existing_equipment"}, where
    )
    allowed_raw = obj.get("allowed_equipment")
    allowed: tuple[str, ...] | None
    if allowed_raw is None:
        allowed = None
    else:
        allowed = tuple(
            _string(e, f"{where}.allowed_equipment[{i}]")
            for i, e in enumerate(_require_array(allowed_raw, f"{where}.allowed_equipment"))
        )
    existing_raw = obj.get("existing_equipment")
    return CandidateSite(
        id=_string(_get(obj, "id", where), f"{where}.id"),
        cell=_cell(_get(obj, "cell", where), f"{where}.cell"),
        infra_cost=_number(obj.get("infra_cost", 0.0), f"{where}.infra_cost"),
        allowed_equipment=allowed,
        existing_equipment=None
        if existing_raw is None
        else _string(existing_raw, f"{where}.existing_equipment"),
    )


def _receiver(value: Any, where: str) -> ReceiverCell:
    obj = _require_object(value, where)
    _check_keys(
        obj,
        {
            "id",
            "cell",
            "weight",
            "min_bitrate_mbps",
            "noise_dbm",
            "rx_gain_dbi",
            "measured_power_dbm",
            "measured_from_site",
        },
        where,
    )
    measured_raw = obj.get("measured_power_dbm")
    from_raw = obj.get("measured_from_site")
    return ReceiverCell(
        id=_string(_get(obj, "id", where), f"{where}.id"),
        cell=_cell(_get(obj, "cell", where), f"{where}.cell"),
        weight=_number(obj.get("weight", 1.0), f"{where}.weight"),
        min_bitrate_mbps=_number(obj.get("min_bitrate_mbps", 0.0), f"{where}.min_bitrate_mbps"),
        noise_dBm=_number(obj.get("noise_dbm", -95.0), f"{where}.noise_dbm"),
        rx_gain_dBi=_number(obj.get("rx_gain_dbi", 0.0), f"{where}.rx_gain_dbi"),
        measured_power_dBm=None
        if measured_raw is None
        else _number(measured_raw, f"{where}.measured_power_dbm"),
        measured_from_site=None
        if from_raw is None
        else _string(from_raw, f"{where}.measured_from_site"),
    )


def _bitrate_table(value: Any, where: str) -> BitrateTable:
    rows = _require_array(value, where)
    steps = []
    for i, row in enumerate(rows):
        entry = _require_object(row, f"{where}[{i}]")
        _check_keys(entry, {"snr_threshold_db", "rate_mbps"}, f"{where}[{i}]")
        steps.append(
            (
                _number(_get(entry, "snr_threshold_db", f"{where}[{i}]"), f"{where}[{i}].snr_threshold_db"),
                _number(_get(entry, "rate_mbps", f"{where}[{i}]"), f"{where}[{i}].rate_mbps"),
            )
        )
    return BitrateTable(steps=tuple(steps))


def parse_scenario_file(data: bytes | str) -> ScenarioFile:
    """Parse and fully validate a scenario file.

    Raises ``MalformedSyntaxError`` for broken JSON,
    ``UnsupportedVersionError`` for a foreign format version and
    ``SchemaViolationError`` (carrying coded violations) for everything
    else, including semantic problems found by ``validate_scheme``.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8", errors="replace")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise MalformedSyntaxError(f"not valid JSON: {exc}") from exc

    doc = _require_object(doc, "scenario")
    _check_keys(doc, {"format_version", "annotations", "scheme"}, "scenario")
    version = _integer(_get(doc, "format_version", "scenario"), "scenario.format_version")
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(
            f"format_version {version} is not supported (expected {FORMAT_VERSION})"
        )

    annotations = _require_object(doc.get("annotations", {}), "scenario.annotations")
    scheme_obj = _require_object(_get(doc, "scheme", "scenario"), "scenario.scheme")
    _check_keys(
        scheme_obj,
        {
            "width_cells",
            "height_cells",
            "cell_size_m",
            "frequency_ghz",
            "bitrate_table",
            "obstacles",
            "equipment",
            "sites",
            "receivers",
        },
        "scenario.scheme",
    )

    scheme = GridScheme(
        width_cells=_integer(_get(scheme_obj, "width_cells", "scheme"), "scheme.width_cells"),
        height_cells=_integer(_get(scheme_obj, "height_cells", "scheme"), "scheme.height_cells"),
        cell_size_m=_number(_get(scheme_obj, "cell_size_m", "scheme"), "scheme.cell_size_m"),
        frequency_GHz=_number(scheme_obj.get("frequency_ghz", 2.44), "scheme.frequency_ghz"),
        obstacles=tuple(
            _obstacle(o, f"scheme.obstacles[{i}]")
            for i, o in enumerate(_require_array(scheme_obj.get("obstacles", []), "scheme.obstacles"))
        ),
        equipment=tuple(
            _equipment(e, f"scheme.equipment[{i}]")
            for i, e in enumerate(_require_array(scheme_obj.get("equipment", []), "scheme.equipment"))
        ),
        sites=tuple(
            _site(s, f"scheme.sites[{i}]")
            for i, s in enumerate(_require_array(scheme_obj.get("sites", []), "scheme.sites"))
        ),
        receivers=tuple(
            _receiver(r, f"scheme.receivers[{i}]")
            for i, r in enumerate(_require_array(scheme_obj.get("receivers", []), "scheme.receivers"))
        ),
        bitrate_table=_bitrate_table(scheme_obj["bitrate_table"], "scheme.bitrate_table")
        if "bitrate_table" in scheme_obj
        else GridScheme(1, 1, 1.0).bitrate_table,
    )

    violations = validate_scheme(scheme)
    if violations:
        raise SchemaViolationError(violations)
    return ScenarioFile(scheme=scheme, annotations=annotations, format_version=version)


def parse_scenario(data: bytes | str) -> GridScheme:
    """Parse a scenario file and return just the scheme."""
    return parse_scenario_file(data).scheme


def _cell_doc(cell: Cell) -> list[int]:
    return [cell.col, cell.row]


def _pattern_doc(pattern: Omni | Sector | Beam) -> dict:
    if isinstance(pattern, Omni):
        return {"kind": "omni"}
    if isinstance(pattern, Sector):
        return {
            "kind": "sector",
            "azimuth_deg": float(pattern.azimuth_deg),
            "width_deg": float(pattern.width_deg),
        }
    return {"kind": "beam", "partner_cell": _cell_doc(pattern.partner_cell)}


def serialize_scenario(scenario: ScenarioFile) -> bytes:
    """Canonical UTF-8 JSON bytes for a scenario.

    Canonical means: fixed key order, two-space indentation, obstacle
    cells sorted by (col, row), numeric fields always written as JSON
    floats where the schema calls for numbers, and a trailing newline.
    ``serialize_scenario(parse_scenario_file(b)) == b`` for any ``b``
    this function produced.
    """
    scheme = scenario.scheme
    doc = {
        "format_version": scenario.format_version,
        "annotations": scenario.annotations,
        "scheme": {
            "width_cells": scheme.width_cells,
            "height_cells": scheme.height_cells,
            "cell_size_m": float(scheme.cell_size_m),
            "frequency_ghz": float(scheme.frequency_GHz),
            "bitrate_table": [
                {"snr_threshold_db": float(t), "rate_mbps": float(r)}
                for t, r in scheme.bitrate_table.steps
            ],
            "obstacles": [
                {
                    "id": o.id,
                    "cells": [_cell_doc(c) for c in sorted(o.cells)],
                    "loss_per_cell_db": float(o.loss_per_cell_dB),
                    "material_label": o.material_label,
                    "calibratable": o.calibratable,
                }
                for o in scheme.obstacles
            ],
            "equipment": [
                {
                    "id": e.id,
                    "tx_power_dbm": float(e.tx_power_dBm),
                    "tx_gain_dbi": float(e.tx_gain_dBi),
                    "cost": float(e.cost),
                    "pattern": _pattern_doc(e.pattern),
                }
                for e in scheme.equipment
            ],
            "sites": [
                {
                    "id": s.id,
                    "cell": _cell_doc(s.cell),
                    "infra_cost": float(s.infra_cost),
                    "allowed_equipment": None
                    if s.allowed_equipment is None
                    else list(s.allowed_equipment),
                    "existing_equipment": s.existing_equipment,
                }
                for s in scheme.sites
            ],
            "receivers": [
                {
                    "id": r.id,
                    "cell": _cell_doc(r.cell),
                    "weight": float(r.weight),
                    "min_bitrate_mbps": float(r.min_bitrate_mbps),
                    "noise_dbm": float(r.noise_dBm),
                    "rx_gain_dbi": float(r.rx_gain_dBi),
                    "measured_power_dbm": None
                    if r.measured_power_dBm is None
                    else float(r.measured_power_dBm),
                    "measured_from_site": r.measured_from_site,
                }
                for r in scheme.receivers
            ],
        },
    }
    return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def write_atomic(path: Path, data: bytes) -> None:
    """Write a file so readers only ever see the old or the new version."""
    tmp = path.with_name(f"{path.name}.tmp-{os.getpid()}")
    tmp.write_bytes(data)
    os.replace(tmp, path)
