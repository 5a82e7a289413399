"""Key files: the JSON format both parties share.

Schema::

    {
      "mode": "parity" | "table" | "sum_prev",
      "t_prime": int,                        # sum_prev window, default 2
      "theta1": [4 reals], "theta2": [4 reals],
      "angle_unit": "rad" | "pi",            # default "rad"
      "vtable": "builtin-64" | [64 gate lists],
      "initial_op": int                      # default 0
    }

A gate list entry is ``{"control": i, "target": j}`` with 1-based qubit
labels; entries are listed in application order.  Angles flagged with
``"angle_unit": "pi"`` are stored as exact multiples of pi so shared
parameter sets survive serialization without drift.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import jsonschema

from qbc.cipher import (
    BLOCK_QUBITS,
    MODE_PARITY,
    MODE_SUM_PREV,
    MODE_TABLE,
    NUM_CODES,
    KeySchedule,
)
from qbc.simulator import (
    ControlledRotation,
    GateSequence,
    InvalidParameterError,
    RotationParams,
)

_GATE_ENTRY_SCHEMA = {
    "type": "object",
    "required": ["control", "target"],
    "properties": {
        "control": {"type": "integer", "minimum": 1, "maximum": BLOCK_QUBITS},
        "target": {"type": "integer", "minimum": 1, "maximum": BLOCK_QUBITS},
    },
    "additionalProperties": False,
}

_ANGLES_SCHEMA = {
    "type": "array",
    "items": {"type": "number"},
    "minItems": 4,
    "maxItems": 4,
}

KEY_SCHEMA = {
    "type": "object",
    "required": ["mode", "theta1", "theta2"],
    "properties": {
        "mode": {"enum": [MODE_PARITY, MODE_TABLE, MODE_SUM_PREV]},
        "t_prime": {"type": "integer", "minimum": 1},
        "theta1": _ANGLES_SCHEMA,
        "theta2": _ANGLES_SCHEMA,
        "angle_unit": {"enum": ["rad", "pi"]},
        "vtable": {
            "oneOf": [
                {"const": "builtin-64"},
                {
                    "type": "array",
                    "minItems": NUM_CODES,
                    "maxItems": NUM_CODES,
                    "items": {"type": "array", "items": _GATE_ENTRY_SCHEMA, "minItems": 1},
                },
            ]
        },
        "initial_op": {"type": "integer", "minimum": 0, "maximum": NUM_CODES - 1},
    },
    "additionalProperties": False,
}


def validate_key_dict(data: dict) -> None:
    jsonschema.validate(data, KEY_SCHEMA)


def _angles_to_params(values, unit: str) -> RotationParams:
    scale = math.pi if unit == "pi" else 1.0
    return RotationParams(*(scale * float(v) for v in values))


def _gate_list_to_sequence(
    entries, theta1: RotationParams, theta2: RotationParams
) -> GateSequence:
    gates = tuple(
        ControlledRotation(e["control"] - 1, e["target"] - 1, theta1, theta2)
        for e in entries
    )
    return GateSequence(gates, BLOCK_QUBITS)


def sequence_to_gate_entries(seq: GateSequence) -> list[dict]:
    """Export a controlled-rotation sequence as 1-based gate entries."""
    entries = []
    for gate in seq.gates:
        if not isinstance(gate, ControlledRotation):
            raise InvalidParameterError(
                "only controlled-rotation sequences can be exported to a key file"
            )
        entries.append({"control": gate.control + 1, "target": gate.target + 1})
    return entries


def schedule_from_dict(data: dict) -> KeySchedule:
    validate_key_dict(data)
    unit = data.get("angle_unit", "rad")
    theta1 = _angles_to_params(data["theta1"], unit)
    theta2 = _angles_to_params(data["theta2"], unit)
    vtable_spec = data.get("vtable", "builtin-64")
    vtable = None
    if vtable_spec != "builtin-64":
        vtable = tuple(
            _gate_list_to_sequence(entry, theta1, theta2) for entry in vtable_spec
        )
    return KeySchedule(
        mode=data["mode"],
        theta1=theta1,
        theta2=theta2,
        t_prime=data.get("t_prime", 2),
        initial_op=data.get("initial_op", 0),
        vtable=vtable,
    )


def key_dict(
    mode: str,
    theta1,
    theta2,
    *,
    t_prime: int = 2,
    initial_op: int = 0,
    angle_unit: str = "rad",
    vtable="builtin-64",
) -> dict:
    """Assemble and validate a key dictionary from raw angle values."""
    data = {
        "mode": mode,
        "t_prime": t_prime,
        "theta1": [float(v) for v in theta1],
        "theta2": [float(v) for v in theta2],
        "angle_unit": angle_unit,
        "vtable": vtable,
        "initial_op": initial_op,
    }
    validate_key_dict(data)
    return data


def save_key(path, data: dict) -> None:
    validate_key_dict(data)
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def load_key(path) -> KeySchedule:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return schedule_from_dict(data)


def load_key_dict(path) -> dict:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    validate_key_dict(data)
    return data


# Shared parameter presets (multiples of pi where exact).
FIG6_THETA1 = (0.0, 0.15, 0.72, 0.32)
FIG6_THETA2 = (0.0, 0.45, 0.17, 1.64)

SUPP_THETA1_RAD = (0.45 * math.pi, 4.04, 1.04, 0.92)
SUPP_THETA2_RAD = (0.0, 0.35, 0.55 * math.pi, 0.79)


def fig6_key_dict(mode: str = MODE_TABLE, *, t_prime: int = 2, initial_op: int = 0) -> dict:
    return key_dict(
        mode, FIG6_THETA1, FIG6_THETA2, t_prime=t_prime, initial_op=initial_op, angle_unit="pi"
    )


def supp_key_dict(mode: str = MODE_PARITY, *, t_prime: int = 2, initial_op: int = 0) -> dict:
    return key_dict(
        mode,
        SUPP_THETA1_RAD,
        SUPP_THETA2_RAD,
        t_prime=t_prime,
        initial_op=initial_op,
        angle_unit="rad",
    )
