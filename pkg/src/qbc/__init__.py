"""Chained-block quantum cipher: simulation core, codec, schedules, adversaries."""

from qbc.simulator import (
    BoundGate,
    ControlledGate,
    ControlledRotation,
    GateSequence,
    NoiseModel,
    RotationParams,
    StateVector,
    apply_controlled_rotation,
    apply_gate,
    apply_noise_channel,
    apply_sequence,
    measure_register,
    measure_single_qubit,
    measure_z_all,
    rotation_matrix,
)

__all__ = [
    "BoundGate",
    "ControlledGate",
    "ControlledRotation",
    "GateSequence",
    "NoiseModel",
    "RotationParams",
    "StateVector",
    "apply_controlled_rotation",
    "apply_gate",
    "apply_noise_channel",
    "apply_sequence",
    "measure_register",
    "measure_single_qubit",
    "measure_z_all",
    "rotation_matrix",
]

__version__ = "0.1.0"
