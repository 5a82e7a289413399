"""Encoding-operation generators for registers of any size.

Two construction methods, both built from the same controlled-rotation
gate family:

- a single cyclic loop visiting every qubit in a chosen order, and
- a tensor product of independent pair/triplet loops over a partition
  of the register.

All qubit indices here are 0-based.
"""

from __future__ import annotations

from qbc.simulator import (
    ControlledRotation,
    GateSequence,
    InvalidParameterError,
    RotationParams,
)


def _cycle_gates(order, theta1: RotationParams, theta2: RotationParams):
    """Controlled rotations along order[0] -> order[1] -> ... -> order[0]."""
    n = len(order)
    return tuple(
        ControlledRotation(order[i], order[(i + 1) % n], theta1, theta2)
        for i in range(n)
    )


def loop_from_permutation(
    permutation, theta1: RotationParams, theta2: RotationParams
) -> GateSequence:
    """One control-gate loop covering all qubits in permutation order.

    The loop applies edges ``p[0]->p[1], ..., p[N-2]->p[N-1], p[N-1]->p[0]``
    in that circuit order.  The identity permutation on three qubits yields
    the triangle-loop block, on two the pair-loop block.
    """
    p = list(permutation)
    n = len(p)
    if n < 2:
        raise InvalidParameterError("a loop needs at least two qubits")
    if sorted(p) != list(range(n)):
        raise InvalidParameterError(f"{p!r} is not a permutation of 0..{n - 1}")
    return GateSequence(_cycle_gates(p, theta1, theta2), n)


def validate_partition(partition, num_qubits: int) -> list[tuple[int, ...]]:
    groups = [tuple(g) for g in partition]
    seen: set[int] = set()
    for group in groups:
        if len(group) not in (2, 3):
            raise InvalidParameterError(
                f"group {group!r} must have two or three qubits"
            )
        for q in group:
            if not 0 <= q < num_qubits:
                raise InvalidParameterError(f"qubit {q} outside register of size {num_qubits}")
            if q in seen:
                raise InvalidParameterError(f"qubit {q} appears in more than one group")
            seen.add(q)
    if len(seen) != num_qubits:
        missing = sorted(set(range(num_qubits)) - seen)
        raise InvalidParameterError(f"partition does not cover qubits {missing}")
    return groups


def partition_encoding(
    partition, num_qubits: int, theta1: RotationParams, theta2: RotationParams
) -> GateSequence:
    """Tensor product of pair and triplet loops over the given groups.

    Each group is traversed cyclically in the listed order, with the same
    edge orientation as :func:`loop_from_permutation`; on six qubits the
    pairs ``(0,1),(2,3),(4,5)`` therefore reproduce the pair-loop table
    entry gate for gate, and the triplets ``(0,1,2),(3,4,5)`` the
    triangle-loop operation.
    """
    groups = validate_partition(partition, num_qubits)
    gates: tuple[ControlledRotation, ...] = ()
    for group in groups:
        gates += _cycle_gates(group, theta1, theta2)
    return GateSequence(gates, num_qubits)


def default_partition(num_qubits: int) -> list[tuple[int, ...]]:
    """A canonical pair/triplet cover: pairs when N is even, else one
    triplet followed by pairs.  N must be 2, 3 or at least 4."""
    if num_qubits < 2:
        raise InvalidParameterError("no pair/triplet partition exists below two qubits")
    qubits = list(range(num_qubits))
    groups: list[tuple[int, ...]] = []
    if num_qubits % 2 == 1:
        groups.append(tuple(qubits[:3]))
        qubits = qubits[3:]
    groups.extend((qubits[i], qubits[i + 1]) for i in range(0, len(qubits), 2))
    return groups
