"""Dense state-vector simulation of small qubit registers.

Conventions used throughout the package:

- Qubit 0 is the *most significant* bit of a basis-state index.  For a
  6-qubit register the basis state ``|38>`` is ``0b100110``, i.e. qubit 0
  holds 1, qubits 1 and 2 hold 0, and so on.
- A single-qubit rotation is parameterized by four angles,
  ``R(t1, t2, t3, t4) = exp(-i*t1) * Rz(t2) @ Ry(t3) @ Rz(t4)``,
  with the half-angle conventions ``Rz(a) = diag(exp(-ia/2), exp(ia/2))``
  and ``Ry(a) = [[cos(a/2), -sin(a/2)], [sin(a/2), cos(a/2)]]``.
- A controlled rotation applies ``R(params0)`` to the target when the
  control qubit is ``|0>`` and ``R(params1)`` when it is ``|1>``.
- Gates in a :class:`GateSequence` are listed in application order, i.e.
  reading a circuit diagram left to right.  The dense matrix of a sequence
  is therefore the *reversed* product of the per-gate matrices.

Gate objects and sequences are immutable after construction and safe to
share between threads; a :class:`StateVector` must only be advanced by one
simulation thread at a time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class SimulationError(Exception):
    """Base class for simulator failures."""


class InvalidParameterError(SimulationError):
    """A numeric parameter is out of range or non-finite."""


class InvalidGateError(SimulationError):
    """A gate references qubits outside the register."""


class CorruptedStateError(SimulationError):
    """A state vector lost normalization beyond tolerance."""


PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)


@dataclass(frozen=True)
class RotationParams:
    """Four angles (radians) defining a single-qubit rotation."""

    theta1: float
    theta2: float
    theta3: float
    theta4: float

    def __post_init__(self) -> None:
        for value in self.as_tuple():
            if not math.isfinite(value):
                raise InvalidParameterError(f"non-finite rotation angle: {value!r}")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.theta1, self.theta2, self.theta3, self.theta4)

    def inverse(self) -> "RotationParams":
        """Parameters of the inverse rotation (the family is closed under inversion)."""
        return RotationParams(-self.theta1, -self.theta4, -self.theta3, -self.theta2)


IDENTITY_PARAMS = RotationParams(0.0, 0.0, 0.0, 0.0)
# R(pi/2, pi, pi, 0) works out to exactly the Pauli-X matrix, which lets
# bit flips stay inside the controlled-rotation gate family.
X_PARAMS = RotationParams(math.pi / 2, math.pi, math.pi, 0.0)


def rotation_matrix(params: RotationParams) -> np.ndarray:
    """Return the 2x2 unitary ``exp(-i*t1) * Rz(t2) @ Ry(t3) @ Rz(t4)``."""
    t1, t2, t3, t4 = params.as_tuple()
    c = math.cos(t3 / 2)
    s = math.sin(t3 / 2)
    phase = np.exp(-1j * t1)
    return phase * np.array(
        [
            [np.exp(-1j * (t2 + t4) / 2) * c, -np.exp(-1j * (t2 - t4) / 2) * s],
            [np.exp(1j * (t2 - t4) / 2) * s, np.exp(1j * (t2 + t4) / 2) * c],
        ],
        dtype=complex,
    )


@dataclass(frozen=True, eq=False)
class BoundGate:
    """A fixed 2x2 unitary attached to one qubit."""

    qubit: int
    matrix: np.ndarray

    def inverse(self) -> "BoundGate":
        return BoundGate(self.qubit, self.matrix.conj().T)

    @property
    def target(self) -> int:
        return self.qubit

    def qubits_and_matrix(self) -> tuple[tuple[int, ...], np.ndarray]:
        return (self.qubit,), self.matrix


@dataclass(frozen=True)
class ControlledRotation:
    """Two-qubit gate: rotate ``target`` by params0/params1 for control 0/1."""

    control: int
    target: int
    params0: RotationParams
    params1: RotationParams

    def __post_init__(self) -> None:
        if self.control == self.target:
            raise InvalidGateError("control and target must differ")

    def inverse(self) -> "ControlledRotation":
        return ControlledRotation(
            self.control, self.target, self.params0.inverse(), self.params1.inverse()
        )

    def qubits_and_matrix(self) -> tuple[tuple[int, ...], np.ndarray]:
        mat = np.zeros((4, 4), dtype=complex)
        mat[:2, :2] = rotation_matrix(self.params0)
        mat[2:, 2:] = rotation_matrix(self.params1)
        return (self.control, self.target), mat


@dataclass(frozen=True)
class ControlledGate:
    """Apply ``inner`` when ``control`` holds ``value``, identity otherwise."""

    control: int
    value: int
    inner: "BoundGate | ControlledRotation"

    def __post_init__(self) -> None:
        if self.value not in (0, 1):
            raise InvalidGateError("control value must be 0 or 1")
        if self.control in self.inner.qubits_and_matrix()[0]:
            raise InvalidGateError("control qubit overlaps the inner gate")

    def inverse(self) -> "ControlledGate":
        return ControlledGate(self.control, self.value, self.inner.inverse())

    @property
    def target(self) -> int:
        return self.inner.target

    def qubits_and_matrix(self) -> tuple[tuple[int, ...], np.ndarray]:
        inner_qubits, inner_mat = self.inner.qubits_and_matrix()
        dim = inner_mat.shape[0]
        mat = np.zeros((2 * dim, 2 * dim), dtype=complex)
        branch = slice(0, dim) if self.value == 0 else slice(dim, 2 * dim)
        other = slice(dim, 2 * dim) if self.value == 0 else slice(0, dim)
        mat[branch, branch] = inner_mat
        mat[other, other] = np.eye(dim)
        return (self.control, *inner_qubits), mat


Gate = BoundGate | ControlledRotation | ControlledGate


@dataclass(eq=False)
class GateSequence:
    """An ordered list of gates over a fixed-size register.

    Immutable by convention; ``_compiled`` memoizes the per-gate
    (qubits, matrix) pairs on first use.
    """

    gates: tuple[Gate, ...]
    num_qubits: int
    _compiled: list | None = field(default=None, repr=False, init=False)

    def __post_init__(self) -> None:
        self.gates = tuple(self.gates)
        for gate in self.gates:
            qubits = gate.qubits_and_matrix()[0]
            if any(q < 0 or q >= self.num_qubits for q in qubits):
                raise InvalidGateError(
                    f"gate on qubits {qubits} outside register of size {self.num_qubits}"
                )

    def __len__(self) -> int:
        return len(self.gates)

    def compiled(self) -> list:
        if self._compiled is None:
            self._compiled = [gate.qubits_and_matrix() for gate in self.gates]
        return self._compiled

    def inverse(self) -> "GateSequence":
        """The reverse-order sequence of per-gate inverses."""
        return GateSequence(tuple(g.inverse() for g in reversed(self.gates)), self.num_qubits)

    def then(self, other: "GateSequence") -> "GateSequence":
        if other.num_qubits != self.num_qubits:
            raise InvalidGateError("cannot chain sequences over different register sizes")
        return GateSequence(self.gates + other.gates, self.num_qubits)

    def embedded(self, total_qubits: int, offset: int = 0) -> "GateSequence":
        """The same gates shifted by ``offset`` inside a larger register."""
        if offset < 0 or offset + self.num_qubits > total_qubits:
            raise InvalidGateError("embedding does not fit the target register")
        return GateSequence(
            tuple(_shift_gate(g, offset) for g in self.gates), total_qubits
        )


def _shift_gate(gate: Gate, offset: int) -> Gate:
    if isinstance(gate, BoundGate):
        return BoundGate(gate.qubit + offset, gate.matrix)
    if isinstance(gate, ControlledRotation):
        return ControlledRotation(
            gate.control + offset, gate.target + offset, gate.params0, gate.params1
        )
    return ControlledGate(gate.control + offset, gate.value, _shift_gate(gate.inner, offset))


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized complex amplitudes over the computational basis."""

    amplitudes: np.ndarray
    num_qubits: int

    @classmethod
    def zero(cls, num_qubits: int) -> "StateVector":
        return cls.basis(0, num_qubits)

    @classmethod
    def basis(cls, index: int, num_qubits: int) -> "StateVector":
        dim = 1 << num_qubits
        if not 0 <= index < dim:
            raise InvalidParameterError(f"basis index {index} out of range for {num_qubits} qubits")
        amps = np.zeros(dim, dtype=complex)
        amps[index] = 1.0
        return cls(amps, num_qubits)

    @classmethod
    def from_amplitudes(cls, amplitudes: np.ndarray) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=complex)
        num_qubits = int(round(math.log2(amps.size)))
        if 1 << num_qubits != amps.size:
            raise InvalidParameterError("amplitude vector length must be a power of two")
        return cls(amps, num_qubits)

    def tensor(self, other: "StateVector") -> "StateVector":
        return StateVector(
            np.kron(self.amplitudes, other.amplitudes), self.num_qubits + other.num_qubits
        )

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass
class NoiseModel:
    """Per-gate disturbance model with a single fidelity knob.

    After each gate, with probability ``1 - fidelity`` a uniformly random
    Pauli (X, Y or Z) hits the gate's target qubit.  ``fidelity == 1``
    bypasses the channel entirely, consuming no random draws.
    """

    fidelity: float = 1.0
    rng: np.random.Generator | None = None

    def __post_init__(self) -> None:
        if not 0.0 < self.fidelity <= 1.0:
            raise InvalidParameterError(f"fidelity must be in (0, 1], got {self.fidelity}")


def _apply_matrix(
    amplitudes: np.ndarray, num_qubits: int, matrix: np.ndarray, qubits: tuple[int, ...]
) -> np.ndarray:
    """Apply a 2^k x 2^k matrix to the given qubits (first qubit = MSB of the block)."""
    k = len(qubits)
    rest = [ax for ax in range(num_qubits) if ax not in qubits]
    perm = list(qubits) + rest
    tensor = amplitudes.reshape((2,) * num_qubits).transpose(perm).reshape(1 << k, -1)
    tensor = matrix @ tensor
    inv = np.argsort(perm)
    return tensor.reshape((2,) * num_qubits).transpose(inv).reshape(-1)


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Apply one gate and return the new state."""
    qubits, matrix = gate.qubits_and_matrix()
    if any(q < 0 or q >= state.num_qubits for q in qubits):
        raise InvalidGateError(f"gate qubits {qubits} invalid for {state.num_qubits}-qubit state")
    return StateVector(
        _apply_matrix(state.amplitudes, state.num_qubits, matrix, qubits), state.num_qubits
    )


def apply_controlled_rotation(state: StateVector, gate: ControlledRotation) -> StateVector:
    """Apply a controlled rotation (norm is preserved exactly up to roundoff)."""
    return apply_gate(state, gate)


def apply_noise_channel(
    state: StateVector,
    qubit: int,
    noise: NoiseModel,
    rng: np.random.Generator | None = None,
) -> StateVector:
    """Leave the state intact with probability ``fidelity``, else hit ``qubit`` with a random Pauli."""
    if noise.fidelity >= 1.0:
        return state
    generator = rng if rng is not None else noise.rng
    if generator is None:
        raise InvalidParameterError("noise channel with fidelity < 1 requires an RNG")
    if generator.random() < noise.fidelity:
        return state
    pauli = _PAULIS[generator.integers(3)]
    return apply_gate(state, BoundGate(qubit, pauli))


def apply_sequence(
    state: StateVector, seq: GateSequence, noise: NoiseModel | None = None
) -> StateVector:
    """Apply a gate sequence in order; with noise, each gate is followed by the channel."""
    if seq.num_qubits != state.num_qubits:
        raise InvalidGateError(
            f"sequence over {seq.num_qubits} qubits applied to {state.num_qubits}-qubit state"
        )
    amps = state.amplitudes
    noisy = noise is not None and noise.fidelity < 1.0
    for gate, (qubits, matrix) in zip(seq.gates, seq.compiled()):
        amps = _apply_matrix(amps, state.num_qubits, matrix, qubits)
        if noisy:
            out = apply_noise_channel(
                StateVector(amps, state.num_qubits), gate.target, noise
            )
            amps = out.amplitudes
    return StateVector(amps, state.num_qubits)


def _check_normalized(state: StateVector) -> np.ndarray:
    probs = state.probabilities()
    total = float(probs.sum())
    if abs(total - 1.0) > 1e-6:
        raise CorruptedStateError(f"state norm^2 deviates from 1 by {abs(total - 1.0):.3e}")
    return probs / total


def measure_z_all(state: StateVector, rng: np.random.Generator) -> int:
    """Sample one Born-rule outcome over the full register."""
    probs = _check_normalized(state)
    return int(rng.choice(probs.size, p=probs))


def measure_register(
    state: StateVector, qubits: tuple[int, ...] | list[int], rng: np.random.Generator
) -> tuple[int, StateVector]:
    """Projectively measure a subset of qubits; returns (outcome, collapsed state).

    The outcome packs the measured qubits' bits in the order given, first
    qubit most significant.
    """
    probs = _check_normalized(state)
    n = state.num_qubits
    indices = np.arange(probs.size)
    packed = np.zeros(probs.size, dtype=np.int64)
    for position, q in enumerate(qubits):
        bit = (indices >> (n - 1 - q)) & 1
        packed |= bit << (len(qubits) - 1 - position)
    marginal = np.bincount(packed, weights=probs, minlength=1 << len(qubits))
    outcome = int(rng.choice(marginal.size, p=marginal))
    mask = packed == outcome
    collapsed = np.where(mask, state.amplitudes, 0.0)
    collapsed = collapsed / np.linalg.norm(collapsed)
    return outcome, StateVector(collapsed, n)


def measure_single_qubit(
    state: StateVector,
    qubit: int,
    basis: np.ndarray,
    rng: np.random.Generator,
) -> tuple[int, StateVector]:
    """Measure one qubit in the basis ``{M|0>, M|1>}``.

    Returns ``(0, state')`` when the state collapses onto ``M|0>`` and
    ``(1, state')`` for ``M|1>``.
    """
    if qubit < 0 or qubit >= state.num_qubits:
        raise InvalidGateError(f"qubit {qubit} invalid for {state.num_qubits}-qubit state")
    _require_unitary(basis)
    rotated = apply_gate(state, BoundGate(qubit, basis.conj().T))
    outcome, collapsed = measure_register(rotated, (qubit,), rng)
    return outcome, apply_gate(collapsed, BoundGate(qubit, basis))


def _require_unitary(matrix: np.ndarray, tol: float = 1e-10) -> None:
    matrix = np.asarray(matrix)
    if matrix.shape != (2, 2) or not np.allclose(
        matrix.conj().T @ matrix, np.eye(2), atol=tol
    ):
        raise InvalidParameterError("measurement basis must be a 2x2 unitary")
