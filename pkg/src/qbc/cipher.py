"""Block codec, encoding-operation table, key schedules, and transport.

A message is a stream of 6-bit codes (64-symbol alphabet).  Each block is
carried by a 6-qubit state obtained by applying a keyed encoding operation
to the block's basis state; the operation used for block ``k`` is selected
from the previous plaintext blocks by the key schedule, so an eavesdropper
who misreads one block loses the selection for the next.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from qbc.simulator import (
    ControlledGate,
    ControlledRotation,
    GateSequence,
    InvalidParameterError,
    NoiseModel,
    RotationParams,
    StateVector,
    apply_sequence,
    measure_z_all,
)

NUM_CODES = 64
BLOCK_QUBITS = 6

SPACE_CODE = 0
MARK_CODE = 63
SENTENCE_MARKS = ",.:;!?"

MODE_PARITY = "parity"
MODE_TABLE = "table"
MODE_SUM_PREV = "sum_prev"

# Parity-mode operation indices: even previous code -> pair loops,
# odd previous code -> triangle loops.
PAIR_INDEX = 0
TRIANGLE_INDEX = 1


class UnmappableCharacterError(InvalidParameterError):
    """A character outside the 64-symbol alphabet, with its position."""

    def __init__(self, char: str, position: int):
        self.char = char
        self.position = position
        super().__init__(f"unmappable character {char!r} at position {position}")


class TransmissionFailureError(Exception):
    """Retransmission budget exhausted before all checks passed."""


def char_to_code(char: str) -> int:
    """Map one character to its 6-bit code; sentence marks collapse to 63."""
    if len(char) != 1:
        raise InvalidParameterError("char_to_code expects a single character")
    if char == " ":
        return SPACE_CODE
    if "A" <= char <= "Z":
        return 1 + ord(char) - ord("A")
    if "a" <= char <= "z":
        return 27 + ord(char) - ord("a")
    if "0" <= char <= "9":
        return 53 + ord(char) - ord("0")
    if char in SENTENCE_MARKS:
        return MARK_CODE
    raise UnmappableCharacterError(char, 0)


def code_to_char(code: int) -> str:
    """Canonical character for a code; 63 decodes as '.'."""
    if not 0 <= code < NUM_CODES:
        raise InvalidParameterError(f"code {code} outside 0..63")
    if code == SPACE_CODE:
        return " "
    if code <= 26:
        return chr(ord("A") + code - 1)
    if code <= 52:
        return chr(ord("a") + code - 27)
    if code <= 62:
        return chr(ord("0") + code - 53)
    return "."


def canonicalize_char(char: str) -> str:
    return code_to_char(char_to_code(char))


def preprocess_text(text: str) -> str:
    """Drop line breaks and tabs; everything else must be representable."""
    return text.replace("\r", "").replace("\n", "").replace("\t", "")


def encode_text(text: str) -> list[int]:
    codes = []
    for position, char in enumerate(text):
        try:
            codes.append(char_to_code(char))
        except UnmappableCharacterError:
            raise UnmappableCharacterError(char, position) from None
    return codes


def decode_codes(codes) -> str:
    return "".join(code_to_char(code) for code in codes)


def _u(control: int, target: int, theta1: RotationParams, theta2: RotationParams):
    """Controlled rotation from 1-based qubit labels."""
    return ControlledRotation(control - 1, target - 1, theta1, theta2)


def _loop_sequence(groups, theta1: RotationParams, theta2: RotationParams) -> GateSequence:
    # Groups hold (control, target) labels in matrix-product order; the
    # rightmost factor of each product is applied first.
    gates = tuple(
        _u(c, t, theta1, theta2) for group in groups for (c, t) in reversed(group)
    )
    return GateSequence(gates, BLOCK_QUBITS)


def triangle_operation(theta1: RotationParams, theta2: RotationParams) -> GateSequence:
    """Two triangle loops: q1->q2->q3->q1 and q4->q5->q6->q4."""
    return _loop_sequence(
        (((3, 1), (2, 3), (1, 2)), ((6, 4), (5, 6), (4, 5))), theta1, theta2
    )


def pair_operation(theta1: RotationParams, theta2: RotationParams) -> GateSequence:
    """Three pair loops: q1<->q2, q3<->q4, q5<->q6."""
    return _loop_sequence(
        (((2, 1), (1, 2)), ((4, 3), (3, 4)), ((6, 5), (5, 6))), theta1, theta2
    )


# The 64-entry encoding-operation table.  Each entry lists its tensor
# factors as printed, each factor a tuple of (control, target) 1-based
# labels in matrix-product order (rightmost gate acts first).
VTABLE_PRODUCTS: tuple[tuple[tuple[tuple[int, int], ...], ...], ...] = (
    (((1, 2), (2, 1)), ((3, 4), (4, 3)), ((5, 6), (6, 5))),            # 0
    (((1, 2), (2, 3), (3, 1)), ((4, 5), (5, 6), (6, 4))),              # 1
    (((1, 2), (2, 3), (3, 1)), ((4, 6), (6, 5), (5, 4))),              # 2
    (((1, 2), (2, 3), (3, 1)), ((5, 4), (4, 6), (6, 5))),              # 3
    (((1, 2), (2, 3), (3, 1)), ((5, 6), (6, 4), (4, 5))),              # 4
    (((1, 2), (2, 3), (3, 1)), ((6, 4), (4, 5), (5, 6))),              # 5
    (((1, 2), (2, 3), (3, 1)), ((6, 5), (5, 4), (4, 6))),              # 6
    (((1, 3), (3, 2), (2, 1)), ((4, 5), (5, 6), (6, 4))),              # 7
    (((1, 3), (3, 2), (2, 1)), ((4, 6), (6, 5), (5, 4))),              # 8
    (((1, 3), (3, 2), (2, 1)), ((5, 4), (4, 6), (6, 5))),              # 9
    (((1, 3), (3, 2), (2, 1)), ((5, 6), (6, 4), (4, 5))),              # 10
    (((1, 3), (3, 2), (2, 1)), ((6, 4), (4, 5), (5, 6))),              # 11
    (((1, 3), (3, 2), (2, 1)), ((6, 5), (5, 4), (4, 6))),              # 12
    (((2, 1), (1, 3), (3, 2)), ((4, 5), (5, 6), (6, 4))),              # 13
    (((2, 1), (1, 3), (3, 2)), ((4, 6), (6, 5), (5, 4))),              # 14
    (((2, 1), (1, 3), (3, 2)), ((5, 4), (4, 6), (6, 5))),              # 15
    (((2, 1), (1, 3), (3, 2)), ((5, 6), (6, 4), (4, 5))),              # 16
    (((2, 1), (1, 3), (3, 2)), ((6, 4), (4, 5), (5, 6))),              # 17
    (((2, 1), (1, 3), (3, 2)), ((6, 5), (5, 4), (4, 6))),              # 18
    (((2, 3), (3, 1), (1, 2)), ((4, 5), (5, 6), (6, 4))),              # 19
    (((2, 3), (3, 1), (1, 2)), ((4, 6), (6, 5), (5, 4))),              # 20
    (((2, 3), (3, 1), (1, 2)), ((5, 4), (4, 6), (6, 5))),              # 21
    (((2, 3), (3, 1), (1, 2)), ((5, 6), (6, 4), (4, 5))),              # 22
    (((2, 3), (3, 1), (1, 2)), ((6, 4), (4, 5), (5, 6))),              # 23
    (((2, 3), (3, 1), (1, 2)), ((6, 5), (5, 4), (4, 6))),              # 24
    (((3, 1), (1, 2), (2, 3)), ((4, 5), (5, 6), (6, 4))),              # 25
    (((3, 1), (1, 2), (2, 3)), ((4, 6), (6, 5), (5, 4))),              # 26
    (((1, 3), (3, 5), (5, 1)), ((2, 4), (4, 6), (6, 2))),              # 27
    (((1, 3), (3, 5), (5, 1)), ((2, 6), (6, 4), (4, 2))),              # 28
    (((1, 3), (3, 5), (5, 1)), ((4, 2), (2, 6), (6, 4))),              # 29
    (((1, 3), (3, 5), (5, 1)), ((4, 6), (6, 2), (2, 4))),              # 30
    (((1, 3), (3, 5), (5, 1)), ((6, 2), (2, 4), (4, 6))),              # 31
    (((1, 3), (3, 5), (5, 1)), ((6, 4), (4, 2), (2, 6))),              # 32
    (((1, 5), (5, 3), (3, 1)), ((2, 4), (4, 6), (6, 2))),              # 33
    (((1, 5), (5, 3), (3, 1)), ((2, 6), (6, 4), (4, 2))),              # 34
    (((1, 5), (5, 3), (3, 1)), ((4, 2), (2, 6), (6, 4))),              # 35
    (((1, 5), (5, 3), (3, 1)), ((4, 6), (6, 2), (2, 4))),              # 36
    (((1, 5), (5, 3), (3, 1)), ((6, 2), (2, 4), (4, 6))),              # 37
    (((1, 5), (5, 3), (3, 1)), ((6, 4), (4, 2), (2, 6))),              # 38
    (((3, 1), (1, 5), (5, 3)), ((2, 4), (4, 6), (6, 2))),              # 39
    (((3, 1), (1, 5), (5, 3)), ((2, 6), (6, 4), (4, 2))),              # 40
    (((3, 1), (1, 5), (5, 3)), ((4, 2), (2, 6), (6, 4))),              # 41
    (((3, 1), (1, 5), (5, 3)), ((4, 6), (6, 2), (2, 4))),              # 42
    (((3, 1), (1, 5), (5, 3)), ((6, 2), (2, 4), (4, 6))),              # 43
    (((3, 1), (1, 5), (5, 3)), ((6, 4), (4, 2), (2, 6))),              # 44
    (((3, 5), (5, 1), (1, 3)), ((2, 4), (4, 6), (6, 2))),              # 45
    (((3, 5), (5, 1), (1, 3)), ((2, 6), (6, 4), (4, 2))),              # 46
    (((3, 5), (5, 1), (1, 3)), ((4, 2), (2, 6), (6, 4))),              # 47
    (((3, 5), (5, 1), (1, 3)), ((4, 6), (6, 2), (2, 4))),              # 48
    (((3, 5), (5, 1), (1, 3)), ((6, 2), (2, 4), (4, 6))),              # 49
    (((3, 5), (5, 1), (1, 3)), ((6, 4), (4, 2), (2, 6))),              # 50
    (((5, 1), (1, 3), (3, 5)), ((2, 4), (4, 6), (6, 2))),              # 51
    (((5, 1), (1, 3), (3, 5)), ((2, 6), (6, 4), (4, 2))),              # 52
    (((5, 1), (1, 3), (3, 5)), ((4, 2), (2, 6), (6, 4))),              # 53
    (((5, 1), (1, 3), (3, 5)), ((4, 6), (6, 2), (2, 4))),              # 54
    (((5, 1), (1, 3), (3, 5)), ((6, 2), (2, 4), (4, 6))),              # 55
    (((5, 1), (1, 3), (3, 5)), ((6, 4), (4, 2), (2, 6))),              # 56
    (((5, 3), (3, 1), (1, 5)), ((2, 4), (4, 6), (6, 2))),              # 57
    (((5, 3), (3, 1), (1, 5)), ((2, 6), (6, 4), (4, 2))),              # 58
    (((5, 3), (3, 1), (1, 5)), ((4, 2), (2, 6), (6, 4))),              # 59
    (((5, 3), (3, 1), (1, 5)), ((4, 6), (6, 2), (2, 4))),              # 60
    (((5, 3), (3, 1), (1, 5)), ((6, 2), (2, 4), (4, 6))),              # 61
    (((5, 3), (3, 1), (1, 5)), ((6, 4), (4, 2), (2, 6))),              # 62
    (((2, 1), (1, 2)), ((4, 3), (3, 4)), ((6, 5), (5, 6))),            # 63
)


def build_vtable(theta1: RotationParams, theta2: RotationParams) -> tuple[GateSequence, ...]:
    """The 64 encoding operations indexed by the previous block's code."""
    return tuple(_loop_sequence(entry, theta1, theta2) for entry in VTABLE_PRODUCTS)


@dataclass(eq=False)
class KeySchedule:
    """Key material plus the rule selecting each block's encoding operation.

    Modes:
      ``parity``   -- two operations; odd previous code selects the triangle
                      loops, even selects the pair loops.
      ``table``    -- 64 operations; the previous code indexes the table.
      ``sum_prev`` -- the sum of the previous ``t_prime`` codes mod 64
                      indexes the table; missing history counts as 0.
    """

    mode: str
    theta1: RotationParams
    theta2: RotationParams
    t_prime: int = 2
    initial_op: int = 0
    vtable: tuple[GateSequence, ...] | None = None
    _inverses: dict = field(default_factory=dict, repr=False, init=False)
    _matrices: dict = field(default_factory=dict, repr=False, init=False)

    def __post_init__(self) -> None:
        if self.mode not in (MODE_PARITY, MODE_TABLE, MODE_SUM_PREV):
            raise InvalidParameterError(f"unknown schedule mode {self.mode!r}")
        if self.t_prime < 1:
            raise InvalidParameterError("t_prime must be a positive integer")
        if self.mode == MODE_PARITY:
            self._operations = (
                pair_operation(self.theta1, self.theta2),
                triangle_operation(self.theta1, self.theta2),
            )
        else:
            if self.vtable is None:
                self.vtable = build_vtable(self.theta1, self.theta2)
            if len(self.vtable) != NUM_CODES:
                raise InvalidParameterError("vtable must hold exactly 64 operations")
            for index, op in enumerate(self.vtable):
                if op.num_qubits != BLOCK_QUBITS:
                    raise InvalidParameterError(
                        f"vtable entry {index} acts on {op.num_qubits} qubits, expected {BLOCK_QUBITS}"
                    )
            self._operations = tuple(self.vtable)
        if not 0 <= self.initial_op < len(self._operations):
            raise InvalidParameterError(
                f"initial_op {self.initial_op} outside the operation set"
            )

    @property
    def num_operations(self) -> int:
        return len(self._operations)

    def operation(self, index: int) -> GateSequence:
        return self._operations[index]

    def inverse_operation(self, index: int) -> GateSequence:
        if index not in self._inverses:
            self._inverses[index] = self._operations[index].inverse()
        return self._inverses[index]

    def operation_matrix(self, index: int) -> np.ndarray:
        """Dense matrix of an operation, built once from the gate path."""
        if index not in self._matrices:
            op = self._operations[index]
            dim = 1 << op.num_qubits
            columns = [
                apply_sequence(StateVector.basis(i, op.num_qubits), op).amplitudes
                for i in range(dim)
            ]
            matrix = np.array(columns).T
            matrix.setflags(write=False)
            self._matrices[index] = matrix
        return self._matrices[index]

    def select_index(self, history, k: int) -> int:
        """Operation index for block ``k`` given the codes sent before it."""
        if k < 0:
            raise InvalidParameterError(f"invalid block index {k}")
        if len(history) < k:
            raise InvalidParameterError(
                f"history of length {len(history)} cannot reach block {k}"
            )
        if k == 0:
            return PAIR_INDEX if self.mode == MODE_PARITY else self.initial_op
        if self.mode == MODE_PARITY:
            return TRIANGLE_INDEX if history[k - 1] % 2 else PAIR_INDEX
        if self.mode == MODE_TABLE:
            return history[k - 1]
        return sum(history[max(0, k - self.t_prime):k]) % NUM_CODES


def select_encoding(schedule: KeySchedule, history, k: int) -> GateSequence:
    """The encoding operation for block ``k`` under ``schedule``."""
    return schedule.operation(schedule.select_index(history, k))


def encode_block(code: int, op: GateSequence, noise: NoiseModel | None = None) -> StateVector:
    """Encode a plaintext code: prepare its basis state, apply the operation."""
    return apply_sequence(StateVector.basis(code, op.num_qubits), op, noise)


def decode_block(
    state: StateVector,
    op: GateSequence,
    noise: NoiseModel | None = None,
    rng: np.random.Generator | None = None,
) -> int:
    """Invert the encoding operation and read the register out."""
    if rng is None:
        rng = np.random.default_rng(0)
    return measure_z_all(apply_sequence(state, op.inverse(), noise), rng)


AUX_QUBIT = 6


def build_coherent_decoder(theta1: RotationParams, theta2: RotationParams) -> GateSequence:
    """A 7-qubit decoder steered by an auxiliary qubit.

    With the auxiliary (qubit 6) in ``|0>`` the sequence applies the inverse
    pair loops, with ``|1>`` the inverse triangle loops, so a single circuit
    decodes both parity-mode branches.  The caller prepares the auxiliary in
    the basis state matching the previously measured q6 bit.
    """
    pair_inv = pair_operation(theta1, theta2).inverse()
    tri_inv = triangle_operation(theta1, theta2).inverse()
    gates = tuple(ControlledGate(AUX_QUBIT, 0, g) for g in pair_inv.gates) + tuple(
        ControlledGate(AUX_QUBIT, 1, g) for g in tri_inv.gates
    )
    return GateSequence(gates, BLOCK_QUBITS + 1)


@dataclass(frozen=True)
class FramedMessage:
    """A message with one check character inserted every ``period`` positions.

    The first check character is a blank space; check character ``k >= 2``
    (at 1-based position ``period*k``) repeats the framed character at
    position ``period*(k-1) - 1``, i.e. the last data character before the
    previous check.
    """

    original: str
    framed: str
    period: int = 10


def _aux_char(framed: list[str], period: int) -> str:
    k = len(framed) // period + 1
    if k == 1:
        return " "
    return framed[period * (k - 1) - 2]


def frame_message(text: str, period: int = 10) -> FramedMessage:
    """Insert check characters every ``period`` positions."""
    if period < 2:
        raise InvalidParameterError("frame period must be at least 2")
    encode_text(text)  # reject unmappable characters up front
    framed: list[str] = []
    for char in text:
        if len(framed) % period == period - 1:
            framed.append(_aux_char(framed, period))
        framed.append(char)
    if framed and len(framed) % period == period - 1:
        framed.append(_aux_char(framed, period))
    return FramedMessage(original=text, framed="".join(framed), period=period)


def verify_frame(text: str, period: int = 10) -> list[int]:
    """0-based positions of check characters that mismatch their reference."""
    if period < 2:
        raise InvalidParameterError("frame period must be at least 2")
    suspects = []
    k = 1
    while period * k - 1 < len(text):
        position = period * k - 1
        expected = " " if k == 1 else text[period * (k - 1) - 2]
        if text[position] != expected:
            suspects.append(position)
        k += 1
    return suspects


def strip_frame(text: str, period: int = 10) -> str:
    """Remove the check characters, recovering the original message."""
    return "".join(char for i, char in enumerate(text) if (i + 1) % period != 0)


@dataclass(frozen=True)
class BlockRecord:
    index: int
    code: int
    op_index: int
    outcome: int


@dataclass
class TransmitResult:
    blocks: list[BlockRecord]
    retransmissions: int
    sent_text: str
    decoded_text: str
    decoded_message: str
    mismatches: int


def transmit_message(
    text: str,
    schedule: KeySchedule,
    noise: NoiseModel | None = None,
    rng: np.random.Generator | None = None,
    *,
    use_frame: bool = True,
    period: int = 10,
    max_retransmissions: int = 100,
) -> TransmitResult:
    """Run a full sender/receiver session over every block of ``text``.

    With framing enabled the receiver validates each check character
    against his own decoded history; on mismatch the window since the last
    good checkpoint is retransmitted.  Raises
    :class:`TransmissionFailureError` once ``max_retransmissions`` is
    exhausted.  Noiseless sessions decode exactly and never retransmit.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    if noise is not None and noise.rng is None:
        noise = NoiseModel(noise.fidelity, rng)

    clean = preprocess_text(text)
    sent_text = frame_message(clean, period).framed if use_frame else clean
    codes = encode_text(sent_text)

    # The sender's operation selections depend only on the true plaintext,
    # so they are fixed across retransmissions.
    op_indices = [schedule.select_index(codes, k) for k in range(len(codes))]

    records: list[BlockRecord] = [None] * len(codes)  # type: ignore[list-item]
    receiver: list[int] = []
    retransmissions = 0
    window_start = 0
    pos = 0
    while pos < len(codes):
        op = schedule.operation(op_indices[pos])
        state = encode_block(codes[pos], op, noise)
        receiver_op = schedule.inverse_operation(schedule.select_index(receiver, pos))
        outcome = measure_z_all(apply_sequence(state, receiver_op, noise), rng)
        receiver.append(outcome)
        records[pos] = BlockRecord(pos, codes[pos], op_indices[pos], outcome)
        if use_frame and (pos + 1) % period == 0:
            k = (pos + 1) // period
            expected = SPACE_CODE if k == 1 else receiver[period * (k - 1) - 2]
            if receiver[pos] != expected:
                retransmissions += 1
                if retransmissions > max_retransmissions:
                    raise TransmissionFailureError(
                        f"gave up after {max_retransmissions} retransmissions"
                    )
                del receiver[window_start:]
                pos = window_start
                continue
            window_start = pos + 1
        pos += 1

    decoded_text = decode_codes(receiver)
    decoded_message = strip_frame(decoded_text, period) if use_frame else decoded_text
    mismatches = sum(1 for got, sent in zip(receiver, codes) if got != sent)
    return TransmitResult(
        blocks=records,
        retransmissions=retransmissions,
        sent_text=sent_text,
        decoded_text=decoded_text,
        decoded_message=decoded_message,
        mismatches=mismatches,
    )
