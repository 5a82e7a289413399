"""Identifying which of two known circuits encoded a given state.

The procedure uses a register three times the size of the input: the
encoded state sits in register 1 and two auxiliary registers receive, via
controlled tagging operations, the input's index in each candidate
circuit's encoded basis.  Equal tags are inconclusive; unequal tags are
resolved by undoing the first circuit and reading register 1 out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from qbc.simulator import (
    ControlledRotation,
    GateSequence,
    IDENTITY_PARAMS,
    InvalidParameterError,
    StateVector,
    X_PARAMS,
    apply_sequence,
    measure_register,
    measure_z_all,
)

GUESS_CIRCUIT1 = "circuit1"
GUESS_CIRCUIT2 = "circuit2"
GUESS_INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class DiscriminationInstance:
    num_qubits: int
    u1: GateSequence
    u2: GateSequence
    input_index: int
    true_label: int

    def __post_init__(self) -> None:
        if not 1 <= self.num_qubits <= 6:
            # the procedure works on 3N qubits; 6 keeps runs desk-scale
            raise InvalidParameterError("discrimination is limited to registers of 1..6 qubits")
        if self.u1.num_qubits != self.num_qubits or self.u2.num_qubits != self.num_qubits:
            raise InvalidParameterError("candidate circuits must act on the input register")
        if not 0 <= self.input_index < (1 << self.num_qubits):
            raise InvalidParameterError("input index outside the register's basis")
        if self.true_label not in (1, 2):
            raise InvalidParameterError("true_label must be 1 or 2")


@dataclass(frozen=True)
class DiscriminationOutcome:
    guess: str
    tag_index: int
    inconclusive: bool


def copy_register_unitary(num_qubits: int) -> GateSequence:
    """Basis copy |n>|m> -> |n>|m XOR n> over two same-size registers."""
    gates = tuple(
        ControlledRotation(i, num_qubits + i, IDENTITY_PARAMS, X_PARAMS)
        for i in range(num_qubits)
    )
    return GateSequence(gates, 2 * num_qubits)


def basis_tag_operation(
    circuit: GateSequence, num_qubits: int, aux_register: int
) -> GateSequence:
    """Controlled tag of register 1's index in ``circuit``'s encoded basis.

    Realized by undoing ``circuit`` on register 1, copying register 1 into
    auxiliary register 1 or 2, and re-applying ``circuit``; the whole acts
    on ``3 * num_qubits`` qubits.
    """
    if aux_register not in (1, 2):
        raise InvalidParameterError("aux_register must be 1 or 2")
    total = 3 * num_qubits
    offset = aux_register * num_qubits
    copy_gates = tuple(
        ControlledRotation(i, offset + i, IDENTITY_PARAMS, X_PARAMS)
        for i in range(num_qubits)
    )
    gates = (
        circuit.inverse().embedded(total).gates
        + copy_gates
        + circuit.embedded(total).gates
    )
    return GateSequence(gates, total)


def run_discrimination(
    instance: DiscriminationInstance, rng: np.random.Generator
) -> DiscriminationOutcome:
    """One shot of the identification procedure.

    Both auxiliary registers are tagged and measured; equal tags abort as
    inconclusive.  Otherwise the first circuit is undone on register 1 and
    the readout is compared against the register-3 tag ``l``: a match is
    called circuit 1, anything else circuit 2.
    """
    n = instance.num_qubits
    encoder = instance.u1 if instance.true_label == 1 else instance.u2
    reg1 = apply_sequence(StateVector.basis(instance.input_index, n), encoder)
    state = reg1.tensor(StateVector.zero(2 * n))
    state = apply_sequence(state, basis_tag_operation(instance.u1, n, 1))
    state = apply_sequence(state, basis_tag_operation(instance.u2, n, 2))
    tags, state = measure_register(state, tuple(range(n, 3 * n)), rng)
    tag_a, tag_b = tags >> n, tags & ((1 << n) - 1)
    if tag_a == tag_b:
        return DiscriminationOutcome(GUESS_INCONCLUSIVE, tag_b, True)
    state = apply_sequence(state, instance.u1.inverse().embedded(3 * n))
    readout, _ = measure_register(state, tuple(range(n)), rng)
    guess = GUESS_CIRCUIT1 if readout == tag_b else GUESS_CIRCUIT2
    return DiscriminationOutcome(guess, tag_b, False)


def _encoded_overlaps(u1: GateSequence, u2: GateSequence, m: int) -> np.ndarray:
    """overlaps[l] = <psi_{2,l} | psi_{1,m}> for every basis index l."""
    state = apply_sequence(StateVector.basis(m, u1.num_qubits), u1)
    return apply_sequence(state, u2.inverse()).amplitudes


def _encoded_diagonal(u2: GateSequence) -> np.ndarray:
    """diag[l] = <l | psi_{2,l}>."""
    dim = 1 << u2.num_qubits
    return np.array(
        [
            apply_sequence(StateVector.basis(l, u2.num_qubits), u2).amplitudes[l]
            for l in range(dim)
        ]
    )


def success_probability(u1: GateSequence, u2: GateSequence, m: int) -> float:
    """Analytic single-shot identification probability for circuit-1 inputs.

    Evaluates ``1 - |<psi_{2,m}|psi_{1,m}>|^2 -
    sum_{l != m} |<psi_{2,l}|psi_{1,m}>|^2 |<psi_{2,l}|l>|^2``.
    """
    overlaps = np.abs(_encoded_overlaps(u1, u2, m)) ** 2
    diag = np.abs(_encoded_diagonal(u2)) ** 2
    loss = overlaps[m] + sum(
        overlaps[l] * diag[l] for l in range(overlaps.size) if l != m
    )
    return float(1.0 - loss)


def success_lower_bound(u1: GateSequence, u2: GateSequence, m: int, l: int) -> float:
    """The product bound ``[1 - |<psi_{2,m}|psi_{1,m}>|^2][1 - |<psi_{2,l}|l>|^2]``."""
    overlaps = np.abs(_encoded_overlaps(u1, u2, m)) ** 2
    diag = np.abs(_encoded_diagonal(u2)) ** 2
    return float((1.0 - overlaps[m]) * (1.0 - diag[l]))


def _sequence_matrix(seq: GateSequence) -> np.ndarray:
    dim = 1 << seq.num_qubits
    columns = [
        apply_sequence(StateVector.basis(i, seq.num_qubits), seq).amplitudes
        for i in range(dim)
    ]
    return np.array(columns).T


def commutator_norm(u1: GateSequence, u2: GateSequence, num_qubits: int) -> float:
    """Spectral norm of [S1, S2], reported rather than asserted.

    Kept to small registers: the tagging operations act on 3N qubits.
    """
    if num_qubits > 3:
        raise InvalidParameterError("commutator norm is only computed for N <= 3")
    s1 = _sequence_matrix(basis_tag_operation(u1, num_qubits, 1))
    s2 = _sequence_matrix(basis_tag_operation(u2, num_qubits, 2))
    return float(np.linalg.norm(s1 @ s2 - s2 @ s1, 2))


def cross_validate(
    u1: GateSequence,
    u2: GateSequence,
    m: int,
    trials: int,
    rng: np.random.Generator,
    sigma_limit: float = 5.0,
) -> dict:
    """Monte-Carlo the procedure against the analytic probability.

    Counts conclusive correct/incorrect guesses and inconclusive shots
    (inconclusive shots stay in the denominator), and flags the instance
    when the empirical rate strays beyond ``sigma_limit`` binomial sigmas
    from the formula.
    """
    if trials <= 0:
        raise InvalidParameterError("trials must be positive")
    n = u1.num_qubits
    instance = DiscriminationInstance(n, u1, u2, m, true_label=1)
    correct = incorrect = inconclusive = 0
    for _ in range(trials):
        outcome = run_discrimination(instance, rng)
        if outcome.inconclusive:
            inconclusive += 1
        elif outcome.guess == GUESS_CIRCUIT1:
            correct += 1
        else:
            incorrect += 1
    analytic = success_probability(u1, u2, m)
    empirical = correct / trials
    sigma = max(math.sqrt(abs(analytic) * max(1.0 - analytic, 0.0) / trials), 1.0 / trials)
    deviation = abs(empirical - analytic) / sigma
    return {
        "m": m,
        "true_label": 1,
        "trials": trials,
        "correct": correct,
        "incorrect": incorrect,
        "inconclusive": inconclusive,
        "analytic_p": analytic,
        "empirical_p": empirical,
        "deviation_sigmas": deviation,
        "discrepant": deviation > sigma_limit,
    }
