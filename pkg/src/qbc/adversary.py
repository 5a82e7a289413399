"""Eavesdropper simulations and measurement-attack analysis.

Three attack surfaces are modeled:

- a full-power adversary who knows everything but the session start and
  decodes block by block with operations implied by her own guesses
  (:func:`simulate_eve_attack`),
- a measurement-only adversary restricted to fixed per-qubit bases, scored
  by the pair/triangle objectives and the match-rate study, and
- summary statistics over attack records: the average error rate and the
  probability of exceeding a fractional error threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from collections import Counter

import numpy as np
from scipy import optimize as _scipy_optimize

from qbc.cipher import (
    MODE_PARITY,
    NUM_CODES,
    BLOCK_QUBITS,
    KeySchedule,
    build_coherent_decoder,
    encode_block,
    encode_text,
    preprocess_text,
)
from qbc.simulator import (
    ControlledRotation,
    GateSequence,
    InvalidParameterError,
    NoiseModel,
    RotationParams,
    StateVector,
    apply_sequence,
    measure_single_qubit,
    measure_z_all,
    rotation_matrix,
)


@dataclass
class EveState:
    """The adversary's view inside one run: her initial operation draw and
    the history of her own decoded codes, which drives her later selections."""

    first_op: int
    guesses: list[int]


@dataclass(frozen=True)
class AttackRunRecord:
    """Error count of one simulated decoding run."""

    run: int
    errors: int


@dataclass(frozen=True)
class Histogram:
    """Error-count frequencies over a batch of runs."""

    counts: dict[int, int]
    total_runs: int

    @classmethod
    def from_records(cls, records) -> "Histogram":
        counter = Counter(record.errors for record in records)
        return cls(dict(counter), len(records))

    def rows(self) -> list[tuple[int, int]]:
        return sorted(self.counts.items())


def simulate_eve_attack(
    message,
    schedule: KeySchedule,
    runs: int,
    rng: np.random.Generator | None,
    *,
    run_seeds: list[int] | None = None,
    force_initial_op: int | None = None,
) -> tuple[list[AttackRunRecord], Histogram]:
    """Monte-Carlo the eavesdropper's block-by-block decoding.

    The adversary knows the schedule, operation set and parameters but not
    the session start: her first decoding operation is drawn uniformly from
    the operation set (or pinned via ``force_initial_op``), and every later
    one is selected by the schedule applied to her *own* decoded history.
    Each run gets an independent generator, either derived from ``rng`` or
    taken from ``run_seeds``, so runs can be reproduced and parallelized by
    index.

    ``message`` is either text or an iterable of codes.  Returns the
    per-run records and their histogram.
    """
    if runs <= 0:
        raise InvalidParameterError("number of runs must be positive")
    if isinstance(message, str):
        codes = encode_text(preprocess_text(message))
    else:
        codes = [int(c) for c in message]
    op_indices = [schedule.select_index(codes, k) for k in range(len(codes))]
    ciphertexts = [
        encode_block(codes[k], schedule.operation(op_indices[k]))
        for k in range(len(codes))
    ]
    dists = _OutcomeDistributions(schedule, ciphertexts)
    if run_seeds is not None:
        if len(run_seeds) != runs:
            raise InvalidParameterError("run_seeds must provide one seed per run")
        seeds = [int(s) for s in run_seeds]
    else:
        if rng is None:
            raise InvalidParameterError("either rng or run_seeds is required")
        seeds = [int(s) for s in rng.integers(0, 2**63 - 1, size=runs)]
    records = []
    for j in range(runs):
        run_rng = np.random.default_rng(seeds[j])
        guessed = _eve_run(codes, schedule, dists, run_rng, force_initial_op)
        errors = sum(1 for got, sent in zip(guessed, codes) if got != sent)
        records.append(AttackRunRecord(j, errors))
    return records, Histogram.from_records(records)


class _OutcomeDistributions:
    """Memoized Born distributions of decoding block k with operation e."""

    def __init__(self, schedule: KeySchedule, ciphertexts):
        self.schedule = schedule
        self.ciphertexts = ciphertexts
        self.cache: dict[tuple[int, int], np.ndarray] = {}

    def __call__(self, k: int, eve_index: int) -> np.ndarray:
        key = (k, eve_index)
        probs = self.cache.get(key)
        if probs is None:
            decoded = (
                self.schedule.operation_matrix(eve_index).conj().T
                @ self.ciphertexts[k].amplitudes
            )
            probs = np.abs(decoded) ** 2
            probs = probs / probs.sum()
            self.cache[key] = probs
        return probs


def _eve_run(
    codes,
    schedule: KeySchedule,
    dists: _OutcomeDistributions,
    rng: np.random.Generator,
    force_initial_op: int | None,
) -> list[int]:
    if force_initial_op is None:
        first_op = int(rng.integers(schedule.num_operations))
    else:
        first_op = force_initial_op
    eve = EveState(first_op, [])
    for k in range(len(codes)):
        eve_index = eve.first_op if k == 0 else schedule.select_index(eve.guesses, k)
        probs = dists(k, eve_index)
        eve.guesses.append(int(rng.choice(probs.size, p=probs)))
    return eve.guesses


def eve_single_run(
    message,
    schedule: KeySchedule,
    rng: np.random.Generator,
    *,
    force_initial_op: int | None = None,
) -> list[int]:
    """The adversary's per-block guesses for one run (diagnostic view)."""
    if isinstance(message, str):
        codes = encode_text(preprocess_text(message))
    else:
        codes = [int(c) for c in message]
    ciphertexts = [
        encode_block(codes[k], schedule.operation(schedule.select_index(codes, k)))
        for k in range(len(codes))
    ]
    return _eve_run(
        codes, schedule, _OutcomeDistributions(schedule, ciphertexts), rng, force_initial_op
    )


def error_rate(records, length: int) -> float:
    """Average per-block error rate over all runs."""
    records = list(records)
    if not records or length <= 0:
        raise InvalidParameterError("error_rate needs records and a positive length")
    return sum(r.errors for r in records) / (len(records) * length)


def p_exceed(records, x: float, length: int) -> float:
    """Fraction of runs with strictly more than ``x * length`` errors."""
    records = list(records)
    if not records or length <= 0:
        raise InvalidParameterError("p_exceed needs records and a positive length")
    if not 0.0 <= x <= 1.0:
        raise InvalidParameterError("threshold fraction x must lie in [0, 1]")
    return sum(1 for r in records if r.errors - x * length > 0) / len(records)


@dataclass(frozen=True)
class SweepRow:
    length: int
    avg_err_rate: float
    p_x: float
    x: float


def length_sweep(
    schedule: KeySchedule,
    lengths,
    x_values,
    runs: int,
    rng: np.random.Generator,
) -> list[SweepRow]:
    """Attack statistics over random messages of increasing length.

    For each length a fresh uniformly random message is drawn and attacked
    ``runs`` times; one row per (length, x) pair.
    """
    rows = []
    for length in lengths:
        message_seed, attack_seed = (int(s) for s in rng.integers(0, 2**63 - 1, size=2))
        codes = list(np.random.default_rng(message_seed).integers(NUM_CODES, size=length))
        records, _ = simulate_eve_attack(
            codes, schedule, runs, np.random.default_rng(attack_seed)
        )
        rate = error_rate(records, length)
        for x in x_values:
            rows.append(SweepRow(length, rate, p_exceed(records, x, length), float(x)))
    return rows


# --- measurement-only adversary ---------------------------------------------


def _require_basis(matrix: np.ndarray) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.shape != (2, 2) or not np.allclose(
        matrix.conj().T @ matrix, np.eye(2), atol=1e-10
    ):
        raise InvalidParameterError("measurement basis must be a 2x2 unitary")
    return matrix


def basis_matrix(alpha: float, beta: float) -> np.ndarray:
    """Single-qubit basis from polar/azimuthal angles; (0, 0) is the Z basis."""
    c = math.cos(alpha / 2)
    s = math.sin(alpha / 2)
    return np.array(
        [[c, -s * np.exp(-1j * beta)], [s * np.exp(1j * beta), c]], dtype=complex
    )


def _pair_unit_states(theta1: RotationParams, theta2: RotationParams) -> np.ndarray:
    """States of the minimal two-qubit loop for each 2-bit plaintext.

    psi[a, b, i, j] is the amplitude of |ij> after encoding plaintext (a, b):
    the first gate rotates qubit 2 by R(theta1)/R(theta2) for control a,
    the second rotates qubit 1 controlled on qubit 2's superposition.
    """
    rot = (rotation_matrix(theta1), rotation_matrix(theta2))
    psi = np.zeros((2, 2, 2, 2), dtype=complex)
    for a in range(2):
        for b in range(2):
            for j in range(2):
                psi[a, b, :, j] = rot[j][:, a] * rot[a][j, b]
    return psi


def pair_objective(
    theta1: RotationParams,
    theta2: RotationParams,
    m1: np.ndarray,
    m2: np.ndarray,
) -> float:
    """Score of per-qubit bases (M1, M2) against the two-qubit loop.

    For each 2-bit plaintext, the squared projection of its encoded state
    onto the matching measurement outcome, minus the squared projections of
    the three mismatched plaintexts onto that same outcome; summed over the
    four plaintexts.  Bounded above by 4.
    """
    m1 = _require_basis(m1)
    m2 = _require_basis(m2)
    psi = _pair_unit_states(theta1, theta2)
    # amp[a, b, x, y]: projection of plaintext (x, y)'s state onto the
    # outcome that reads back (a, b).
    amp = np.einsum("ia,jb,xyij->abxy", m1.conj(), m2.conj(), psi)
    total = 0.0
    for a in range(2):
        for b in range(2):
            match = abs(amp[a, b, a, b]) ** 2
            mismatch = sum(
                abs(amp[a, b, x, y]) ** 2
                for x in range(2)
                for y in range(2)
                if (x, y) != (a, b)
            )
            total += match - mismatch
    return float(total)


@dataclass(frozen=True)
class MeasurementOptimum:
    """Optimized per-qubit bases and the achieved objective value."""

    m1: np.ndarray
    m2: np.ndarray
    g: float
    angles1: tuple[float, float]
    angles2: tuple[float, float]


def _basis_grid(grid_size: int) -> tuple[np.ndarray, np.ndarray]:
    alphas = np.linspace(0.0, math.pi, grid_size)
    betas = np.linspace(0.0, 2 * math.pi, grid_size, endpoint=False)
    pairs = np.array([(a, b) for a in alphas for b in betas])
    c = np.cos(pairs[:, 0] / 2)
    s = np.sin(pairs[:, 0] / 2)
    phase = np.exp(1j * pairs[:, 1])
    mats = np.zeros((len(pairs), 2, 2), dtype=complex)
    mats[:, 0, 0] = c
    mats[:, 0, 1] = -s * phase.conj()
    mats[:, 1, 0] = s * phase
    mats[:, 1, 1] = c
    return pairs, mats


def optimize_measurements(
    theta1: RotationParams,
    theta2: RotationParams,
    grid_size: int = 32,
    refine: bool = True,
) -> MeasurementOptimum:
    """Maximize the pair objective over two per-qubit bases.

    A coarse ``grid_size x grid_size`` scan per basis (polar and azimuthal
    angles) picks a starting point; Nelder-Mead then refines it.  The grid
    contains the Z basis, so the result never scores below f(Z, Z).
    """
    psi = _pair_unit_states(theta1, theta2)
    angle_pairs, mats = _basis_grid(grid_size)
    # For unitary bases, summing |projection|^2 over all outcomes gives 1
    # per plaintext, so f reduces to twice the matching mass minus 4.
    half = np.einsum("gjy,xyij->gxyi", mats.conj(), psi)
    amp = np.einsum("hix,gxyi->hgxy", mats.conj(), half)
    f_grid = 2.0 * (np.abs(amp) ** 2).sum(axis=(2, 3)) - 4.0
    best_flat = int(np.argmax(f_grid))
    i1, i2 = divmod(best_flat, len(angle_pairs))
    x0 = np.concatenate([angle_pairs[i1], angle_pairs[i2]])

    def negated(angles: np.ndarray) -> float:
        return -pair_objective(
            theta1, theta2, basis_matrix(angles[0], angles[1]), basis_matrix(angles[2], angles[3])
        )

    best_angles = x0
    best_value = -negated(x0)
    if refine:
        result = _scipy_optimize.minimize(
            negated, x0, method="Nelder-Mead", options={"xatol": 1e-7, "fatol": 1e-10}
        )
        if -result.fun > best_value:
            best_value = -float(result.fun)
            best_angles = result.x
    return MeasurementOptimum(
        m1=basis_matrix(best_angles[0], best_angles[1]),
        m2=basis_matrix(best_angles[2], best_angles[3]),
        g=float(best_value),
        angles1=(float(best_angles[0]), float(best_angles[1])),
        angles2=(float(best_angles[2]), float(best_angles[3])),
    )


def _triangle_unit_states(theta1: RotationParams, theta2: RotationParams) -> np.ndarray:
    """Encoded states of the minimal three-qubit loop, indexed [a,b,c,i,j,k]."""
    unit = GateSequence(
        (
            ControlledRotation(0, 1, theta1, theta2),
            ControlledRotation(1, 2, theta1, theta2),
            ControlledRotation(2, 0, theta1, theta2),
        ),
        3,
    )
    out = np.zeros((8, 8), dtype=complex)
    for n in range(8):
        out[n] = apply_sequence(StateVector.basis(n, 3), unit).amplitudes
    return out.reshape(2, 2, 2, 2, 2, 2)


def triangle_objective(
    theta1: RotationParams,
    theta2: RotationParams,
    m1: np.ndarray,
    m2: np.ndarray,
    m3: np.ndarray,
) -> float:
    """Three-basis analogue of :func:`pair_objective` for the triangle loop."""
    mats = [_require_basis(m) for m in (m1, m2, m3)]
    psi = _triangle_unit_states(theta1, theta2)
    amp = np.einsum(
        "ia,jb,kc,abcijk->abc", mats[0].conj(), mats[1].conj(), mats[2].conj(), psi
    )
    # Same completeness reduction as the pair case: 2 * matching mass - 8.
    return float(2.0 * (np.abs(amp) ** 2).sum() - 8.0)


def optimize_triangle_measurements(
    theta1: RotationParams,
    theta2: RotationParams,
    grid_size: int = 8,
    refine: bool = True,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, float]:
    """Maximize the triangle objective over three per-qubit bases."""
    psi = _triangle_unit_states(theta1, theta2)
    angle_pairs, mats = _basis_grid(grid_size)
    x1 = np.einsum("gkc,abcijk->gabcij", mats.conj(), psi)
    x2 = np.einsum("hjb,gabcij->hgabci", mats.conj(), x1)
    amp = np.einsum("fia,hgabci->fhgabc", mats.conj(), x2)
    f_grid = 2.0 * (np.abs(amp) ** 2).sum(axis=(3, 4, 5)) - 8.0
    flat = int(np.argmax(f_grid))
    g = len(angle_pairs)
    i1, rem = divmod(flat, g * g)
    i2, i3 = divmod(rem, g)
    x0 = np.concatenate([angle_pairs[i1], angle_pairs[i2], angle_pairs[i3]])

    def negated(angles: np.ndarray) -> float:
        return -triangle_objective(
            theta1,
            theta2,
            basis_matrix(angles[0], angles[1]),
            basis_matrix(angles[2], angles[3]),
            basis_matrix(angles[4], angles[5]),
        )

    best_angles = x0
    best_value = -negated(x0)
    if refine:
        result = _scipy_optimize.minimize(
            negated, x0, method="Nelder-Mead", options={"xatol": 1e-6, "fatol": 1e-9, "maxiter": 4000}
        )
        if -result.fun > best_value:
            best_value = -float(result.fun)
            best_angles = result.x
    return (
        basis_matrix(best_angles[0], best_angles[1]),
        basis_matrix(best_angles[2], best_angles[3]),
        basis_matrix(best_angles[4], best_angles[5]),
        float(best_value),
    )


# --- match-rate study --------------------------------------------------------

STRATEGY_Z2 = "Z2"
STRATEGY_Z3 = "Z3"
STRATEGY_OP2 = "OP2"
STRATEGY_OP3 = "OP3"
STRATEGY_B1 = "B1"
STRATEGY_B2 = "B2"
ALL_STRATEGIES = (
    STRATEGY_Z2,
    STRATEGY_Z3,
    STRATEGY_OP2,
    STRATEGY_OP3,
    STRATEGY_B1,
    STRATEGY_B2,
)

_BOB_FIDELITY = {STRATEGY_B1: 0.995, STRATEGY_B2: 0.9}


@dataclass(frozen=True)
class MatchRateRow:
    strategy: str
    n_bits: int
    correct_rate: float


def _block_bits(code: int) -> list[int]:
    return [(code >> (BLOCK_QUBITS - 1 - i)) & 1 for i in range(BLOCK_QUBITS)]


def _first_wrong_bit(guess: int, truth: int, offset: int) -> int | None:
    """1-based global index of the first mismatched bit, or None."""
    diff = guess ^ truth
    if diff == 0:
        return None
    for i in range(BLOCK_QUBITS):
        if (diff >> (BLOCK_QUBITS - 1 - i)) & 1:
            return offset + i + 1
    return None


def _passive_trial(
    schedule: KeySchedule, blocks: int, bases, rng: np.random.Generator
) -> int | None:
    """First wrong bit for an adversary measuring every qubit directly."""
    history: list[int] = []
    for k in range(blocks):
        code = int(rng.integers(NUM_CODES))
        op = schedule.operation(schedule.select_index(history, k))
        history.append(code)
        state = encode_block(code, op)
        if bases is None:
            guess = measure_z_all(state, rng)
        else:
            guess = 0
            for q in range(BLOCK_QUBITS):
                bit, state = measure_single_qubit(state, q, bases[q], rng)
                guess = (guess << 1) | bit
        wrong = _first_wrong_bit(guess, code, k * BLOCK_QUBITS)
        if wrong is not None:
            return wrong
    return None


def _receiver_trial(
    schedule: KeySchedule,
    decoder: GateSequence,
    blocks: int,
    fidelity: float,
    rng: np.random.Generator,
) -> int | None:
    """First wrong bit for the intended receiver under gate noise.

    All operations (encoding and decoding gates) run at the given fidelity;
    the decoder's auxiliary qubit is set from the receiver's own previous
    q6 readout, so a noisy block can desynchronize later ones.
    """
    noise = NoiseModel(fidelity, rng) if fidelity < 1.0 else None
    history: list[int] = []
    aux = 0
    for k in range(blocks):
        code = int(rng.integers(NUM_CODES))
        op = schedule.operation(schedule.select_index(history, k))
        history.append(code)
        state = encode_block(code, op, noise).tensor(StateVector.basis(aux, 1))
        state = apply_sequence(state, decoder, noise)
        outcome = measure_z_all(state, rng)
        guess = outcome >> 1
        aux = guess & 1
        wrong = _first_wrong_bit(guess, code, k * BLOCK_QUBITS)
        if wrong is not None:
            return wrong
    return None


def match_rate_study(
    theta1: RotationParams,
    theta2: RotationParams,
    strategies,
    max_bits: int,
    trials: int,
    rng: np.random.Generator,
    *,
    pair_bases: tuple[np.ndarray, np.ndarray] | None = None,
    triangle_bases: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None,
) -> list[MatchRateRow]:
    """Correct rate R(n) per strategy: the probability that all of the
    first ``n`` transmitted bits are recovered.

    Transport uses the two-operation parity schedule on uniformly random
    blocks.  Z2/Z3 read every qubit in the computational basis; OP2/OP3 use
    bases optimized against the pair/triangle loop unit; B1/B2 are the
    receiver's steered decoder at fidelity 0.995 and 0.9.
    """
    strategies = list(strategies)
    for label in strategies:
        if label not in ALL_STRATEGIES:
            raise InvalidParameterError(f"unknown strategy {label!r}")
    if max_bits < 0 or trials <= 0:
        raise InvalidParameterError("max_bits must be >= 0 and trials positive")
    schedule = KeySchedule(MODE_PARITY, theta1, theta2)
    blocks = math.ceil(max_bits / BLOCK_QUBITS)
    per_qubit_bases: dict[str, list[np.ndarray] | None] = {
        STRATEGY_Z2: None,
        STRATEGY_Z3: None,
    }
    if STRATEGY_OP2 in strategies:
        if pair_bases is None:
            optimum = optimize_measurements(theta1, theta2)
            pair_bases = (optimum.m1, optimum.m2)
        per_qubit_bases[STRATEGY_OP2] = [pair_bases[0], pair_bases[1]] * 3
    if STRATEGY_OP3 in strategies:
        if triangle_bases is None:
            m1, m2, m3, _ = optimize_triangle_measurements(theta1, theta2)
            triangle_bases = (m1, m2, m3)
        per_qubit_bases[STRATEGY_OP3] = list(triangle_bases) * 2
    decoder = build_coherent_decoder(theta1, theta2)

    rows = []
    for label in strategies:
        seeds = [int(s) for s in rng.integers(0, 2**63 - 1, size=trials)]
        first_wrong = np.full(trials, np.inf)
        for t in range(trials):
            trial_rng = np.random.default_rng(seeds[t])
            if label in _BOB_FIDELITY:
                wrong = _receiver_trial(
                    schedule, decoder, blocks, _BOB_FIDELITY[label], trial_rng
                )
            else:
                wrong = _passive_trial(
                    schedule, blocks, per_qubit_bases[label], trial_rng
                )
            if wrong is not None:
                first_wrong[t] = wrong
        for n in range(max_bits + 1):
            rate = float(np.mean(first_wrong > n))
            rows.append(MatchRateRow(label, n, rate))
    return rows
