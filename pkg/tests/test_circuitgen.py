import numpy as np
import pytest

from qbc.circuitgen import (
    default_partition,
    loop_from_permutation,
    partition_encoding,
    validate_partition,
)
from qbc.cipher import build_vtable, pair_operation, triangle_operation
from qbc.simulator import (
    GateSequence,
    InvalidParameterError,
    RotationParams,
    StateVector,
    apply_sequence,
)

from conftest import FIG6_THETA1, FIG6_THETA2
from oracles import dense_sequence, random_state

ZERO = RotationParams(0, 0, 0, 0)


def gate_labels(seq: GateSequence):
    return [(g.control, g.target) for g in seq.gates]


class TestLoopFromPermutation:
    def test_identity_three_qubits_is_triangle_block(self):
        loop = loop_from_permutation(range(3), FIG6_THETA1, FIG6_THETA2)
        assert gate_labels(loop) == [(0, 1), (1, 2), (2, 0)]
        triangle = triangle_operation(FIG6_THETA1, FIG6_THETA2)
        assert gate_labels(triangle)[:3] == gate_labels(loop)

    def test_identity_two_qubits_is_pair_block(self):
        loop = loop_from_permutation(range(2), FIG6_THETA1, FIG6_THETA2)
        assert gate_labels(loop) == [(0, 1), (1, 0)]
        pair = pair_operation(FIG6_THETA1, FIG6_THETA2)
        assert gate_labels(pair)[:2] == gate_labels(loop)

    def test_zero_angles_give_identity(self):
        loop = loop_from_permutation([3, 1, 0, 2], ZERO, ZERO)
        assert np.allclose(dense_sequence(loop), np.eye(16), atol=1e-12)

    def test_non_bijective_input_rejected(self):
        with pytest.raises(InvalidParameterError):
            loop_from_permutation([0, 0, 1], FIG6_THETA1, FIG6_THETA2)
        with pytest.raises(InvalidParameterError):
            loop_from_permutation([1], FIG6_THETA1, FIG6_THETA2)

    def test_permuted_loop_matches_dense_oracle(self):
        rng = np.random.default_rng(0)
        loop = loop_from_permutation([2, 0, 3, 1], FIG6_THETA1, FIG6_THETA2)
        amps = random_state(rng, 4)
        out = apply_sequence(StateVector(amps, 4), loop)
        assert np.max(np.abs(out.amplitudes - dense_sequence(loop) @ amps)) < 1e-10


class TestPartitionEncoding:
    def test_three_pairs_reproduce_table_entry_63(self):
        op = partition_encoding([(0, 1), (2, 3), (4, 5)], 6, FIG6_THETA1, FIG6_THETA2)
        table_63 = build_vtable(FIG6_THETA1, FIG6_THETA2)[63]
        assert gate_labels(op) == gate_labels(table_63)

    def test_two_triplets_reproduce_triangle_operation(self):
        op = partition_encoding([(0, 1, 2), (3, 4, 5)], 6, FIG6_THETA1, FIG6_THETA2)
        assert gate_labels(op) == gate_labels(triangle_operation(FIG6_THETA1, FIG6_THETA2))

    def test_mixed_partition_matches_kronecker_blocks(self):
        # Pair on (0,1), triplet on (2,3,4): dense matrix must factor as a
        # Kronecker product of the group blocks.
        op = partition_encoding([(0, 1), (2, 3, 4)], 5, FIG6_THETA1, FIG6_THETA2)
        pair_block = dense_sequence(
            loop_from_permutation(range(2), FIG6_THETA1, FIG6_THETA2)
        )
        triple_block = dense_sequence(
            loop_from_permutation(range(3), FIG6_THETA1, FIG6_THETA2)
        )
        assert np.max(
            np.abs(dense_sequence(op) - np.kron(pair_block, triple_block))
        ) < 1e-10

    def test_invalid_partitions_rejected(self):
        with pytest.raises(InvalidParameterError):
            partition_encoding([(0, 1, 2, 3)], 4, FIG6_THETA1, FIG6_THETA2)
        with pytest.raises(InvalidParameterError):
            partition_encoding([(0, 1), (1, 2)], 4, FIG6_THETA1, FIG6_THETA2)
        with pytest.raises(InvalidParameterError):
            partition_encoding([(0, 1)], 4, FIG6_THETA1, FIG6_THETA2)
        with pytest.raises(InvalidParameterError):
            partition_encoding([(0, 1), (2, 7)], 4, FIG6_THETA1, FIG6_THETA2)

    def test_default_partition_shapes(self):
        assert default_partition(6) == [(0, 1), (2, 3), (4, 5)]
        assert default_partition(5) == [(0, 1, 2), (3, 4)]
        assert default_partition(3) == [(0, 1, 2)]
        assert validate_partition(default_partition(9), 9)
        with pytest.raises(InvalidParameterError):
            default_partition(1)


class TestGeneratedProperties:
    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_generated_sequences_are_unitary(self, n):
        rng = np.random.default_rng(n)
        perm = rng.permutation(n)
        loop = loop_from_permutation([int(q) for q in perm], FIG6_THETA1, FIG6_THETA2)
        amps = random_state(rng, n)
        forward = apply_sequence(StateVector(amps, n), loop)
        assert abs(forward.norm() - 1.0) < 1e-10
        back = apply_sequence(forward, loop.inverse())
        assert np.max(np.abs(back.amplitudes - amps)) < 1e-10

    def test_single_bit_flip_diffuses_to_other_qubits(self):
        # With nontrivial rotations, flipping one input bit must change some
        # other qubit's outcome marginal.
        op = partition_encoding([(0, 1), (2, 3)], 4, FIG6_THETA1, FIG6_THETA2)
        base = apply_sequence(StateVector.basis(0b0000, 4), op)
        flipped = apply_sequence(StateVector.basis(0b1000, 4), op)

        def marginal(state, qubit):
            probs = state.probabilities().reshape((2,) * 4)
            axes = tuple(ax for ax in range(4) if ax != qubit)
            return probs.sum(axis=axes)

        changed = [
            q for q in range(1, 4)
            if not np.allclose(marginal(base, q), marginal(flipped, q), atol=1e-12)
        ]
        assert changed, "bit flip stayed confined to its own qubit"
