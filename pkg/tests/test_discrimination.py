import math

import numpy as np
import pytest

from qbc.cipher import pair_operation, triangle_operation
from qbc.discrimination import (
    GUESS_CIRCUIT1,
    GUESS_CIRCUIT2,
    GUESS_INCONCLUSIVE,
    DiscriminationInstance,
    basis_tag_operation,
    commutator_norm,
    copy_register_unitary,
    cross_validate,
    run_discrimination,
    success_lower_bound,
    success_probability,
)
from qbc.simulator import (
    BoundGate,
    GateSequence,
    InvalidParameterError,
    RotationParams,
    StateVector,
    apply_sequence,
    rotation_matrix,
)

from conftest import FIG6_THETA1, FIG6_THETA2
from oracles import dense_sequence, random_sequence

HALF_TURN = RotationParams(0, 0, math.pi / 2, 0)  # |<0|R|0>|^2 = 1/2


def identity_circuit(n):
    return GateSequence((), n)


def half_rotation_circuit(n, qubit=0):
    return GateSequence((BoundGate(qubit, rotation_matrix(HALF_TURN)),), n)


class TestCopyRegister:
    def test_zero_maps_to_zero(self):
        copy = copy_register_unitary(2)
        out = apply_sequence(StateVector.zero(4), copy)
        assert abs(out.amplitudes[0]) ** 2 == pytest.approx(1.0)

    def test_basis_state_is_copied(self):
        copy = copy_register_unitary(3)
        state = StateVector.basis(5, 3).tensor(StateVector.zero(3))
        out = apply_sequence(state, copy)
        assert abs(out.amplitudes[(5 << 3) | 5]) ** 2 == pytest.approx(1.0)

    def test_superposition_entangles_with_copy(self):
        copy = copy_register_unitary(2)
        amps = np.zeros(4, dtype=complex)
        amps[1] = amps[2] = 1 / math.sqrt(2)
        state = StateVector(amps, 2).tensor(StateVector.zero(2))
        out = apply_sequence(state, copy)
        expected = np.zeros(16, dtype=complex)
        expected[(1 << 2) | 1] = 1 / math.sqrt(2)
        expected[(2 << 2) | 2] = 1 / math.sqrt(2)
        oracle = dense_sequence(copy) @ state.amplitudes
        assert np.max(np.abs(out.amplitudes - expected)) < 1e-12
        assert np.max(np.abs(out.amplitudes - oracle)) < 1e-12


class TestTagOperations:
    def test_matches_projector_sum_oracle(self):
        # The tagging operation must equal sum_n P_{psi_n} (x) X^n placed on
        # the right auxiliary register, with identity on the other.
        n = 2
        rng = np.random.default_rng(0)
        u = random_sequence(rng, n, length=4)
        u_dense = dense_sequence(u)
        dim = 1 << n
        for register in (1, 2):
            tag = dense_sequence(basis_tag_operation(u, n, register))
            expected = np.zeros((dim**3, dim**3), dtype=complex)
            for idx in range(dim):
                column = u_dense[:, idx]
                projector = np.outer(column, column.conj())
                flip = np.eye(dim)[[i ^ idx for i in range(dim)]]
                if register == 1:
                    expected += np.kron(np.kron(projector, flip), np.eye(dim))
                else:
                    expected += np.kron(np.kron(projector, np.eye(dim)), flip)
            assert np.max(np.abs(tag - expected)) < 1e-10

    def test_tags_eigenstate_with_its_index(self):
        n = 2
        rng = np.random.default_rng(1)
        u = random_sequence(rng, n, length=4)
        m = 2
        encoded = apply_sequence(StateVector.basis(m, n), u)
        state = encoded.tensor(StateVector.zero(2 * n))
        out = apply_sequence(state, basis_tag_operation(u, n, 1))
        # register 2 now holds m; register 3 still 0
        marg = out.probabilities().reshape(1 << n, 1 << n, 1 << n).sum(axis=(0, 2))
        assert marg[m] == pytest.approx(1.0, abs=1e-10)

    def test_sequential_tags_reproduce_overlap_amplitudes(self):
        n = 2
        rng = np.random.default_rng(2)
        u1 = random_sequence(rng, n, length=4)
        u2 = random_sequence(rng, n, length=4)
        m = 1
        state = apply_sequence(StateVector.basis(m, n), u1).tensor(
            StateVector.zero(2 * n)
        )
        state = apply_sequence(state, basis_tag_operation(u1, n, 1))
        state = apply_sequence(state, basis_tag_operation(u2, n, 2))
        overlaps = dense_sequence(u2).conj().T @ dense_sequence(u1)
        dim = 1 << n
        tensor = state.amplitudes.reshape(dim, dim, dim)
        for l in range(dim):
            # component on |psi_{2,l}> (x) |m> (x) |l>
            psi2l = dense_sequence(u2)[:, l]
            amp = np.vdot(psi2l, tensor[:, m, l])
            assert amp == pytest.approx(overlaps[l, m], abs=1e-10)
        # nothing lives outside the |m> slice of register 2
        assert np.sum(np.abs(np.delete(tensor, m, axis=1)) ** 2) < 1e-18

    def test_identical_circuits_commute(self):
        n = 2
        rng = np.random.default_rng(3)
        u = random_sequence(rng, n, length=3)
        assert commutator_norm(u, u, n) < 1e-10

    def test_commutator_norm_reported_for_random_instances(self):
        rng = np.random.default_rng(4)
        norms = []
        for _ in range(5):
            u1 = random_sequence(rng, 2, length=3)
            u2 = random_sequence(rng, 2, length=3)
            norms.append(commutator_norm(u1, u2, 2))
        # reported, not asserted: generic instances need not commute
        print("\ncommutator norms |[S1,S2]|:", [round(v, 6) for v in norms])
        assert all(v >= 0 for v in norms)


class TestSuccessProbability:
    def test_identical_circuits_give_zero(self):
        u = triangle_operation(FIG6_THETA1, FIG6_THETA2)
        assert success_probability(u, u, 5) == pytest.approx(0.0, abs=1e-12)

    def test_identity_second_circuit_collapses_to_zero(self):
        # With the second circuit trivial, every tag outcome is penalized:
        # hand evaluation gives 1 - sum_l |<l|psi_{1,m}>|^2 = 0.
        rng = np.random.default_rng(5)
        u1 = random_sequence(rng, 2, length=4)
        for m in range(4):
            assert success_probability(u1, identity_circuit(2), m) == pytest.approx(
                0.0, abs=1e-12
            )

    def test_term_by_term_against_dense_oracle(self):
        rng = np.random.default_rng(6)
        u1 = random_sequence(rng, 2, length=4)
        u2 = random_sequence(rng, 2, length=4)
        overlaps = dense_sequence(u2).conj().T @ dense_sequence(u1)
        diag2 = np.diag(dense_sequence(u2))
        for m in range(4):
            expected = (
                1.0
                - abs(overlaps[m, m]) ** 2
                - sum(
                    abs(overlaps[l, m]) ** 2 * abs(diag2[l]) ** 2
                    for l in range(4)
                    if l != m
                )
            )
            assert success_probability(u1, u2, m) == pytest.approx(expected, abs=1e-12)

    def test_half_rotation_instance_value(self):
        assert success_probability(
            identity_circuit(2), half_rotation_circuit(2), 0
        ) == pytest.approx(0.25, abs=1e-12)

    def test_bounded_range(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            u1 = random_sequence(rng, 2, length=3)
            u2 = random_sequence(rng, 2, length=3)
            p = success_probability(u1, u2, int(rng.integers(4)))
            assert -1.0 - 1e-9 <= p <= 1.0 + 1e-9

    def test_six_qubit_loop_instances_regression(self):
        # Frozen from the overlap evaluation at the attack-simulation angles.
        tri = triangle_operation(FIG6_THETA1, FIG6_THETA2)
        bi = pair_operation(FIG6_THETA1, FIG6_THETA2)
        expected = {
            0: 0.9665965075887119,
            1: 0.9250066468614161,
            38: 0.9685297491168521,
            63: 0.5409649660226992,
        }
        for m, value in expected.items():
            assert success_probability(tri, bi, m) == pytest.approx(value, abs=1e-12)

    def test_lower_bound_is_the_printed_product(self):
        rng = np.random.default_rng(8)
        u1 = random_sequence(rng, 2, length=3)
        u2 = random_sequence(rng, 2, length=3)
        overlaps = dense_sequence(u2).conj().T @ dense_sequence(u1)
        diag2 = np.diag(dense_sequence(u2))
        for m in range(4):
            for l in range(4):
                expected = (1 - abs(overlaps[m, m]) ** 2) * (1 - abs(diag2[l]) ** 2)
                assert success_lower_bound(u1, u2, m, l) == pytest.approx(
                    expected, abs=1e-12
                )


class TestRunDiscrimination:
    def test_identical_circuits_always_inconclusive(self):
        u = half_rotation_circuit(2)
        instance = DiscriminationInstance(2, u, u, 1, true_label=1)
        rng = np.random.default_rng(0)
        for _ in range(50):
            outcome = run_discrimination(instance, rng)
            assert outcome.guess == GUESS_INCONCLUSIVE
            assert outcome.inconclusive

    def test_monte_carlo_matches_formula_on_half_rotation_instance(self):
        # Instance where the analytic expression and the procedure coincide.
        report = cross_validate(
            identity_circuit(2),
            half_rotation_circuit(2),
            0,
            trials=3000,
            rng=np.random.default_rng(9),
        )
        assert report["analytic_p"] == pytest.approx(0.25, abs=1e-12)
        assert not report["discrepant"]
        assert report["correct"] + report["incorrect"] + report["inconclusive"] == 3000

    def test_monte_carlo_matches_formula_on_lsb_instance(self):
        report = cross_validate(
            identity_circuit(2),
            half_rotation_circuit(2, qubit=1),
            2,
            trials=3000,
            rng=np.random.default_rng(10),
        )
        assert report["analytic_p"] == pytest.approx(0.25, abs=1e-12)
        assert not report["discrepant"]

    def test_outcomes_reproducible_under_seed(self):
        instance = DiscriminationInstance(
            2, identity_circuit(2), half_rotation_circuit(2), 0, true_label=1
        )
        a = [run_discrimination(instance, np.random.default_rng(3)).guess for _ in range(1)]
        b = [run_discrimination(instance, np.random.default_rng(3)).guess for _ in range(1)]
        assert a == b

    def test_true_label_two_runs(self):
        instance = DiscriminationInstance(
            2, identity_circuit(2), half_rotation_circuit(2), 0, true_label=2
        )
        rng = np.random.default_rng(11)
        guesses = {run_discrimination(instance, rng).guess for _ in range(200)}
        assert guesses <= {GUESS_CIRCUIT1, GUESS_CIRCUIT2, GUESS_INCONCLUSIVE}

    def test_invalid_instances_rejected(self):
        u = identity_circuit(2)
        with pytest.raises(InvalidParameterError):
            DiscriminationInstance(2, u, u, 4, true_label=1)
        with pytest.raises(InvalidParameterError):
            DiscriminationInstance(2, u, u, 0, true_label=3)
        with pytest.raises(InvalidParameterError):
            DiscriminationInstance(3, u, u, 0, true_label=1)
