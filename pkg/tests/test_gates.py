import numpy as np
import pytest

from helpers import omega
from qudit_qnc.core import UnitaryMatrix, basis_state
from qudit_qnc.errors import InvalidArgumentError, UnsupportedDimensionError
from qudit_qnc.gates import (
    GateId,
    TGateSpec,
    bell_state,
    cx,
    gadget_compatible_t,
    gate_matrix,
    hadamard,
    identity,
    pauli_x,
    pauli_y,
    pauli_z,
    phase_s,
    t_gate,
    u_gate,
    xz,
)


def _mp(m, k):
    return np.linalg.matrix_power(m, k)


def _is_unitary(m):
    return np.allclose(m.conj().T @ m, np.eye(m.shape[0]), atol=1e-9)


class TestPaulis:
    def test_bit_flip(self):
        assert np.allclose(pauli_x(2).matrix, [[0, 1], [1, 0]])

    @pytest.mark.parametrize("d", [2, 3, 5])
    def test_order_d(self, d):
        for g in (pauli_x, pauli_y, pauli_z):
            assert np.allclose(_mp(g(d).matrix, d), np.eye(d), atol=1e-9)

    @pytest.mark.parametrize("d", [2, 3, 4, 5, 7])
    def test_y_is_phased_xz(self, d):
        tau = np.exp(1j * np.pi / d)
        assert np.allclose(pauli_y(d).matrix, -(tau**-1) * pauli_x(d).matrix @ pauli_z(d).matrix, atol=1e-12)

    @pytest.mark.parametrize("d", [2, 3, 5])
    def test_weyl_commutation(self, d):
        x, z = pauli_x(d).matrix, pauli_z(d).matrix
        assert np.allclose(z @ x, omega(d) * x @ z, atol=1e-9)

    def test_shift_and_clock_action(self):
        d = 5
        for j in range(d):
            assert np.allclose(pauli_x(d).matrix @ basis_state(d, j).amplitudes, basis_state(d, (j + 1) % d).amplitudes)
            assert np.allclose(pauli_z(d).matrix @ basis_state(d, j).amplitudes, omega(d) ** j * basis_state(d, j).amplitudes)


class TestCliffords:
    def test_hadamard_qubit(self):
        assert np.allclose(hadamard(2).matrix, np.array([[1, 1], [1, -1]]) / np.sqrt(2))

    @pytest.mark.parametrize("d", [2, 3, 5, 7])
    def test_hadamard_unitary(self, d):
        h = hadamard(d).matrix
        assert np.allclose(h @ h.conj().T, np.eye(d))

    @pytest.mark.parametrize("d", [2, 3, 4, 5])
    def test_hadamard_on_zero(self, d):
        assert np.allclose(hadamard(d).matrix[:, 0], np.ones(d) / np.sqrt(d))

    def test_phase_qubit(self):
        s = phase_s(2).matrix
        assert np.allclose(s, np.diag([1, 1j]))
        x, z = pauli_x(2).matrix, pauli_z(2).matrix
        lhs = s @ x @ s.conj().T
        ratio = lhs[np.nonzero(lhs)] / (x @ z)[np.nonzero(lhs)]
        assert np.allclose(ratio, ratio[0])

    @pytest.mark.parametrize("d", [3, 4, 5])
    def test_phase_entries(self, d):
        tau = np.exp(1j * np.pi / d)
        want = [tau ** ((j - d + 2) * j) for j in range(d)]
        assert np.allclose(np.diag(phase_s(d).matrix), want)


class TestT:
    def test_zero_is_identity(self):
        assert np.allclose(t_gate(TGateSpec(5, (0,) * 5)).matrix, np.eye(5))

    def test_ramp_is_z(self):
        assert np.allclose(t_gate(TGateSpec(5, (0, 1, 2, 3, 4))).matrix, pauli_z(5).matrix)

    def test_constant_is_global_phase(self):
        assert np.allclose(t_gate(TGateSpec(5, (1,) * 5)).matrix, omega(5) * np.eye(5))

    @pytest.mark.parametrize("d", [2, 3])
    def test_small_d_rejected(self, d):
        with pytest.raises(UnsupportedDimensionError):
            t_gate(TGateSpec(d, (0,) * d))

    def test_spec_reduces_and_checks_length(self):
        assert TGateSpec(5, (5, 6, -1, 0, 0)).t == (0, 1, 4, 0, 0)
        with pytest.raises(InvalidArgumentError):
            TGateSpec(5, (0, 0))

    @pytest.mark.parametrize("d", [5, 7, 11])
    @pytest.mark.parametrize("slope", [0, 1, 3])
    def test_gadget_compatible_family(self, d, slope):
        # T X T^dag must equal X S^dag up to a phase
        t = t_gate(gadget_compatible_t(d, slope)).matrix
        lhs = t @ pauli_x(d).matrix @ t.conj().T
        rhs = pauli_x(d).matrix @ phase_s(d).matrix.conj().T
        i = np.unravel_index(np.argmax(np.abs(rhs)), rhs.shape)
        assert np.allclose(lhs, lhs[i] / rhs[i] * rhs, atol=1e-9)

    @pytest.mark.parametrize("d", [9, 15])
    def test_multiple_of_three_has_no_compatible_t(self, d):
        # the slope contributes d * slope, so closure depends only on S
        assert sum((j - d + 2) * j // 2 for j in range(d)) % d != 0

    def test_gadget_compatible_known_vector(self):
        assert gadget_compatible_t(5).t == (0, 0, 1, 2, 2)

    @pytest.mark.parametrize("d", [2, 3, 4, 6, 9, 15])
    def test_no_compatible_t(self, d):
        with pytest.raises(UnsupportedDimensionError):
            gadget_compatible_t(d)


class TestCX:
    def test_qubit(self):
        assert np.allclose(cx(2).matrix @ basis_state(2, 2, 2).amplitudes, basis_state(2, 3, 2).amplitudes)

    def test_qutrit_wraps(self):
        # |2,1> -> |2, 1+2 mod 3> = |2,0>
        assert np.allclose(cx(3).matrix @ basis_state(3, 7, 2).amplitudes, basis_state(3, 6, 2).amplitudes)

    @pytest.mark.parametrize("d", [2, 3, 5])
    def test_unitary(self, d):
        m = cx(d).matrix
        assert np.allclose(m @ m.conj().T, np.eye(d * d))

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_controlled_shift_blocks(self, d):
        m = cx(d).matrix
        for j in range(d):
            assert np.allclose(m[j * d:(j + 1) * d, j * d:(j + 1) * d], _mp(pauli_x(d).matrix, j))


class TestU:
    def test_qubit_x(self):
        assert np.allclose(u_gate(2, 0, 1).matrix, pauli_x(2).matrix)

    def test_qubit_z(self):
        assert np.allclose(u_gate(2, 1, 0).matrix, pauli_z(2).matrix)

    def test_decrypts_particle_eight(self):
        assert np.allclose(u_gate(3, 2, 1).matrix @ basis_state(3, 1).amplitudes, basis_state(3, 0).amplitudes)

    @pytest.mark.parametrize("d", [2, 3, 5])
    def test_equals_z_then_inverse_shift(self, d):
        x, z = pauli_x(d).matrix, pauli_z(d).matrix
        for a in range(d):
            for b in range(d):
                assert np.allclose(u_gate(d, a, b).matrix, _mp(z, a) @ _mp(x.conj().T, b), atol=1e-9)

    @pytest.mark.parametrize("d", [3, 5])
    def test_xdag_first_ordering_is_off_by_a_phase(self, d):
        # U(a, b) = omega^{-ab} (X^dag)^b Z^a, so the X-first product is only
        # equal up to phase once a*b is nonzero mod d
        x, z = pauli_x(d).matrix, pauli_z(d).matrix
        for a in range(d):
            for b in range(d):
                lhs = _mp(x.conj().T, b) @ _mp(z, a)
                assert np.allclose(u_gate(d, a, b).matrix, omega(d) ** (-a * b) * lhs, atol=1e-9)
        assert not np.allclose(u_gate(d, 1, 1).matrix, x.conj().T @ z)

    def test_xz_operator_action(self):
        d = 5
        for p in range(d):
            for q in range(d):
                want = _mp(pauli_x(d).matrix, p) @ _mp(pauli_z(d).matrix, q)
                assert np.allclose(xz(d, p, q).matrix, want)


class TestBell:
    def test_qubit_phi_plus(self):
        assert np.allclose(bell_state(2, 0, 0).amplitudes, np.array([1, 0, 0, 1]) / np.sqrt(2))

    def test_qutrit_pair(self):
        assert np.allclose(bell_state(3, 0, 0).amplitudes, basis_state(3, 0, 2).amplitudes * 0 + np.array(
            [1, 0, 0, 0, 1, 0, 0, 0, 1]) / np.sqrt(3))

    @pytest.mark.parametrize("d", [2, 3, 5])
    def test_orthonormal_basis(self, d):
        states = np.array([bell_state(d, a, b).amplitudes for a in range(d) for b in range(d)])
        assert np.allclose(states.conj() @ states.T, np.eye(d * d), atol=1e-9)


class TestGateIds:
    @pytest.mark.parametrize("d", [2, 3, 4, 5, 7])
    def test_every_constructor_unitary(self, d):
        mats = [identity(d), pauli_x(d), pauli_y(d), pauli_z(d), hadamard(d), phase_s(d), cx(d), u_gate(d, 1, d - 1)]
        if d > 3:
            mats.append(t_gate(TGateSpec(d, tuple(range(d)))))
        for m in mats:
            assert _is_unitary(m.matrix)

    def test_gate_matrix_dispatch(self):
        assert np.allclose(gate_matrix(GateId("H"), 3).matrix, hadamard(3).matrix)
        spec = TGateSpec(5, (0, 0, 1, 2, 2))
        assert str(GateId.T(spec)) == "T(0,0,1,2,2)"
        assert GateId("CX").arity == 2

    def test_unknown_gate(self):
        with pytest.raises(InvalidArgumentError):
            GateId("W")

    def test_t_requires_spec(self):
        with pytest.raises(InvalidArgumentError):
            GateId("T")
        with pytest.raises(InvalidArgumentError):
            GateId("X", TGateSpec(5, (0,) * 5))

    def test_unitary_type_checks(self):
        with pytest.raises(Exception):
            UnitaryMatrix(2, np.array([[1, 1], [0, 1]]))
