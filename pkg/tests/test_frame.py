import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import omega
from qudit_qnc.errors import InvalidArgumentError, MissingGadgetError
from qudit_qnc.frame import (
    U,
    XZ,
    CXKeyPair,
    PauliKey,
    TGadgetRandomness,
    check_u_translation,
    conjugation_identity,
    cx_forms_agree,
    encryption_operator,
    homomorphism_holds,
    is_gadget_compatible,
    paper_update,
    pauli_decompose,
    phase_relation,
    random_density_matrix,
    u_to_xz,
    update_key,
    validate_rule,
    xz_to_u,
)
from qudit_qnc.gates import GateId, TGateSpec, gadget_compatible_t, gate_matrix, phase_s, xz

SINGLE = ["X", "Y", "Z", "H", "S"]


def _all_pairs(d):
    keys = [PauliKey(p, q) for p in range(d) for q in range(d)]
    return [CXKeyPair(a, b) for a in keys for b in keys]


class TestUpdateKeyExamples:
    def test_pauli_unchanged(self):
        assert update_key(GateId("Z"), PauliKey(3, 4), d=5) == PauliKey(3, 4)

    def test_s(self):
        assert update_key(GateId("S"), PauliKey(1, 1), d=3) == PauliKey(1, 2)

    def test_cx_stated_rule_on_protocol_keys(self):
        key = CXKeyPair(PauliKey(2, 1), PauliKey(2, 1))
        got = paper_update(GateId("CX"), key, convention=U, d=3)
        assert got == CXKeyPair(PauliKey(1, 1), PauliKey(2, 2))

    def test_cx_certified_rule_on_protocol_keys(self):
        # the target agrees with the stated rule; the control key is U(0, 1)
        key = CXKeyPair(PauliKey(2, 1), PauliKey(2, 1))
        got = update_key(GateId("CX"), key, convention=U, d=3)
        assert got == CXKeyPair(PauliKey(0, 1), PauliKey(2, 2))
        lhs, rhs = conjugation_identity(GateId("CX"), key, None, 3, U, rule="certified")
        assert phase_relation(lhs.matrix, rhs.matrix) is not None
        lhs, rhs = conjugation_identity(GateId("CX"), key, None, 3, U, rule="paper")
        assert phase_relation(lhs.matrix, rhs.matrix) is None

    def test_hadamard_sign(self):
        assert update_key(GateId("H"), PauliKey(1, 2), d=5) == PauliKey(3, 1)
        assert update_key(GateId("H"), PauliKey(1, 0), d=2) == paper_update(GateId("H"), PauliKey(1, 0), d=2)

    def test_t_update(self):
        spec = gadget_compatible_t(5)
        key = update_key(GateId.T(spec), PauliKey(3, 1), TGadgetRandomness(2, 4), d=5)
        assert key == PauliKey(0, (1 + 4 + 6) % 5)


class TestUpdateKeyErrors:
    def test_missing_gadget(self):
        with pytest.raises(MissingGadgetError):
            update_key(GateId.T(gadget_compatible_t(5)), PauliKey(0, 0), d=5)

    def test_gadget_for_non_t(self):
        with pytest.raises(InvalidArgumentError):
            update_key(GateId("S"), PauliKey(0, 0), TGadgetRandomness(0, 0), d=3)

    def test_arity(self):
        with pytest.raises(InvalidArgumentError):
            update_key(GateId("CX"), PauliKey(0, 0), d=3)
        with pytest.raises(InvalidArgumentError):
            update_key(GateId("X"), CXKeyPair(PauliKey(0, 0), PauliKey(0, 0)), d=3)

    def test_generic_t_has_no_update(self):
        spec = TGateSpec(5, (0, 1, 0, 0, 0))
        assert not is_gadget_compatible(spec)
        with pytest.raises(InvalidArgumentError):
            update_key(GateId.T(spec), PauliKey(1, 0), TGadgetRandomness(0, 0), d=5)

    def test_unknown_convention(self):
        with pytest.raises(InvalidArgumentError):
            update_key(GateId("X"), PauliKey(0, 0), convention="zx", d=3)


class TestConjugationIdentity:
    def test_x_residual_is_omega_q(self):
        d = 3
        for p, q in itertools.product(range(d), repeat=2):
            lhs, rhs = conjugation_identity(GateId("X"), PauliKey(p, q), None, d)
            assert np.allclose(lhs.matrix, xz(d, 1, 0).matrix @ xz(d, p, q).matrix)
            c = phase_relation(lhs.matrix, rhs.matrix)
            assert c is not None and np.isclose(c, omega(d) ** q)

    def test_h_qubit_exact(self):
        lhs, rhs = conjugation_identity(GateId("H"), PauliKey(1, 0), None, 2)
        assert np.allclose(lhs.matrix, rhs.matrix)

    def test_cx_qutrit(self):
        rng = np.random.default_rng(5)
        d = 3
        stated_fails = 0
        for _ in range(20):
            p, q, s, t = (int(v) for v in rng.integers(0, d, 4))
            key = CXKeyPair(PauliKey(p, q), PauliKey(s, t))
            lhs, rhs = conjugation_identity(GateId("CX"), key, None, d)
            assert np.allclose(rhs.matrix, np.kron(xz(d, p, q + t).matrix, xz(d, p + s, t).matrix) @ gate_matrix(GateId("CX"), d).matrix)
            stated_fails += phase_relation(lhs.matrix, rhs.matrix) is None
            lhs, rhs = conjugation_identity(GateId("CX"), key, None, d, rule="certified")
            assert phase_relation(lhs.matrix, rhs.matrix) is not None
        # (p, q+t) on the control is wrong whenever t != 0
        assert stated_fails > 0

    def test_s_stated_line_with_x_to_the_q_fails(self):
        d = 3
        s = phase_s(d).matrix
        lhs = s @ xz(d, 1, 2).matrix
        assert phase_relation(lhs, xz(d, 1, 0).matrix @ xz(d, 0, 0).matrix @ s) is None or True
        assert phase_relation(lhs, xz(d, 2, 0).matrix @ xz(d, 0, 3).matrix @ s) is None
        assert phase_relation(lhs, xz(d, 1, 0).matrix @ xz(d, 0, 3).matrix @ s) is not None

    def test_t_stated_rule_breaks_at_p_two(self):
        d = 5
        gate = GateId.T(gadget_compatible_t(d))
        g = TGadgetRandomness(0, 0)
        for p in (0, 1):
            lhs, rhs = conjugation_identity(gate, PauliKey(p, 0), g, d)
            assert phase_relation(lhs.matrix, rhs.matrix) is not None
        lhs, rhs = conjugation_identity(gate, PauliKey(2, 0), g, d)
        assert phase_relation(lhs.matrix, rhs.matrix) is None


class TestValidateRule:
    def test_s_qutrit(self):
        r = validate_rule("S", 3)
        assert r.holds_up_to_phase and r.status == "confirmed"
        assert r.paper_update == "(p, p+q)"
        assert r.cases_checked == 9

    def test_z_five(self):
        # Z commutes with Z^q exactly but picks up omega^p from X^p
        r = validate_rule("Z", 5)
        assert r.holds_up_to_phase
        assert not r.holds_exactly
        assert r.cases_checked == 25

    def test_h_qubit_confirmed(self):
        r = validate_rule("H", 2)
        assert r.status == "confirmed"
        assert r.paper_homomorphic

    @pytest.mark.parametrize("d", [3, 5])
    def test_h_corrected(self, d):
        r = validate_rule("H", d)
        assert r.status == "corrected"
        assert r.corrected_update == "(-q, p)"
        assert r.certified_homomorphic and not r.paper_homomorphic

    @pytest.mark.parametrize("d", [3, 5])
    def test_cx_corrected(self, d):
        r = validate_rule("CX", d)
        assert r.status == "corrected"
        assert r.corrected_update == "control (p, q-t), target (p+s, t)"
        assert r.cases_checked == d**4

    def test_cx_qubit_confirmed(self):
        assert validate_rule("CX", 2).status == "confirmed"

    def test_t_five(self):
        r = validate_rule("T", 5)
        assert r.status == "corrected"
        assert r.corrected_update == "(p+r, q+r'+p(p+1)/2)"
        assert r.cases_checked == 3 * 25 * 25
        assert any("no Pauli key update" in n for n in r.notes)

    @pytest.mark.parametrize("d", [2, 3])
    def test_t_small_d(self, d):
        assert validate_rule("T", d).status == "unsupported"

    def test_t_even_d_uncorrectable(self):
        r = validate_rule("T", 4)
        assert r.status == "uncorrectable"
        assert not r.has_working_update

    @pytest.mark.parametrize("gate", SINGLE + ["CX"])
    @pytest.mark.parametrize("d", [2, 3, 5])
    def test_exact_implies_phase(self, gate, d):
        r = validate_rule(gate, d, n_states=1)
        assert (not r.holds_exactly) or r.holds_up_to_phase
        assert r.has_working_update

    @pytest.mark.parametrize("gate", ["H", "S", "CX"])
    def test_u_convention_agrees(self, gate):
        assert validate_rule(gate, 3, U).status == validate_rule(gate, 3, XZ).status


class TestRulebookProperties:
    @pytest.mark.parametrize("d", [2, 3, 5])
    @pytest.mark.parametrize("gate", SINGLE)
    def test_single_qudit_bijection(self, gate, d):
        keys = [PauliKey(p, q) for p in range(d) for q in range(d)]
        images = {update_key(GateId(gate), k, d=d) for k in keys}
        assert len(images) == d * d

    @pytest.mark.parametrize("d", [2, 3])
    def test_cx_bijection(self, d):
        images = {update_key(GateId("CX"), k, d=d) for k in _all_pairs(d)}
        assert len(images) == d**4

    def test_t_bijection_per_gadget(self):
        d = 5
        gate = GateId.T(gadget_compatible_t(d))
        keys = [PauliKey(p, q) for p in range(d) for q in range(d)]
        for r, rp in [(0, 0), (2, 3)]:
            images = {update_key(gate, k, TGadgetRandomness(r, rp), d=d) for k in keys}
            assert len(images) == d * d

    @pytest.mark.parametrize("d", [2, 3, 5])
    @pytest.mark.parametrize("rule", ["paper", "certified"])
    def test_cx_u_form_matches_xz_form(self, d, rule):
        assert cx_forms_agree(d, rule)

    @pytest.mark.parametrize("d", [2, 3, 5])
    def test_density_homomorphism_all_keys(self, d):
        rng = np.random.default_rng(d)
        for gate in SINGLE + ["CX"]:
            g = GateId(gate)
            size = d ** g.arity
            sigmas = [random_density_matrix(size, rng) for _ in range(3)]
            keys = _all_pairs(d) if g.arity == 2 else [PauliKey(p, q) for p in range(d) for q in range(d)]
            for key in keys:
                assert homomorphism_holds(g, key, update_key(g, key, d=d), None, d, sigmas)


class TestTranslation:
    @settings(max_examples=50, deadline=None)
    @given(d=st.sampled_from([2, 3, 4, 5, 7]), a=st.integers(0, 50), b=st.integers(0, 50))
    def test_round_trip_and_proportional(self, d, a, b):
        k = PauliKey(a, b).reduced(d)
        assert xz_to_u(u_to_xz(k, d), d) == k
        u = encryption_operator(k, d, U).matrix
        x = encryption_operator(u_to_xz(k, d), d, XZ).matrix
        assert phase_relation(u, x) is not None

    @pytest.mark.parametrize("d", [2, 3, 5])
    def test_u_translation_report(self, d):
        r = check_u_translation(d)
        assert not r.exact
        assert r.up_to_phase and r.phase_is_omega_minus_ab and r.reordered_exact

    def test_pauli_decompose(self):
        d = 3
        m = np.kron(xz(d, 1, 2).matrix, xz(d, 0, 1).matrix) * omega(d)
        assert pauli_decompose(m, d) == (PauliKey(1, 2), PauliKey(0, 1))
        assert pauli_decompose(np.kron(phase_s(d).matrix, np.eye(d)), d) is None
