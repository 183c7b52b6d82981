import itertools

import numpy as np
import pytest
from hypothesis import given, settings

from helpers import SMALL_D, binomial_3sigma, random_state, seeds
from qudit_qnc.core import StateVector, basis_state, equal_up_to_global_phase, overlap, tensor
from qudit_qnc.errors import InvalidArgumentError
from qudit_qnc.gates import bell_state, u_gate
from qudit_qnc.teleport import BellOutcome, bell_measure, bell_outcome_probabilities, correct, teleport


def _received_oracle(phi, m1, m2):
    # U(m1, m2)^dagger |j> = omega^{-j m1} |j + m2>
    d = phi.d
    out = np.zeros(d, dtype=complex)
    for j in range(d):
        out[(j + m2) % d] += np.exp(-2j * np.pi * j * m1 / d) * phi.amplitudes[j]
    return StateVector(phi.dim, out)


class TestBellMeasure:
    @pytest.mark.parametrize("d", SMALL_D)
    def test_bell_pair_gives_its_label(self, d):
        for m1, m2 in itertools.product(range(d), repeat=2):
            outcome, rest = bell_measure(bell_state(d, m1, m2), (0, 1), np.random.default_rng(0))
            assert outcome == BellOutcome(m1, m2)
            assert rest is None

    @pytest.mark.parametrize("d", SMALL_D)
    def test_uniform_probabilities_and_residual(self, d):
        phi = random_state(d, np.random.default_rng(d))
        register = tensor(phi, bell_state(d, 0, 0))
        probs = bell_outcome_probabilities(register, (0, 1))
        assert np.allclose(probs, np.full((d, d), 1 / d**2))
        for m1, m2 in itertools.product(range(d), repeat=2):
            _, rest = bell_measure(register, (0, 1), None, BellOutcome(m1, m2))
            assert equal_up_to_global_phase(rest, _received_oracle(phi, m1, m2))

    @pytest.mark.parametrize("m1", range(3))
    @pytest.mark.parametrize("m2", range(3))
    def test_zero_state_lands_on_m2(self, m1, m2):
        register = tensor(basis_state(3, 0), bell_state(3, 0, 0))
        _, rest = bell_measure(register, (0, 1), None, BellOutcome(m1, m2))
        assert equal_up_to_global_phase(rest, basis_state(3, m2))

    def test_keeps_spectator_order(self):
        d = 3
        rng = np.random.default_rng(4)
        spectator = random_state(d, rng)
        register = tensor(spectator, bell_state(d, 1, 2))
        outcome, rest = bell_measure(register, (1, 2), rng)
        assert outcome == BellOutcome(1, 2)
        assert equal_up_to_global_phase(rest, spectator)

    def test_zero_probability_forced_outcome(self):
        with pytest.raises(InvalidArgumentError):
            bell_measure(bell_state(3, 0, 0), (0, 1), None, BellOutcome(1, 1))

    def test_bad_pairs(self):
        state = bell_state(3, 0, 0)
        with pytest.raises(InvalidArgumentError):
            bell_measure(state, (0, 0), np.random.default_rng(0))
        with pytest.raises(InvalidArgumentError):
            bell_measure(state, (0, 2), np.random.default_rng(0))

    def test_needs_rng(self):
        with pytest.raises(InvalidArgumentError):
            bell_measure(bell_state(3, 0, 0), (0, 1), None)

    def test_sampled_frequencies(self):
        d, n = 3, 9000
        rng = np.random.default_rng(0)
        register = tensor(basis_state(d, 1), bell_state(d, 0, 0))
        counts = np.zeros((d, d), dtype=int)
        for _ in range(n):
            o, _ = bell_measure(register, (0, 1), rng)
            counts[o.m1, o.m2] += 1
        assert all(binomial_3sigma(int(c), n, 1 / d**2) for c in counts.ravel())


class TestTeleport:
    @pytest.mark.parametrize("d", [2, 3, 4, 5])
    def test_every_outcome_corrects(self, d):
        phi = random_state(d, np.random.default_rng(10 + d))
        for m1, m2 in itertools.product(range(d), repeat=2):
            outcome, got = teleport(phi, forced=BellOutcome(m1, m2))
            assert outcome == BellOutcome(m1, m2)
            assert abs(overlap(phi, got)) ** 2 == pytest.approx(1.0, abs=1e-9)

    def test_correct_is_u_gate(self):
        phi = random_state(5, np.random.default_rng(0))
        got = correct(phi, BellOutcome(2, 3))
        assert np.allclose(got.amplitudes, u_gate(5, 2, 3).matrix @ phi.amplitudes)

    @settings(max_examples=40, deadline=None)
    @given(seed=seeds)
    def test_fidelity_sampled(self, seed):
        rng = np.random.default_rng(seed)
        d = int(rng.choice([2, 3, 5]))
        phi = random_state(d, rng)
        _, got = teleport(phi, rng)
        assert abs(overlap(phi, got)) ** 2 == pytest.approx(1.0, abs=1e-9)

    def test_rejects_multi_qudit(self):
        with pytest.raises(InvalidArgumentError):
            teleport(basis_state(3, 0, 2), np.random.default_rng(0))
