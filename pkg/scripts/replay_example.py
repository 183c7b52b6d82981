"""Replay the qutrit worked example and print every particle that moves.

Usage: python scripts/replay_example.py [--seed N]
"""

import argparse

import numpy as np

from qudit_qnc.butterfly import SharedKeys, run_protocol, verify_recovery
from qudit_qnc.core import make_state
from qudit_qnc.teleport import BellOutcome


def ket_string(amplitudes, tol=1e-9):
    d = len(amplitudes)
    terms = []
    for j, a in enumerate(amplitudes):
        if abs(a) <= tol:
            continue
        k = int(round(np.angle(a) * d / (2 * np.pi))) % d
        if abs(a - np.exp(2j * np.pi * k / d)) <= tol:
            coeff = "" if k == 0 else f"w^{k} "
        else:
            coeff = f"({a.real:+.3f}{a.imag:+.3f}j) "
        terms.append(f"{coeff}|{j}>")
    return " + ".join(terms)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=0, help="seed for the random inputs phi, psi")
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    phi = make_state(3, rng.standard_normal(3) + 1j * rng.standard_normal(3))
    psi = make_state(3, rng.standard_normal(3) + 1j * rng.standard_normal(3))
    keys = SharedKeys(2, 1)
    outcomes = (BellOutcome(0, 1), BellOutcome(1, 2))
    trace = run_protocol(3, phi, psi, keys, forced_outcomes=outcomes)
    decrypted = run_protocol(3, phi, psi, keys, forced_outcomes=outcomes, last_step=7).snapshot(7)

    print(f"keys (s1, s2) = {keys.s1, keys.s2}; M1 = {tuple(outcomes[0])}, M2 = {tuple(outcomes[1])}")
    for msg in trace.messages:
        if msg.label < 7:
            continue
        print(f"step {msg.step} {msg.edge.value} {msg.sender.value}->{msg.receiver.value} "
              f"particle {msg.label}: {ket_string(msg.state.amplitudes)}")
    for label in (9, 10, 11, 12):
        print(f"after decryption, particle {label}: {ket_string(decrypted.particle(label).amplitudes)}")
    print(f"sink measurements: Q1 {trace.measurements[0]}, Q2 {trace.measurements[1]}")
    rep = verify_recovery(trace)
    print(f"fidelity Q1 {rep.fidelity_q1:.12f}, Q2 {rep.fidelity_q2:.12f}")
    print(f"global phase Q1 {rep.phase_q1:.6f} (expected {rep.expected_phase_q1:.6f}), "
          f"Q2 {rep.phase_q2:.6f} (expected {rep.expected_phase_q2:.6f})")


if __name__ == "__main__":
    main()
