"""Qudit teleportation: Bell-basis measurement and U(m1, m2) correction."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import DEFAULT_TOL, StateVector, apply_unitary, as_dimension, sample_index, tensor
from .errors import InvalidArgumentError
from .gates import bell_state, u_gate


@dataclass(frozen=True)
class BellOutcome:
    m1: int
    m2: int

    def reduced(self, d: int) -> BellOutcome:
        return BellOutcome(self.m1 % d, self.m2 % d)

    def __iter__(self):
        return iter((self.m1, self.m2))


def _bell_projections(state: StateVector, pair: tuple[int, int]) -> np.ndarray:
    """Unnormalized residuals <psi(m1, m2)|_pair state, indexed [m1, m2, rest]."""
    d, n = state.d, state.n_qudits
    a, b = (int(i) for i in pair)
    if a == b:
        raise InvalidArgumentError("Bell measurement needs two distinct qudits")
    for i in (a, b):
        if not 0 <= i < n:
            raise InvalidArgumentError(f"qudit {i} out of range for {n} qudits")
    psi = np.moveaxis(state.amplitudes.reshape((d,) * n), (a, b), (0, 1)).reshape(d * d, -1)
    basis = np.array([bell_state(state.dim, m1, m2).amplitudes for m1 in range(d) for m2 in range(d)])
    return (basis.conj() @ psi).reshape(d, d, -1)


def bell_outcome_probabilities(state: StateVector, pair: tuple[int, int]) -> np.ndarray:
    """Born probabilities of each (m1, m2), as a d x d array."""
    proj = _bell_projections(state, pair)
    return np.sum(np.abs(proj) ** 2, axis=2)


def bell_measure(
    state: StateVector,
    pair: tuple[int, int],
    rng: Optional[np.random.Generator],
    forced: Optional[BellOutcome] = None,
) -> tuple[BellOutcome, Optional[StateVector]]:
    """Measure ``pair`` in the Bell basis and drop it from the register.

    Args:
        state: register to measure.
        pair: the two qudit positions; the first plays the role of the
            input qudit, the second the entangled half.
        rng: generator for sampling; unused when ``forced`` is given.
        forced: inject this outcome instead of sampling. It must have
            nonzero probability.

    Returns:
        The outcome and the renormalized residual on the remaining qudits
        (in their original order), or None if no qudits remain.
    """
    d = state.d
    proj = _bell_projections(state, pair)
    probs = np.sum(np.abs(proj) ** 2, axis=2)
    if forced is None:
        if rng is None:
            raise InvalidArgumentError("need an rng unless the outcome is forced")
        idx = sample_index(probs.reshape(-1), rng)
        outcome = BellOutcome(idx // d, idx % d)
    else:
        outcome = forced.reduced(d)
        if probs[outcome.m1, outcome.m2] <= DEFAULT_TOL:
            raise InvalidArgumentError(f"forced outcome {tuple(outcome)} has zero probability")
    if state.n_qudits == 2:
        return outcome, None
    rest = proj[outcome.m1, outcome.m2]
    return outcome, StateVector(state.dim, rest / np.linalg.norm(rest))


def correct(state: StateVector, outcome: BellOutcome, target: int = 0) -> StateVector:
    """Apply U(m1, m2) to ``target``."""
    return apply_unitary(state, u_gate(state.dim, outcome.m1, outcome.m2), [target])


def teleport(
    phi: StateVector,
    rng: Optional[np.random.Generator] = None,
    forced: Optional[BellOutcome] = None,
) -> tuple[BellOutcome, StateVector]:
    """Teleport a single-qudit state through |psi(0,0)>; returns (outcome, received state)."""
    if phi.n_qudits != 1:
        raise InvalidArgumentError("teleport takes a single-qudit state")
    dim = as_dimension(phi.dim)
    register = tensor(phi, bell_state(dim, 0, 0))
    outcome, residual = bell_measure(register, (0, 1), rng, forced)
    return outcome, correct(residual, outcome)
