"""Passive intercept audits of the butterfly protocol.

Every scenario names the particles an attacker gets to hold. The audit runs
the real protocol for every (s1, s2, M1, M2) in Z_d^6 with forced outcomes,
collects the intercepted particles' states, and averages exhaustively. The
averaged state is compared with the maximally mixed state by trace
distance.

Two averaging regimes are reported per scenario:

* keys and outcomes (the pass criterion), and
* keys only, conditioned on each outcome tuple. This shows what an attacker
  who somehow learned M1, M2 but not the keys would see. It is a diagnostic
  and never affects ``passes``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import DEFAULT_TOL, DensityMatrix, as_dimension, basis_state, trace_distance
from .errors import InvalidArgumentError, UnsupportedDimensionError
from .butterfly import EdgeId, ProtocolTrace, SharedKeys, run_protocol
from .gates import u_gate
from .teleport import BellOutcome

SUPPORTED_DIMENSIONS = range(2, 6)


@dataclass(frozen=True)
class InterceptScenario:
    """Particles (label, step) an attacker holds; ``joint`` selects the joint-state test."""

    tag: str
    edges: frozenset[EdgeId]
    particles: tuple[tuple[int, int], ...]
    joint: bool
    description: str


# (label, step): a message sent at that step, or, for step 5 particles 7 and
# 8, V1's post-gate copies that never leave V1.
SCENARIOS: tuple[InterceptScenario, ...] = (
    InterceptScenario(
        "T1_source_to_v1", frozenset({EdgeId.E1, EdgeId.E2}),
        ((7, 4), (8, 4), (9, 4), (10, 4)), False,
        "eavesdropper on P1->V1 and P2->V1, each particle separately",
    ),
    InterceptScenario(
        "T2_v1_to_v2", frozenset({EdgeId.E3}),
        ((9, 5), (10, 5)), False,
        "eavesdropper on the bottleneck V1->V2, each particle separately",
    ),
    InterceptScenario(
        "T3_v2_to_sinks", frozenset({EdgeId.E4, EdgeId.E5}),
        ((9, 6), (10, 6), (11, 6), (12, 6)), False,
        "eavesdropper on V2->Q1 and V2->Q2, each particle separately",
    ),
    InterceptScenario(
        "V1_internal", frozenset({EdgeId.E1, EdgeId.E2}),
        ((7, 4), (8, 4), (9, 4), (10, 4)), True,
        "dishonest V1: joint state of everything it receives",
    ),
    InterceptScenario(
        "V2_internal", frozenset({EdgeId.E3}),
        ((9, 5), (10, 5)), True,
        "dishonest V2: joint state of everything it receives",
    ),
    InterceptScenario(
        "V1V2_collusion", frozenset({EdgeId.E1, EdgeId.E2, EdgeId.E3}),
        ((7, 5), (8, 5), (9, 5), (10, 5)), True,
        "V1 and V2 pooling V1's kept particles with V2's received ones",
    ),
)
SCENARIO_TAGS = tuple(s.tag for s in SCENARIOS)


def scenario(tag: str) -> InterceptScenario:
    for s in SCENARIOS:
        if s.tag == tag:
            return s
    raise InvalidArgumentError(f"unknown scenario {tag!r}; choose from {', '.join(SCENARIO_TAGS)}")


@dataclass(frozen=True)
class InterceptReport:
    scenario: InterceptScenario
    observed: DensityMatrix
    reference: DensityMatrix
    distance: float
    joint_distance: float
    marginal_distances: tuple[float, ...]
    keys_only_distance: Optional[float]
    tolerance: float
    runs: int

    @property
    def passes(self) -> bool:
        return self.distance <= self.tolerance


def key_averaged_ciphertext(dim, sigma: DensityMatrix) -> DensityMatrix:
    """(1/d^2) sum over (s1, s2) of U(s1, s2) sigma U(s1, s2)^dagger."""
    dim = as_dimension(dim)
    if sigma.n_qudits != 1:
        raise InvalidArgumentError("key averaging is defined for a single qudit")
    d = dim.d
    acc = np.zeros((d, d), dtype=complex)
    for s1 in range(d):
        for s2 in range(d):
            u = u_gate(dim, s1, s2).matrix
            acc += u @ sigma.matrix @ u.conj().T
    return DensityMatrix(dim, acc / d**2)


def _particle_vector(trace: ProtocolTrace, label: int, step: int) -> np.ndarray:
    if step == 5 and label in (7, 8):
        return trace.snapshot(5).particle(label).amplitudes
    return trace.message(label, step).state.amplitudes


def _joint_vector(vectors: list[np.ndarray]) -> np.ndarray:
    out = vectors[0]
    for v in vectors[1:]:
        out = np.kron(out, v)
    return out


def _grid(d: int, leak: Optional[tuple[SharedKeys, tuple[BellOutcome, BellOutcome]]]):
    if leak is not None:
        keys, (m1, m2) = leak
        return [(keys.s1, keys.s2, m1.m1, m1.m2, m2.m1, m2.m2)]
    return list(itertools.product(range(d), repeat=6))


def collect_states(dim, leak=None, scenarios=SCENARIOS) -> tuple[list[tuple[int, ...]], dict[str, np.ndarray]]:
    """Run the protocol over the grid; per scenario, one product vector per run."""
    dim = as_dimension(dim)
    d = dim.d
    zero = basis_state(dim, 0)
    grid = _grid(d, leak)
    rows: dict[str, list[np.ndarray]] = {s.tag: [] for s in scenarios}
    for s1, s2, a, b, c, e in grid:
        trace = run_protocol(
            dim, zero, zero, SharedKeys(s1, s2),
            forced_outcomes=(BellOutcome(a, b), BellOutcome(c, e)), last_step=6,
        )
        cache: dict[tuple[int, int], np.ndarray] = {}
        for s in scenarios:
            vecs = []
            for key in s.particles:
                if key not in cache:
                    cache[key] = _particle_vector(trace, *key)
                vecs.append(cache[key])
            rows[s.tag].append(_joint_vector(vecs))
    return grid, {k: np.array(v) for k, v in rows.items()}


def _average(vectors: np.ndarray) -> np.ndarray:
    return vectors.T @ vectors.conj() / vectors.shape[0]


def _marginals(vectors: np.ndarray, d: int, k: int) -> list[np.ndarray]:
    t = vectors.reshape((vectors.shape[0],) + (d,) * k)
    out = []
    for i in range(k):
        v = np.moveaxis(t, i + 1, 1).reshape(vectors.shape[0], d, -1)
        out.append(np.einsum("nar,nbr->ab", v, v.conj()) / vectors.shape[0])
    return out


def _keys_only_distance(grid, vectors: np.ndarray, reference: np.ndarray, joint: bool, d: int, k: int) -> float:
    groups: dict[tuple[int, ...], list[int]] = {}
    for i, row in enumerate(grid):
        groups.setdefault(row[2:], []).append(i)
    worst = 0.0
    for idx in groups.values():
        sub = vectors[idx]
        if joint:
            worst = max(worst, trace_distance(_average(sub), reference))
        else:
            ref1 = np.eye(d) / d
            worst = max(worst, max(trace_distance(m, ref1) for m in _marginals(sub, d, k)))
    return worst


def intercept_reduced_state(
    scen: InterceptScenario,
    dim,
    tolerance: float = DEFAULT_TOL,
    *,
    conditional: bool = True,
    leak: Optional[tuple[SharedKeys, tuple[BellOutcome, BellOutcome]]] = None,
    _collected=None,
) -> InterceptReport:
    """Average the intercepted state exhaustively and compare with I/d^k.

    Marginal scenarios pass when every single-particle average is within
    ``tolerance`` of I/d. Joint scenarios pass when the joint average is
    within ``tolerance`` of I/d^k. With ``leak`` the attacker knows the keys
    and outcomes, so nothing is averaged (negative control).
    """
    dim = as_dimension(dim)
    d = dim.d
    grid, vectors = _collected if _collected is not None else collect_states(dim, leak, (scen,))
    vecs = vectors[scen.tag]
    k = len(scen.particles)
    rho = _average(vecs)
    rho = (rho + rho.conj().T) / 2
    reference = np.eye(d**k) / d**k
    joint_distance = trace_distance(rho, reference)
    marginal_distances = tuple(trace_distance(m, np.eye(d) / d) for m in _marginals(vecs, d, k))
    distance = joint_distance if scen.joint else max(marginal_distances)
    keys_only = None
    if conditional and leak is None:
        keys_only = _keys_only_distance(grid, vecs, reference, scen.joint, d, k)
    return InterceptReport(
        scenario=scen,
        observed=DensityMatrix(dim, rho),
        reference=DensityMatrix(dim, reference),
        distance=distance,
        joint_distance=joint_distance,
        marginal_distances=marginal_distances,
        keys_only_distance=keys_only,
        tolerance=tolerance,
        runs=len(grid),
    )


def audit_all(
    dim,
    tolerance: float = DEFAULT_TOL,
    *,
    conditional: Optional[bool] = None,
    leak: Optional[tuple[SharedKeys, tuple[BellOutcome, BellOutcome]]] = None,
) -> list[InterceptReport]:
    """Every scenario from one shared sweep of d^6 protocol runs.

    ``conditional`` defaults to on for d <= 4; at d = 5 the keys-only
    diagnostic needs 625 joint eigendecompositions per scenario.
    """
    dim = as_dimension(dim)
    if conditional is None:
        conditional = dim.d <= 4
    if dim.d not in SUPPORTED_DIMENSIONS:
        raise UnsupportedDimensionError(
            f"audits run d in {SUPPORTED_DIMENSIONS.start}..{SUPPORTED_DIMENSIONS.stop - 1}, got {dim.d}"
        )
    collected = collect_states(dim, leak)
    return [
        intercept_reduced_state(s, dim, tolerance, conditional=conditional, leak=leak, _collected=collected)
        for s in SCENARIOS
    ]
