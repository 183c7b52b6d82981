"""Crossing two qudits over the butterfly network with QFHE-protected coding.

Topology (edge ids are fixed here; e3 is the single bottleneck)::

    e1: P1 -> V1     e2: P2 -> V1     e3: V1 -> V2
    e4: V2 -> Q1     e5: V2 -> Q2     e6: P1 -> Q2     e7: P2 -> Q1

Particles are numbered 1..12. P1 holds the input 1 and halves 3, 5 of the
pre-shared pairs (3,4) and (5,6); P2 holds input 2 and halves 4, 6. The
schedule, one entry per step:

2. P1 Bell-measures (1, 3) giving M1; P2 Bell-measures (2, 6) giving M2.
3. P1 applies U^dag(M1) to 5 and sends it to Q2; P2 applies U^dag(M2) to 4
   and sends it to Q1.
4. P1 prepares |m11>_7 |m12>_8, P2 prepares |m21>_9 |m22>_10; each is
   encrypted with U(s1, s2) and sent to V1.
5. V1 applies CX(7, 9) and CX(8, 10) and forwards 9, 10 to V2.
6. V2 prepares |0>_11 |0>_12, applies CX(9, 11), CX(10, 12), sends 9, 10 to
   Q1 and 11, 12 to Q2 (swapped with ``swap_sinks``).
7. Each sink derives its decryption key by chaining ``frame.update_key``
   and decrypts its two carriers.
8. Each sink measures its carriers, getting (m11 + m21, m12 + m22), and
   applies U of that pair to its payload particle (4 at Q1, 5 at Q2).

Quantum state lives in a ``World``: a set of factored groups of labelled
particles plus a record of who holds each particle. Nodes may only touch
particles they hold, so a node never reads another node's state. Step 1
(key distribution) is replaced by handing (s1, s2) to P1, P2, Q1, Q2.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Mapping, Optional, Union

import numpy as np

from .core import (
    DEFAULT_TOL,
    Dimension,
    StateVector,
    apply_unitary,
    as_dimension,
    basis_state,
    measure_computational,
    overlap,
    permute_qudits,
    split_first,
    tensor,
)
from .errors import (
    DimensionMismatchError,
    EntangledStateError,
    IncompleteTraceError,
    InvalidArgumentError,
    ProtocolViolationError,
)
from .frame import U as U_CONVENTION
from .frame import CXKeyPair, PauliKey, update_key
from .gates import GateId, bell_state, cx, u_gate
from .teleport import BellOutcome, bell_measure


class NodeId(str, Enum):
    P1 = "P1"
    P2 = "P2"
    V1 = "V1"
    V2 = "V2"
    Q1 = "Q1"
    Q2 = "Q2"


class EdgeId(str, Enum):
    E1 = "e1"
    E2 = "e2"
    E3 = "e3"
    E4 = "e4"
    E5 = "e5"
    E6 = "e6"
    E7 = "e7"


EDGES: dict[EdgeId, tuple[NodeId, NodeId]] = {
    EdgeId.E1: (NodeId.P1, NodeId.V1),
    EdgeId.E2: (NodeId.P2, NodeId.V1),
    EdgeId.E3: (NodeId.V1, NodeId.V2),
    EdgeId.E4: (NodeId.V2, NodeId.Q1),
    EdgeId.E5: (NodeId.V2, NodeId.Q2),
    EdgeId.E6: (NodeId.P1, NodeId.Q2),
    EdgeId.E7: (NodeId.P2, NodeId.Q1),
}
BOTTLENECK = EdgeId.E3
EDGE_STEP = {
    EdgeId.E6: 3,
    EdgeId.E7: 3,
    EdgeId.E1: 4,
    EdgeId.E2: 4,
    EdgeId.E3: 5,
    EdgeId.E4: 6,
    EdgeId.E5: 6,
}
STEPS = tuple(range(2, 9))
SCHEDULE: dict[int, tuple[NodeId, ...]] = {
    2: (NodeId.P1, NodeId.P2),
    3: (NodeId.P1, NodeId.P2),
    4: (NodeId.P1, NodeId.P2),
    5: (NodeId.V1,),
    6: (NodeId.V2,),
    7: (NodeId.Q1, NodeId.Q2),
    8: (NodeId.Q1, NodeId.Q2),
}
SHARED_KEY_ID = "s"


@dataclass(frozen=True)
class SharedKeys:
    s1: int
    s2: int

    def reduced(self, d: int) -> SharedKeys:
        return SharedKeys(self.s1 % d, self.s2 % d)

    def as_u_key(self) -> PauliKey:
        return PauliKey(self.s1, self.s2)


@dataclass(frozen=True)
class Message:
    """One particle in flight: its state when sent and the pad's key id."""

    edge: EdgeId
    step: int
    label: int
    state: StateVector
    key_id: Optional[str] = None

    @property
    def sender(self) -> NodeId:
        return EDGES[self.edge][0]

    @property
    def receiver(self) -> NodeId:
        return EDGES[self.edge][1]


Holder = Union[NodeId, EdgeId]


@dataclass(frozen=True)
class Group:
    labels: tuple[int, ...]
    state: StateVector


@dataclass(frozen=True, eq=False)
class World:
    """Factored register of labelled particles and who currently holds each."""

    dim: Dimension
    groups: tuple[Group, ...] = ()
    holders: Mapping[int, Holder] = field(default_factory=dict)

    def _index(self, label: int) -> int:
        for i, g in enumerate(self.groups):
            if label in g.labels:
                return i
        raise InvalidArgumentError(f"particle {label} does not exist")

    def labels(self) -> tuple[int, ...]:
        return tuple(sorted(self.holders))

    def particle_state(self, label: int) -> StateVector:
        g = self.groups[self._index(label)]
        if len(g.labels) != 1:
            raise EntangledStateError(f"particle {label} is entangled with {g.labels}")
        return g.state

    def _require(self, node: NodeId, labels) -> None:
        for lab in labels:
            if self.holders.get(lab) != node:
                raise ProtocolViolationError(f"{node.value} does not hold particle {lab}")

    def _with(self, groups, holders=None) -> World:
        return World(self.dim, tuple(groups), dict(self.holders if holders is None else holders))

    def create(self, node: NodeId, labels: tuple[int, ...], state: StateVector, owners=None) -> World:
        """Add fresh particles; ``owners`` overrides the holder per label."""
        if any(lab in self.holders for lab in labels):
            raise ProtocolViolationError(f"particles {labels} already exist")
        holders = dict(self.holders)
        for i, lab in enumerate(labels):
            holders[lab] = owners[i] if owners else node
        return self._with(self.groups + (Group(tuple(labels), state),), holders)

    def _merge(self, labels) -> tuple[list[Group], tuple[int, ...], StateVector]:
        idx = []
        for lab in labels:
            i = self._index(lab)
            if i not in idx:
                idx.append(i)
        merged = [self.groups[i] for i in idx]
        rest = [g for i, g in enumerate(self.groups) if i not in idx]
        all_labels = tuple(lab for g in merged for lab in g.labels)
        state = merged[0].state if len(merged) == 1 else tensor(*(g.state for g in merged))
        return rest, all_labels, state

    def apply(self, node: NodeId, u, labels: tuple[int, ...]) -> World:
        """Apply a gate to held particles, re-factoring afterwards.

        When a particle splits off again its global phase follows its
        pre-gate state, so a control qudit keeps its phase.
        """
        self._require(node, labels)
        hints = {}
        for lab in labels:
            g = self.groups[self._index(lab)]
            if len(g.labels) == 1:
                hints[lab] = g.state
        rest, all_labels, state = self._merge(labels)
        state = apply_unitary(state, u, [all_labels.index(lab) for lab in labels])
        order = list(labels) + [lab for lab in all_labels if lab not in labels]
        return self._with(rest + _factor(all_labels, state, order, hints))

    def bell_measure(self, node, pair, rng, forced=None) -> tuple[BellOutcome, World]:
        self._require(node, pair)
        rest, all_labels, state = self._merge(pair)
        outcome, residual = bell_measure(state, tuple(all_labels.index(lab) for lab in pair), rng, forced)
        remaining = tuple(lab for lab in all_labels if lab not in pair)
        holders = {k: v for k, v in self.holders.items() if k not in pair}
        groups = rest + (_factor(remaining, residual, list(remaining), {}) if remaining else [])
        return outcome, self._with(groups, holders)

    def measure(self, node, label, rng) -> tuple[int, World]:
        self._require(node, [label])
        rest, all_labels, state = self._merge([label])
        outcome, collapsed = measure_computational(state, all_labels.index(label), rng)
        return outcome, self._with(rest + _factor(all_labels, collapsed, [label], {}))

    def send(self, node: NodeId, label: int, edge: EdgeId) -> World:
        self._require(node, [label])
        if EDGES[edge][0] != node:
            raise ProtocolViolationError(f"{node.value} cannot send on {edge.value}")
        holders = dict(self.holders)
        holders[label] = edge
        return self._with(self.groups, holders)

    def deliver(self, label: int, edge: EdgeId) -> World:
        if self.holders.get(label) != edge:
            raise ProtocolViolationError(f"particle {label} is not in flight on {edge.value}")
        holders = dict(self.holders)
        holders[label] = EDGES[edge][1]
        return self._with(self.groups, holders)

    def overwrite(self, label: int, state: StateVector) -> World:
        """Replace an unentangled particle's state (tampering fixture)."""
        self.particle_state(label)
        groups = [Group((label,), state) if label in g.labels else g for g in self.groups]
        return self._with(groups)


def _factor(labels, state, order, hints) -> list[Group]:
    """Split single particles off ``state``, trying labels in ``order`` first."""
    labels = tuple(labels)
    out: list[Group] = []
    pending = [lab for lab in order] + [lab for lab in labels if lab not in order]
    while len(labels) > 1:
        for lab in pending:
            if lab not in labels:
                continue
            i = labels.index(lab)
            others = tuple(x for x in labels if x != lab)
            perm = [i] + [labels.index(x) for x in others]
            try:
                first, rest = split_first(permute_qudits(state, perm), hint=hints.get(lab))
            except EntangledStateError:
                continue
            out.append(Group((lab,), first))
            labels, state = others, rest
            break
        else:
            break
    out.append(Group(labels, state))
    return out


@dataclass(frozen=True)
class SourceState:
    node: NodeId
    keys: SharedKeys
    input_label: int
    pair_label: int
    remote_label: int
    remote_edge: EdgeId
    outcome_labels: tuple[int, int]
    coded_edge: EdgeId
    forced: Optional[BellOutcome] = None
    outcome: Optional[BellOutcome] = None


@dataclass(frozen=True)
class RelayState:
    """Intermediate node. Deliberately has no key or outcome fields."""

    node: NodeId
    swap_sinks: bool = False
    held: tuple[int, ...] = ()


@dataclass(frozen=True)
class SinkState:
    node: NodeId
    keys: SharedKeys
    payload_label: int
    payload_edge: EdgeId
    carriers: tuple[int, int]
    carrier_edge: EdgeId
    derived_key: Optional[PauliKey] = None
    measurement: Optional[tuple[int, int]] = None
    recovered: Optional[StateVector] = None


NodeState = Union[SourceState, RelayState, SinkState]


def _expected_inbox(state: NodeState, step: int) -> set[tuple[EdgeId, int]]:
    if isinstance(state, RelayState):
        if state.node == NodeId.V1 and step == 5:
            return {(EdgeId.E1, 7), (EdgeId.E1, 8), (EdgeId.E2, 9), (EdgeId.E2, 10)}
        if state.node == NodeId.V2 and step == 6:
            return {(EdgeId.E3, 9), (EdgeId.E3, 10)}
        return set()
    if isinstance(state, SinkState) and step == 7:
        return {(state.payload_edge, state.payload_label)} | {(state.carrier_edge, c) for c in state.carriers}
    return set()


def _check_inbox(state: NodeState, step: int, inbox) -> None:
    for msg in inbox:
        if msg.receiver != state.node:
            raise ProtocolViolationError(f"{state.node.value} got a message addressed to {msg.receiver.value}")
        if msg.step != EDGE_STEP[msg.edge] or msg.step >= step:
            raise ProtocolViolationError(
                f"message on {msg.edge.value} stamped step {msg.step} cannot arrive at step {step}"
            )
    got = {(m.edge, m.label) for m in inbox}
    want = _expected_inbox(state, step)
    if got != want or len(inbox) != len(want):
        raise ProtocolViolationError(
            f"{state.node.value} at step {step} expected {sorted((e.value, l) for e, l in want)}, "
            f"got {sorted((e.value, l) for e, l in got)}"
        )


def sink_decryption_key(keys: SharedKeys, carriers: tuple[int, int], d: int) -> PauliKey:
    """Chain the CX key updates of V1 and V2 to get a sink's U-key."""
    k = keys.as_u_key()
    gate = GateId("CX")
    after_v1 = update_key(gate, CXKeyPair(k, k), None, U_CONVENTION, d=d).target
    after_v2 = update_key(gate, CXKeyPair(after_v1, PauliKey(0, 0)), None, U_CONVENTION, d=d)
    return after_v2.control if carriers == (9, 10) else after_v2.target


def _send(world: World, node: NodeId, step: int, label: int, edge: EdgeId, key_id=None):
    msg = Message(edge, step, label, world.particle_state(label), key_id)
    return world.send(node, label, edge), msg


def node_step(
    state: NodeState,
    inbox: tuple[Message, ...],
    world: World,
    step: int,
    rng: Optional[np.random.Generator],
) -> tuple[NodeState, tuple[Message, ...], World]:
    """One node's transition at ``step``: (state, inbox, world) -> (state, outbox, world)."""
    if step not in SCHEDULE or state.node not in SCHEDULE[step]:
        raise ProtocolViolationError(f"{state.node.value} does not act at step {step}")
    _check_inbox(state, step, inbox)
    for msg in inbox:
        world = world.deliver(msg.label, msg.edge)
    dim = world.dim
    d = dim.d
    node = state.node
    out: list[Message] = []

    if isinstance(state, SourceState):
        if step == 2:
            outcome, world = world.bell_measure(node, (state.input_label, state.pair_label), rng, state.forced)
            state = replace(state, outcome=outcome)
        elif step == 3:
            m = state.outcome
            world = world.apply(node, u_gate(dim, m.m1, m.m2).dag(), (state.remote_label,))
            world, msg = _send(world, node, step, state.remote_label, state.remote_edge)
            out.append(msg)
        elif step == 4:
            pad = u_gate(dim, state.keys.s1, state.keys.s2)
            for lab, val in zip(state.outcome_labels, state.outcome):
                world = world.create(node, (lab,), basis_state(dim, val))
                world = world.apply(node, pad, (lab,))
            for lab in state.outcome_labels:
                world, msg = _send(world, node, step, lab, state.coded_edge, SHARED_KEY_ID)
                out.append(msg)

    elif isinstance(state, RelayState):
        g = cx(dim)
        if node == NodeId.V1:
            world = world.apply(node, g, (7, 9))
            world = world.apply(node, g, (8, 10))
            for lab in (9, 10):
                world, msg = _send(world, node, step, lab, EdgeId.E3, SHARED_KEY_ID)
                out.append(msg)
            state = replace(state, held=(7, 8))
        else:
            for lab in (11, 12):
                world = world.create(node, (lab,), basis_state(dim, 0))
            world = world.apply(node, g, (9, 11))
            world = world.apply(node, g, (10, 12))
            to_q1, to_q2 = ((9, 10), (11, 12)) if not state.swap_sinks else ((11, 12), (9, 10))
            for labels, edge in ((to_q1, EdgeId.E4), (to_q2, EdgeId.E5)):
                for lab in labels:
                    world, msg = _send(world, node, step, lab, edge, SHARED_KEY_ID)
                    out.append(msg)

    else:
        if step == 7:
            key = sink_decryption_key(state.keys, state.carriers, d)
            dec = u_gate(dim, key.p, key.q).dag()
            for lab in state.carriers:
                world = world.apply(node, dec, (lab,))
            state = replace(state, derived_key=key)
        else:
            results = []
            for lab in state.carriers:
                value, world = world.measure(node, lab, rng)
                results.append(value)
            a, b = results
            world = world.apply(node, u_gate(dim, a, b), (state.payload_label,))
            state = replace(state, measurement=(a, b), recovered=world.particle_state(state.payload_label))

    return state, tuple(out), world


@dataclass(frozen=True)
class GroupSnapshot:
    labels: tuple[int, ...]
    holders: tuple[str, ...]
    state: StateVector


@dataclass(frozen=True)
class StepSnapshot:
    step: int
    groups: tuple[GroupSnapshot, ...]

    def particle(self, label: int) -> StateVector:
        for g in self.groups:
            if g.labels == (label,):
                return g.state
        raise InvalidArgumentError(f"particle {label} is not a separate factor at step {self.step}")

    def labels(self) -> list[int]:
        return sorted(lab for g in self.groups for lab in g.labels)


@dataclass(frozen=True)
class ProtocolTrace:
    dim: Dimension
    phi: StateVector
    psi: StateVector
    keys: SharedKeys
    outcomes: tuple[Optional[BellOutcome], Optional[BellOutcome]]
    messages: tuple[Message, ...]
    snapshots: tuple[StepSnapshot, ...]
    nodes: Mapping[NodeId, NodeState]
    swap_sinks: bool = False
    tampered: tuple[int, ...] = ()

    @property
    def last_step(self) -> int:
        return self.snapshots[-1].step if self.snapshots else 1

    @property
    def complete(self) -> bool:
        return self.last_step == STEPS[-1]

    def message(self, label: int, step: Optional[int] = None) -> Message:
        for msg in self.messages:
            if msg.label == label and (step is None or msg.step == step):
                return msg
        raise InvalidArgumentError(f"no message carries particle {label}")

    def snapshot(self, step: int) -> StepSnapshot:
        for s in self.snapshots:
            if s.step == step:
                return s
        raise InvalidArgumentError(f"no snapshot for step {step}")

    @property
    def recovered(self) -> tuple[Optional[StateVector], Optional[StateVector]]:
        return self.nodes[NodeId.Q1].recovered, self.nodes[NodeId.Q2].recovered

    @property
    def measurements(self) -> tuple[Optional[tuple[int, int]], Optional[tuple[int, int]]]:
        return self.nodes[NodeId.Q1].measurement, self.nodes[NodeId.Q2].measurement


Tamper = Callable[[Message], Optional[StateVector]]


def _initial_nodes(keys, forced, swap_sinks) -> dict[NodeId, NodeState]:
    f1, f2 = forced if forced is not None else (None, None)
    q1_carriers, q2_carriers = ((9, 10), (11, 12)) if not swap_sinks else ((11, 12), (9, 10))
    return {
        NodeId.P1: SourceState(NodeId.P1, keys, 1, 3, 5, EdgeId.E6, (7, 8), EdgeId.E1, f1),
        NodeId.P2: SourceState(NodeId.P2, keys, 2, 6, 4, EdgeId.E7, (9, 10), EdgeId.E2, f2),
        NodeId.V1: RelayState(NodeId.V1),
        NodeId.V2: RelayState(NodeId.V2, swap_sinks),
        NodeId.Q1: SinkState(NodeId.Q1, keys, 4, EdgeId.E7, q1_carriers, EdgeId.E4),
        NodeId.Q2: SinkState(NodeId.Q2, keys, 5, EdgeId.E6, q2_carriers, EdgeId.E5),
    }


def initial_world(dim, phi: StateVector, psi: StateVector) -> World:
    """Inputs 1 and 2 plus the pre-shared pairs |psi(0,0)>_{3,4} and |psi(0,0)>_{5,6}."""
    dim = as_dimension(dim)
    pair = bell_state(dim, 0, 0)
    w = World(dim)
    w = w.create(NodeId.P1, (1,), phi)
    w = w.create(NodeId.P2, (2,), psi)
    w = w.create(NodeId.P1, (3, 4), pair, owners=(NodeId.P1, NodeId.P2))
    w = w.create(NodeId.P1, (5, 6), pair, owners=(NodeId.P1, NodeId.P2))
    return w


def _snapshot(step: int, world: World) -> StepSnapshot:
    groups = sorted(world.groups, key=lambda g: g.labels)
    return StepSnapshot(
        step,
        tuple(
            GroupSnapshot(g.labels, tuple(world.holders[lab].value for lab in g.labels), g.state)
            for g in groups
        ),
    )


def run_protocol(
    dim,
    phi: StateVector,
    psi: StateVector,
    keys: SharedKeys,
    rng: Optional[np.random.Generator] = None,
    forced_outcomes: Optional[tuple[BellOutcome, BellOutcome]] = None,
    *,
    swap_sinks: bool = False,
    tamper: Optional[Tamper] = None,
    last_step: int = 8,
) -> ProtocolTrace:
    """Run steps 2..``last_step`` of the protocol and record everything.

    Args:
        dim: qudit dimension.
        phi: P1's input, delivered to Q1.
        psi: P2's input, delivered to Q2.
        keys: the pre-shared (s1, s2).
        rng: generator for the Bell measurements (P1 first, then P2) and the
            sink measurements. A fresh ``default_rng(0)`` is used if omitted.
        forced_outcomes: (M1, M2) to inject instead of sampling.
        swap_sinks: send 11, 12 to Q1 and 9, 10 to Q2 instead.
        tamper: called on each message at delivery; a returned state
            replaces the particle's state.
        last_step: stop after this step, leaving an incomplete trace.
    """
    dim = as_dimension(dim)
    d = dim.d
    for name, s in (("phi", phi), ("psi", psi)):
        if s.d != d:
            raise DimensionMismatchError(f"{name} has d={s.d}, protocol runs at d={d}")
        if s.n_qudits != 1:
            raise InvalidArgumentError(f"{name} must be a single qudit")
    if not STEPS[0] - 1 <= last_step <= STEPS[-1]:
        raise InvalidArgumentError(f"last_step must be in 1..8, got {last_step}")
    keys = keys.reduced(d)
    if forced_outcomes is not None:
        forced_outcomes = tuple(BellOutcome(*m).reduced(d) for m in forced_outcomes)
    if rng is None:
        rng = np.random.default_rng(0)

    nodes = _initial_nodes(keys, forced_outcomes, swap_sinks)
    world = initial_world(dim, phi, psi)
    pending: list[Message] = []
    messages: list[Message] = []
    snapshots: list[StepSnapshot] = []
    tampered: list[int] = []

    for step in STEPS:
        if step > last_step:
            break
        for node in SCHEDULE[step]:
            inbox = tuple(m for m in pending if m.receiver == node and m.step < step)
            pending = [m for m in pending if m not in inbox]
            if tamper is not None:
                for msg in inbox:
                    new = tamper(msg)
                    if new is not None:
                        world = world.overwrite(msg.label, new)
                        tampered.append(msg.label)
            nodes[node], outbox, world = node_step(nodes[node], inbox, world, step, rng)
            pending.extend(outbox)
            messages.extend(outbox)
        snapshots.append(_snapshot(step, world))

    src1, src2 = nodes[NodeId.P1], nodes[NodeId.P2]
    return ProtocolTrace(
        dim=dim,
        phi=phi,
        psi=psi,
        keys=keys,
        outcomes=(src1.outcome, src2.outcome),
        messages=tuple(messages),
        snapshots=tuple(snapshots),
        nodes=dict(nodes),
        swap_sinks=swap_sinks,
        tampered=tuple(tampered),
    )


@dataclass(frozen=True)
class RecoveryReport:
    fidelity_q1: float
    fidelity_q2: float
    phase_q1: complex
    phase_q2: complex
    expected_phase_q1: complex
    expected_phase_q2: complex

    def phases_match(self, tol: float = DEFAULT_TOL) -> bool:
        return abs(self.phase_q1 - self.expected_phase_q1) <= tol and abs(self.phase_q2 - self.expected_phase_q2) <= tol

    def passes(self, tol: float = DEFAULT_TOL) -> bool:
        return self.fidelity_q1 >= 1 - tol and self.fidelity_q2 >= 1 - tol


def _phase(ref: StateVector, out: StateVector) -> complex:
    c = overlap(ref, out)
    return c / abs(c) if abs(c) > DEFAULT_TOL else 0j


def expected_phases(dim, m1: BellOutcome, m2: BellOutcome) -> tuple[complex, complex]:
    """omega^{-m12 m21} at Q1 and omega^{-m11 m22} at Q2."""
    dim = as_dimension(dim)
    return complex(dim.omega_pow(-m1.m2 * m2.m1)), complex(dim.omega_pow(-m1.m1 * m2.m2))


def verify_recovery(trace: ProtocolTrace) -> RecoveryReport:
    """Fidelities |<input|output>| and the global phases picked up at each sink."""
    out1, out2 = trace.recovered
    if not trace.complete or out1 is None or out2 is None:
        raise IncompleteTraceError(f"trace stops after step {trace.last_step}; sinks have not finished")
    e1, e2 = expected_phases(trace.dim, *trace.outcomes)
    return RecoveryReport(
        fidelity_q1=abs(overlap(trace.phi, out1)),
        fidelity_q2=abs(overlap(trace.psi, out2)),
        phase_q1=_phase(trace.phi, out1),
        phase_q2=_phase(trace.psi, out2),
        expected_phase_q1=e1,
        expected_phase_q2=e2,
    )
