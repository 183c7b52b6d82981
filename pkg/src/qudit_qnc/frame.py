"""Key-update rules for evaluating gates on one-time-padded qudits.

A ciphertext X^p Z^q sigma (X^p Z^q)^dagger that is acted on by a gate G
becomes E' (G sigma G^dagger) E'^dagger for some Pauli E' fixed by the
commutation of G past X^p Z^q. The map (p, q) -> key of E' is the key update.

Two rulebooks live here:

* ``paper_update`` transcribes the rules as originally published.
* ``update_key`` is the certified rulebook. Every rule in it is checked
  against a brute-force oracle (``validate_rule``) that enumerates all keys,
  compares operator identities up to global phase, searches the Pauli group
  for the update that actually works, and independently verifies
  Dec(Eval(Enc(sigma))) = G sigma G^dagger on random density matrices.

The published rules for H and CX carry sign errors that only show for d > 2,
and the T-gate rule is only right for p in {0, 1}; the oracle reports those
cases as corrected.

Keys come in two conventions. ``"xz"`` keys (p, q) encrypt with X^p Z^q;
``"u"`` keys (a, b) encrypt with U(a, b) = Z^a X^{-b}. ``u_to_xz`` and
``xz_to_u`` are the only translation between them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Union

import numpy as np

from .core import DEFAULT_TOL, UnitaryMatrix, as_dimension
from .errors import InvalidArgumentError, MissingGadgetError
from .gates import (
    GateId,
    TGateSpec,
    gadget_compatible_t,
    gate_matrix,
    phase_s,
    t_gate,
    u_gate,
    xz,
)

XZ = "xz"
U = "u"
CONVENTIONS = (XZ, U)


@dataclass(frozen=True)
class PauliKey:
    p: int
    q: int

    def reduced(self, d: int) -> PauliKey:
        return PauliKey(self.p % d, self.q % d)

    def __iter__(self):
        return iter((self.p, self.q))


@dataclass(frozen=True)
class CXKeyPair:
    control: PauliKey
    target: PauliKey

    def reduced(self, d: int) -> CXKeyPair:
        return CXKeyPair(self.control.reduced(d), self.target.reduced(d))


@dataclass(frozen=True)
class TGadgetRandomness:
    """The (r, r') pair of the T-gate evaluation operator X^r Z^r' S^p T_t."""

    r: int
    r_prime: int


AnyKey = Union[PauliKey, CXKeyPair]


def _check_convention(convention: str) -> None:
    if convention not in CONVENTIONS:
        raise InvalidArgumentError(f"unknown key convention {convention!r}")


def u_to_xz(key: PauliKey, d: int) -> PauliKey:
    """U(a, b) = omega^{-ab} X^{-b} Z^a, so a U-key (a, b) is the XZ-key (-b, a)."""
    return PauliKey(-key.q, key.p).reduced(d)


def xz_to_u(key: PauliKey, d: int) -> PauliKey:
    """Inverse of ``u_to_xz``: X^p Z^q is proportional to U(q, -p)."""
    return PauliKey(key.q, -key.p).reduced(d)


def encryption_operator(key: PauliKey, dim, convention: str = XZ) -> UnitaryMatrix:
    _check_convention(convention)
    if convention == XZ:
        return xz(dim, key.p, key.q)
    return u_gate(dim, key.p, key.q)


def _map_key(key: AnyKey, fn) -> AnyKey:
    if isinstance(key, CXKeyPair):
        return CXKeyPair(fn(key.control), fn(key.target))
    return fn(key)


def _check_key_arity(gate: GateId, key: AnyKey) -> None:
    if gate.arity == 2 and not isinstance(key, CXKeyPair):
        raise InvalidArgumentError("CX needs a CXKeyPair")
    if gate.arity == 1 and not isinstance(key, PauliKey):
        raise InvalidArgumentError(f"{gate} needs a single PauliKey")


def _check_gadget(gate: GateId, gadget: Optional[TGadgetRandomness]) -> None:
    if gate.name == "T" and gadget is None:
        raise MissingGadgetError("the T gate needs gadget randomness (r, r')")
    if gate.name != "T" and gadget is not None:
        raise InvalidArgumentError(f"gadget randomness only applies to T, not {gate}")


def _in_xz(update_xz):
    """Lift an XZ-convention rule to accept either convention."""

    def rule(gate, key, gadget=None, convention=XZ, *, d):
        _check_convention(convention)
        _check_key_arity(gate, key)
        _check_gadget(gate, gadget)
        if convention == U:
            key = _map_key(key, lambda k: u_to_xz(k, d))
        out = _map_key(update_xz(gate, key, gadget, d), lambda k: k.reduced(d))
        if convention == U:
            out = _map_key(out, lambda k: xz_to_u(k, d))
        return out

    return rule


def _paper_xz(gate: GateId, key: AnyKey, gadget, d: int) -> AnyKey:
    if gate.name in ("X", "Y", "Z"):
        return key
    if gate.name == "H":
        return PauliKey(key.q, key.p)
    if gate.name == "S":
        return PauliKey(key.p, key.p + key.q)
    if gate.name == "T":
        return PauliKey(key.p + gadget.r, key.p + key.q + gadget.r_prime)
    (p, q), (s, t) = key.control, key.target
    return CXKeyPair(PauliKey(p, q + t), PauliKey(p + s, t))


def _certified_xz(gate: GateId, key: AnyKey, gadget, d: int) -> AnyKey:
    if gate.name in ("X", "Y", "Z"):
        return key
    if gate.name == "H":
        # H X H^dag = Z and H Z H^dag = X^{-1}
        return PauliKey(-key.q, key.p)
    if gate.name == "S":
        return PauliKey(key.p, key.p + key.q)
    if gate.name == "T":
        if not is_gadget_compatible(gate.t):
            raise InvalidArgumentError(
                f"no Pauli key update exists for {gate}: T X T^dag is not X S^dag up to phase"
            )
        p = key.p
        return PauliKey(p + gadget.r, key.q + gadget.r_prime + p * (p + 1) // 2)
    # CX (Z^q (x) 1) CX^dag unchanged, CX (1 (x) Z^t) CX^dag = Z^{-t} (x) Z^t
    (p, q), (s, t) = key.control, key.target
    return CXKeyPair(PauliKey(p, q - t), PauliKey(p + s, t))


_paper_rule = _in_xz(_paper_xz)
_certified_rule = _in_xz(_certified_xz)


def paper_update(
    gate: GateId, key: AnyKey, gadget: Optional[TGadgetRandomness] = None, convention: str = XZ, *, d: int
) -> AnyKey:
    """Decryption key after evaluating ``gate``, per the published rulebook.

    For CX in the U convention this is control (p+s, q), target (s, q+t),
    which is the XZ rule translated through ``u_to_xz``.
    """
    return _paper_rule(gate, key, gadget, convention, d=d)


def update_key(
    gate: GateId, key: AnyKey, gadget: Optional[TGadgetRandomness] = None, convention: str = XZ, *, d: int
) -> AnyKey:
    """Decryption key after evaluating ``gate`` (certified rulebook).

    XZ convention, all arithmetic mod d:

    ========  =========================================
    X, Y, Z   (p, q)
    H         (-q, p)
    S         (p, p + q)
    T_t       (p + r, q + r' + p(p+1)/2)
    CX        control (p, q - t), target (p + s, t)
    ========  =========================================

    The T rule holds for gadget-compatible T_t only (see
    ``gates.gadget_compatible_t``); other T_t admit no Pauli update and raise.
    """
    return _certified_rule(gate, key, gadget, convention, d=d)


PAPER_FORMULAS = {
    "X": "(p, q)",
    "Y": "(p, q)",
    "Z": "(p, q)",
    "H": "(q, p)",
    "S": "(p, p+q)",
    "T": "(p+r, p+q+r')",
    "CX": "control (p, q+t), target (p+s, t)",
}
CERTIFIED_FORMULAS = {
    "X": "(p, q)",
    "Y": "(p, q)",
    "Z": "(p, q)",
    "H": "(-q, p)",
    "S": "(p, p+q)",
    "T": "(p+r, q+r'+p(p+1)/2)",
    "CX": "control (p, q-t), target (p+s, t)",
}


def is_gadget_compatible(spec: TGateSpec) -> bool:
    """True iff T X T^dagger is proportional to X S^dagger."""
    d = spec.dim.d
    if d <= 3:
        return False
    tm = t_gate(spec).matrix
    x = xz(d, 1, 0).matrix
    lhs = tm @ x @ tm.conj().T
    rhs = x @ phase_s(d).matrix.conj().T
    return phase_relation(lhs, rhs) is not None


def phase_relation(a: np.ndarray, b: np.ndarray, tol: float = DEFAULT_TOL) -> Optional[complex]:
    """Return c with b = c a (|c| = 1), or None if no such phase exists."""
    a = np.asarray(a)
    b = np.asarray(b)
    i = np.unravel_index(np.argmax(np.abs(a)), a.shape)
    if abs(a[i]) <= tol:
        return None
    c = b[i] / a[i]
    if abs(abs(c) - 1.0) > tol or not np.allclose(b, c * a, atol=tol, rtol=0):
        return None
    return complex(c)


def _evaluation_operator(gate: GateId, key: AnyKey, gadget, dim) -> np.ndarray:
    g = gate_matrix(gate, dim).matrix
    if gate.name != "T":
        return g
    s_p = np.linalg.matrix_power(phase_s(dim).matrix, key.p % dim.d)
    return xz(dim, gadget.r, gadget.r_prime).matrix @ s_p @ g


def _enc_matrix(key: AnyKey, dim, convention: str) -> np.ndarray:
    if isinstance(key, CXKeyPair):
        return np.kron(
            encryption_operator(key.control, dim, convention).matrix,
            encryption_operator(key.target, dim, convention).matrix,
        )
    return encryption_operator(key, dim, convention).matrix


def conjugation_identity(
    gate: GateId,
    key: AnyKey,
    gadget: Optional[TGadgetRandomness] = None,
    dim=None,
    convention: str = XZ,
    rule: str = "paper",
) -> tuple[UnitaryMatrix, UnitaryMatrix]:
    """Both sides of the commutation relation behind a key update.

    lhs = W E_key and rhs = E_key' G, where W is the evaluation operator
    (G itself, or X^r Z^r' S^p T_t for T), E is the encryption operator and
    key' comes from the chosen rulebook (``"paper"`` or ``"certified"``).
    The update is correct iff lhs and rhs agree up to a global phase.
    """
    dim = as_dimension(dim)
    d = dim.d
    _check_key_arity(gate, key)
    _check_gadget(gate, gadget)
    xz_key = key if convention == XZ else _map_key(key, lambda k: u_to_xz(k, d))
    update = paper_update if rule == "paper" else update_key
    new_key = update(gate, key, gadget, convention, d=d)
    w = _evaluation_operator(gate, xz_key, gadget, dim)
    g = gate_matrix(gate, dim).matrix
    lhs = w @ _enc_matrix(key, dim, convention)
    rhs = _enc_matrix(new_key, dim, convention) @ g
    return UnitaryMatrix(dim, lhs), UnitaryMatrix(dim, rhs)


@lru_cache(maxsize=None)
def _pauli_basis(d: int, n: int) -> tuple[np.ndarray, tuple]:
    singles = [(p, q) for p in range(d) for q in range(d)]
    labels = tuple(itertools.product(singles, repeat=n))
    mats = []
    for combo in labels:
        m = np.ones((1, 1))
        for p, q in combo:
            m = np.kron(m, xz(d, p, q).matrix)
        mats.append(m.ravel())
    return np.conj(np.array(mats)), labels


def pauli_decompose(op: np.ndarray, d: int) -> Optional[tuple[PauliKey, ...]]:
    """XZ keys of the Pauli product proportional to ``op``, or None."""
    size = op.shape[0]
    n = round(np.log(size) / np.log(d))
    basis, labels = _pauli_basis(d, n)
    weights = np.abs(basis @ op.ravel()) / size
    i = int(np.argmax(weights))
    if abs(weights[i] - 1.0) > 1e-7:
        return None
    return tuple(PauliKey(p, q) for p, q in labels[i])


def random_density_matrix(d_total: int, rng: np.random.Generator) -> np.ndarray:
    """Full-rank random density matrix from a Ginibre draw."""
    g = rng.standard_normal((d_total, d_total)) + 1j * rng.standard_normal((d_total, d_total))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def homomorphism_holds(
    gate: GateId,
    key: AnyKey,
    decryption_key: AnyKey,
    gadget: Optional[TGadgetRandomness],
    dim,
    sigmas: list[np.ndarray],
    convention: str = XZ,
    tol: float = DEFAULT_TOL,
) -> bool:
    """Check Dec_{key'}(Eval(G, Enc_key(sigma))) == G sigma G^dagger on each sigma."""
    dim = as_dimension(dim)
    d = dim.d
    xz_key = key if convention == XZ else _map_key(key, lambda k: u_to_xz(k, d))
    enc = _enc_matrix(key, dim, convention)
    dec = _enc_matrix(decryption_key, dim, convention).conj().T
    w = _evaluation_operator(gate, xz_key, gadget, dim)
    g = gate_matrix(gate, dim).matrix
    total = dec @ w @ enc
    for sigma in sigmas:
        got = total @ sigma @ total.conj().T
        want = g @ sigma @ g.conj().T
        if not np.allclose(got, want, atol=tol, rtol=0):
            return False
    return True


@dataclass(frozen=True)
class RuleReport:
    """Outcome of exhaustively checking one gate's key update at one d."""

    gate: str
    d: int
    convention: str
    status: str  # confirmed | corrected | uncorrectable | unsupported
    holds_exactly: bool
    holds_up_to_phase: bool
    residual_phase: complex
    paper_homomorphic: bool
    paper_update: str
    corrected_update: Optional[str]
    certified_homomorphic: bool
    cases_checked: int
    notes: tuple[str, ...] = field(default=())

    @property
    def has_working_update(self) -> bool:
        return self.status in ("confirmed", "corrected")


def _all_keys(gate: GateId, d: int):
    singles = [PauliKey(p, q) for p in range(d) for q in range(d)]
    if gate.arity == 2:
        return [CXKeyPair(a, b) for a in singles for b in singles]
    return singles


def default_t_samples(dim) -> list[TGateSpec]:
    """Gadget-compatible T_t vectors used when validating the T rule."""
    d = as_dimension(dim).d
    if d <= 3 or d % 2 == 0 or d % 3 == 0:
        return []
    return [gadget_compatible_t(d, slope, offset) for slope, offset in ((0, 0), (1, 0), (d - 1, 2))]


def validate_rule(
    gate_name: str,
    dim,
    convention: str = XZ,
    t_samples: Optional[list[TGateSpec]] = None,
    n_states: int = 3,
    seed: int = 0,
) -> RuleReport:
    """Exhaustively check the published and certified updates for one gate.

    For T the published rule is checked over ``t_samples`` (default:
    ``default_t_samples``) and all (p, q, r, r'); a few generic random t
    vectors are also tried and reported in ``notes``.
    """
    dim = as_dimension(dim)
    d = dim.d
    _check_convention(convention)
    rng = np.random.default_rng(seed)
    if gate_name == "T":
        if d <= 3:
            return RuleReport(
                "T", d, convention, "unsupported", False, False, 1.0 + 0j, False,
                PAPER_FORMULAS["T"], None, False, 0,
                ("T_t is only defined for d > 3",),
            )
        specs = default_t_samples(dim) if t_samples is None else list(t_samples)
        generic = [TGateSpec(dim, tuple(rng.integers(0, d, size=d))) for _ in range(3)]
        gates = [GateId.T(s) for s in specs]
    else:
        gates = [GateId(gate_name)]
        generic = []

    notes: list[str] = []
    if gate_name == "T" and not gates:
        notes.append(f"no integer gadget-compatible T_t exists at d={d}")

    size = d ** (2 if gate_name == "CX" else 1)
    sigmas = [random_density_matrix(size, rng) for _ in range(n_states)]
    gadgets = (
        [TGadgetRandomness(r, rp) for r in range(d) for rp in range(d)] if gate_name == "T" else [None]
    )

    holds_exactly = holds_phase = paper_hom = certified_hom = True
    correctable = True
    residual = 1.0 + 0j
    cases = 0
    for gate in gates:
        for key in _all_keys(gate, d):
            for gadget in gadgets:
                cases += 1
                lhs, rhs = conjugation_identity(gate, key, gadget, dim, convention)
                c = phase_relation(lhs.matrix, rhs.matrix)
                if c is None:
                    holds_phase = holds_exactly = False
                elif abs(c - 1.0) > DEFAULT_TOL:
                    if holds_exactly:
                        residual = c
                    holds_exactly = False
                paper_key = paper_update(gate, key, gadget, convention, d=d)
                if not homomorphism_holds(gate, key, paper_key, gadget, dim, sigmas, convention):
                    paper_hom = False

                # oracle: which Pauli does W E_key G^dagger equal, if any?
                xz_key = key if convention == XZ else _map_key(key, lambda k: u_to_xz(k, d))
                w = _evaluation_operator(gate, xz_key, gadget, dim)
                residual_op = w @ _enc_matrix(key, dim, convention) @ gate_matrix(gate, dim).matrix.conj().T
                found = pauli_decompose(residual_op, d)
                if found is None:
                    correctable = False
                    certified_hom = False
                    continue
                found_key = found[0] if gate.arity == 1 else CXKeyPair(*found)
                if convention == U:
                    found_key = _map_key(found_key, lambda k: xz_to_u(k, d))
                cert = update_key(gate, key, gadget, convention, d=d)
                if cert != found_key or not homomorphism_holds(gate, key, cert, gadget, dim, sigmas, convention):
                    certified_hom = False

    if not gates:
        correctable = certified_hom = paper_hom = holds_phase = holds_exactly = False

    for spec in generic:
        ok = is_gadget_compatible(spec)
        notes.append(f"generic T{spec.t}: {'admits' if ok else 'no'} Pauli key update")

    if gate_name == "S":
        literal_ok = all(
            phase_relation(
                (phase_s(dim).matrix @ xz(dim, p, q).matrix),
                xz(dim, q, p + q).matrix @ phase_s(dim).matrix,
            )
            is not None
            for p in range(d)
            for q in range(d)
        )
        notes.append(
            "S X^p Z^q ~ X^q Z^(p+q) S: " + ("holds" if literal_ok else "fails; X^p Z^(p+q) S is the correct right side")
        )

    if holds_phase and paper_hom:
        status = "confirmed"
    elif correctable and certified_hom:
        status = "corrected"
    else:
        status = "uncorrectable"
    return RuleReport(
        gate=gate_name,
        d=d,
        convention=convention,
        status=status,
        holds_exactly=holds_exactly,
        holds_up_to_phase=holds_phase,
        residual_phase=residual,
        paper_homomorphic=paper_hom,
        paper_update=PAPER_FORMULAS[gate_name],
        corrected_update=CERTIFIED_FORMULAS[gate_name] if status == "corrected" else None,
        certified_homomorphic=certified_hom,
        cases_checked=cases,
        notes=tuple(notes),
    )


@dataclass(frozen=True)
class TranslationReport:
    """How U(a, b) relates to (X^dagger)^b Z^a at one d."""

    d: int
    exact: bool
    up_to_phase: bool
    phase_is_omega_minus_ab: bool
    reordered_exact: bool


def check_u_translation(dim) -> TranslationReport:
    """Compare U(a, b) with (X^dagger)^b Z^a and with Z^a (X^dagger)^b for all a, b."""
    dim = as_dimension(dim)
    d = dim.d
    exact = phase_ok = omega_ok = reordered = True
    for a in range(d):
        for b in range(d):
            u = u_gate(dim, a, b).matrix
            xdag_b = xz(dim, -b % d, 0).matrix
            z_a = xz(dim, 0, a).matrix
            lhs = xdag_b @ z_a
            exact &= bool(np.allclose(u, lhs, atol=DEFAULT_TOL, rtol=0))
            c = phase_relation(lhs, u)
            phase_ok &= c is not None
            omega_ok &= c is not None and abs(c - dim.omega_pow(-a * b)) < DEFAULT_TOL
            reordered &= bool(np.allclose(u, z_a @ xdag_b, atol=DEFAULT_TOL, rtol=0))
    return TranslationReport(d, exact, phase_ok, omega_ok, reordered)


def cx_forms_agree(dim, rule: str = "paper") -> bool:
    """Check the U-form and XZ-form CX updates agree under ``u_to_xz``.

    The comparison is made on operators: for every U-key pair, the
    encryption operator after the U-form update must equal, up to phase,
    the one after translating to XZ, updating there, and reading off X^p Z^q.
    """
    dim = as_dimension(dim)
    d = dim.d
    update = paper_update if rule == "paper" else update_key
    g = GateId("CX")
    for key in _all_keys(g, d):
        via_u = update(g, key, None, U, d=d)
        xz_key = _map_key(key, lambda k: u_to_xz(k, d))
        via_xz = update(g, xz_key, None, XZ, d=d)
        a = _enc_matrix(via_u, dim, U)
        b = _enc_matrix(via_xz, dim, XZ)
        if phase_relation(a, b) is None:
            return False
    return True

