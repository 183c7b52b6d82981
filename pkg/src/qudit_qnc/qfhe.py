"""Quantum one-time-pad homomorphic encryption: KeyGen, Enc, Eval, Dec.

Ciphertexts carry only an opaque ``key_id``. The evaluator never sees key
material, except through the T-gate gadget, which needs the secret p by
construction and takes it as an explicitly named ``secret_p``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .core import DensityMatrix, Dimension, StateVector, as_dimension, conjugate, apply_unitary, tensor
from .errors import InvalidArgumentError, MissingGadgetError
from .frame import (
    XZ,
    CXKeyPair,
    PauliKey,
    TGadgetRandomness,
    _check_convention,
    encryption_operator,
    u_to_xz,
    update_key,
)
from .gates import GateId, gate_matrix, phase_s, xz

Payload = Union[StateVector, DensityMatrix]


@dataclass(frozen=True)
class QfheKey:
    dim: Dimension
    key: Union[PauliKey, CXKeyPair]
    convention: str = XZ

    def __post_init__(self):
        dim = as_dimension(self.dim)
        object.__setattr__(self, "dim", dim)
        _check_convention(self.convention)
        if isinstance(self.key, CXKeyPair):
            object.__setattr__(self, "key", self.key.reduced(dim.d))
        elif isinstance(self.key, PauliKey):
            object.__setattr__(self, "key", self.key.reduced(dim.d))
        else:
            raise InvalidArgumentError(f"key must be a PauliKey or CXKeyPair, got {type(self.key).__name__}")

    @property
    def arity(self) -> int:
        return 2 if isinstance(self.key, CXKeyPair) else 1

    def single_keys(self) -> tuple[PauliKey, ...]:
        if isinstance(self.key, CXKeyPair):
            return (self.key.control, self.key.target)
        return (self.key,)

    def operator(self) -> np.ndarray:
        """The encryption unitary (a tensor product for two-qudit keys)."""
        m = np.ones((1, 1), dtype=complex)
        for k in self.single_keys():
            m = np.kron(m, encryption_operator(k, self.dim, self.convention).matrix)
        return m


@dataclass(frozen=True)
class Ciphertext:
    payload: Payload
    key_id: str = "k"

    @property
    def n_qudits(self) -> int:
        return self.payload.n_qudits


@dataclass(frozen=True)
class TGadget:
    """Evaluator-side input for T: fresh (r, r') plus the encryption secret p.

    ``secret_p`` is the X exponent of the XZ-form key (translate U-keys with
    ``frame.u_to_xz`` first).
    """

    randomness: TGadgetRandomness
    secret_p: int


def keygen(dim, arity: int, rng: np.random.Generator, convention: str = XZ) -> QfheKey:
    """Draw a uniform key; entries are taken from ``rng`` in the order p, q, s, t."""
    dim = as_dimension(dim)
    if arity not in (1, 2):
        raise InvalidArgumentError(f"arity must be 1 or 2, got {arity}")
    vals = [int(v) for v in rng.integers(0, dim.d, size=2 * arity)]
    if arity == 1:
        key = PauliKey(*vals)
    else:
        key = CXKeyPair(PauliKey(vals[0], vals[1]), PauliKey(vals[2], vals[3]))
    return QfheKey(dim, key, convention)


def _act(payload: Payload, m: np.ndarray) -> Payload:
    if isinstance(payload, StateVector):
        return apply_unitary(payload, m, range(payload.n_qudits))
    return conjugate(payload, m)


def _check_arity(key: QfheKey, payload: Payload) -> None:
    if payload.d != key.dim.d:
        raise InvalidArgumentError(f"key has d={key.dim.d}, payload has d={payload.d}")
    if payload.n_qudits != key.arity:
        raise InvalidArgumentError(f"key covers {key.arity} qudit(s), payload has {payload.n_qudits}")


def encrypt(key: QfheKey, plain: Payload, key_id: str = "k") -> Ciphertext:
    """Apply the one-time pad: E sigma E^dagger (or E|psi> for pure input)."""
    _check_arity(key, plain)
    return Ciphertext(_act(plain, key.operator()), key_id)


def decrypt(key: QfheKey, c: Ciphertext) -> Payload:
    """Undo the pad of ``key`` (normally an updated key)."""
    _check_arity(key, c.payload)
    return _act(c.payload, key.operator().conj().T)


def _as_density(p: Payload) -> DensityMatrix:
    return p.density() if isinstance(p, StateVector) else p


def evaluation_operator(gate: GateId, dim, t_gadget: Optional[TGadget] = None) -> np.ndarray:
    """The unitary the evaluator applies: G, or X^r Z^r' S^p T_t for T."""
    dim = as_dimension(dim)
    g = gate_matrix(gate, dim).matrix
    if gate.name != "T":
        return g
    r = t_gadget.randomness
    s_p = np.linalg.matrix_power(phase_s(dim).matrix, t_gadget.secret_p % dim.d)
    return xz(dim, r.r, r.r_prime).matrix @ s_p @ g


def evaluate(
    gate: GateId,
    c1: Ciphertext,
    c2: Optional[Ciphertext] = None,
    t_gadget: Optional[TGadget] = None,
) -> Ciphertext:
    """Apply ``gate`` to ciphertexts.

    CX takes either two single-qudit ciphertexts, which it joins into one,
    or a single two-qudit ciphertext (e.g. an entangled plaintext encrypted
    under a ``CXKeyPair``).
    """
    if gate.name == "T" and t_gadget is None:
        raise MissingGadgetError("T evaluation needs a TGadget")
    if gate.name != "T" and t_gadget is not None:
        raise InvalidArgumentError(f"a T gadget was given for {gate}")
    if gate.arity == 1 and c2 is not None:
        raise InvalidArgumentError(f"{gate} takes one ciphertext")
    if c2 is None:
        if c1.n_qudits != gate.arity:
            raise InvalidArgumentError(f"{gate} acts on a {gate.arity}-qudit ciphertext, got {c1.n_qudits}")
        payload = c1.payload
        key_id = c1.key_id
    else:
        if c1.n_qudits != 1 or c2.n_qudits != 1:
            raise InvalidArgumentError("CX joins two single-qudit ciphertexts")
        a, b = c1.payload, c2.payload
        if type(a) is not type(b):
            a, b = _as_density(a), _as_density(b)
        payload = tensor(a, b)
        key_id = f"{c1.key_id}|{c2.key_id}"
    return Ciphertext(_act(payload, evaluation_operator(gate, payload.dim, t_gadget)), key_id)


def updated_key(gate: GateId, key: QfheKey, t_gadget: Optional[TGadget] = None) -> QfheKey:
    """Decryption key after ``gate`` (certified rulebook)."""
    gadget = t_gadget.randomness if t_gadget is not None else None
    if gadget is not None:
        xz_p = key.key.p if key.convention == XZ else u_to_xz(key.key, key.dim.d).p
        if xz_p != t_gadget.secret_p % key.dim.d:
            raise InvalidArgumentError("gadget secret_p does not match the key")
    new = update_key(gate, key.key, gadget, key.convention, d=key.dim.d)
    return QfheKey(key.dim, new, key.convention)
