"""Qudit gates and Bell states.

Conventions (d = qudit dimension, omega = e^{2 pi i/d}, tau = e^{i pi/d}):

    X |j>   = |j+1>
    Z |j>   = omega^j |j>
    Y       = -sum_j tau^{2j-1} |j+1><j|           (= -tau^{-1} X Z)
    H       = d^{-1/2} sum_{j,k} omega^{jk} |k><j|
    S       = sum_j tau^{(j-d+2) j} |j><j|
    T_t     = sum_j omega^{t_j} |j><j|               (d > 3 only)
    CX      = sum_j |j><j| (x) X^j
    U(a, b) = sum_j omega^{j a} |j><j+b|             (= Z^a X^{-b})
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .core import Dimension, StateVector, UnitaryMatrix, as_dimension
from .errors import InvalidArgumentError, UnsupportedDimensionError

__all__ = [
    "GateId",
    "TGateSpec",
    "UnitaryMatrix",
    "bell_state",
    "cx",
    "gadget_compatible_t",
    "gate_matrix",
    "hadamard",
    "identity",
    "pauli_x",
    "pauli_y",
    "pauli_z",
    "phase_s",
    "t_gate",
    "u_gate",
    "xz",
]


def identity(dim, n_qudits: int = 1) -> UnitaryMatrix:
    dim = as_dimension(dim)
    return UnitaryMatrix(dim, np.eye(dim.d**n_qudits))


@lru_cache(maxsize=4096)
def pauli_x(dim) -> UnitaryMatrix:
    dim = as_dimension(dim)
    return UnitaryMatrix(dim, np.roll(np.eye(dim.d), 1, axis=0))


@lru_cache(maxsize=4096)
def pauli_z(dim) -> UnitaryMatrix:
    dim = as_dimension(dim)
    return UnitaryMatrix(dim, np.diag(dim.omega_pow(np.arange(dim.d))))


@lru_cache(maxsize=4096)
def pauli_y(dim) -> UnitaryMatrix:
    dim = as_dimension(dim)
    d = dim.d
    m = np.zeros((d, d), dtype=complex)
    for j in range(d):
        m[(j + 1) % d, j] = -dim.tau_pow(2 * j - 1)
    return UnitaryMatrix(dim, m)


@lru_cache(maxsize=4096)
def hadamard(dim) -> UnitaryMatrix:
    dim = as_dimension(dim)
    j = np.arange(dim.d)
    return UnitaryMatrix(dim, dim.omega_pow(np.outer(j, j)) / np.sqrt(dim.d))


@lru_cache(maxsize=4096)
def phase_s(dim) -> UnitaryMatrix:
    dim = as_dimension(dim)
    j = np.arange(dim.d)
    return UnitaryMatrix(dim, np.diag(dim.tau_pow((j - dim.d + 2) * j)))


@dataclass(frozen=True)
class TGateSpec:
    """Exponent vector of a diagonal T_t gate, entries reduced mod d."""

    dim: Dimension
    t: tuple[int, ...]

    def __post_init__(self):
        dim = as_dimension(self.dim)
        object.__setattr__(self, "dim", dim)
        t = tuple(int(x) % dim.d for x in self.t)
        if len(t) != dim.d:
            raise InvalidArgumentError(f"T_t needs {dim.d} exponents, got {len(t)}")
        object.__setattr__(self, "t", t)


def t_gate(spec: TGateSpec) -> UnitaryMatrix:
    if spec.dim.d <= 3:
        raise UnsupportedDimensionError(f"T_t is only defined for d > 3, got d={spec.dim.d}")
    return UnitaryMatrix(spec.dim, np.diag(spec.dim.omega_pow(np.array(spec.t))))


def gadget_compatible_t(dim, slope: int = 0, offset: int = 0) -> TGateSpec:
    """A T_t for which T X T^dagger is proportional to X S^dagger.

    Only for such t does the S^p correction of the T-gate gadget cancel the
    non-Pauli part of T X^p T^dagger. The exponents satisfy
    t_{j+1} - t_j = slope - (j - d + 2) j / 2 (mod d). The increments must
    also sum to 0 mod d so the vector closes up, which holds exactly for odd
    d > 3 not divisible by 3.
    """
    dim = as_dimension(dim)
    d = dim.d
    if d <= 3:
        raise UnsupportedDimensionError(f"T_t is only defined for d > 3, got d={d}")
    if d % 2 == 0:
        raise UnsupportedDimensionError(f"no integer gadget-compatible T_t exists for even d={d}")
    steps = [slope - ((j - d + 2) * j) // 2 for j in range(d)]
    if sum(steps) % d:
        raise UnsupportedDimensionError(f"no integer gadget-compatible T_t exists for d={d}")
    t = [offset]
    for step in steps[:-1]:
        t.append(t[-1] + step)
    return TGateSpec(dim, tuple(t))


@lru_cache(maxsize=4096)
def cx(dim) -> UnitaryMatrix:
    """Two-qudit controlled-X: |j, k> -> |j, k + j>."""
    dim = as_dimension(dim)
    d = dim.d
    m = np.zeros((d * d, d * d))
    for j in range(d):
        for k in range(d):
            m[j * d + (j + k) % d, j * d + k] = 1.0
    return UnitaryMatrix(dim, m)


@lru_cache(maxsize=4096)
def u_gate(dim, m1: int, m2: int) -> UnitaryMatrix:
    """Teleportation correction U(m1, m2) = sum_j omega^{j m1} |j><j+m2|."""
    dim = as_dimension(dim)
    d = dim.d
    m = np.zeros((d, d), dtype=complex)
    for j in range(d):
        m[j, (j + m2) % d] = dim.omega_pow(j * m1)
    return UnitaryMatrix(dim, m)


@lru_cache(maxsize=4096)
def xz(dim, p: int, q: int) -> UnitaryMatrix:
    """The one-time-pad operator X^p Z^q."""
    dim = as_dimension(dim)
    d = dim.d
    m = np.zeros((d, d), dtype=complex)
    for j in range(d):
        m[(j + p) % d, j] = dim.omega_pow(q * j)
    return UnitaryMatrix(dim, m)


def bell_state(dim, m1: int, m2: int) -> StateVector:
    """|psi(m1, m2)> = d^{-1/2} sum_j omega^{j m1} |j, j + m2>."""
    dim = as_dimension(dim)
    d = dim.d
    amps = np.zeros(d * d, dtype=complex)
    for j in range(d):
        amps[j * d + (j + m2) % d] = dim.omega_pow(j * m1)
    return StateVector(dim, amps / np.sqrt(d))


@dataclass(frozen=True)
class GateId:
    """One element of the evaluable gate set {X, Y, Z, H, S, T_t, CX}."""

    name: str
    t: Optional[TGateSpec] = None

    NAMES = ("X", "Y", "Z", "H", "S", "T", "CX")

    def __post_init__(self):
        if self.name not in self.NAMES:
            raise InvalidArgumentError(f"unknown gate {self.name!r}")
        if (self.name == "T") != (self.t is not None):
            raise InvalidArgumentError("T needs a TGateSpec, and only T takes one")

    @property
    def arity(self) -> int:
        return 2 if self.name == "CX" else 1

    @classmethod
    def T(cls, spec: TGateSpec) -> GateId:
        return cls("T", spec)

    def __str__(self) -> str:
        if self.t is not None:
            return "T(" + ",".join(map(str, self.t.t)) + ")"
        return self.name


def gate_matrix(gate: GateId, dim) -> UnitaryMatrix:
    dim = as_dimension(dim)
    builders = {"X": pauli_x, "Y": pauli_y, "Z": pauli_z, "H": hadamard, "S": phase_s, "CX": cx}
    if gate.name == "T":
        if gate.t.dim.d != dim.d:
            raise InvalidArgumentError("T spec dimension differs from requested dimension")
        return t_gate(gate.t)
    return builders[gate.name](dim)

