"""Dense linear algebra for registers of d-level systems.

Index layout is big-endian: in a register of n qudits the leftmost tensor
factor is the most significant base-d digit of the amplitude index.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Sequence, Union

import numpy as np

from .errors import (
    DegenerateInputError,
    DimensionMismatchError,
    EntangledStateError,
    InvalidArgumentError,
    InvalidGateError,
)

DEFAULT_TOL = 1e-9
GATE_CHECK_TOL = 1e-6


def _root_table(n: int) -> np.ndarray:
    table = np.exp(2j * np.pi * np.arange(n) / n)
    # snap the float noise on exact roots (e.g. exp(i*pi) = -1 + 1.2e-16j)
    table.real[np.abs(table.real) < 1e-15] = 0.0
    table.imag[np.abs(table.imag) < 1e-15] = 0.0
    return table


@dataclass(frozen=True)
class Dimension:
    """Qudit dimension with cached roots of unity.

    ``omega`` is the primitive d-th root e^{2 pi i / d}; ``tau`` is the
    principal 2d-th root e^{i pi / d}, used wherever a half-integer power of
    omega is needed (omega^{k/2} := tau^k).
    """

    d: int

    def __post_init__(self):
        if isinstance(self.d, bool) or not isinstance(self.d, (int, np.integer)):
            raise InvalidArgumentError(f"dimension must be an integer, got {self.d!r}")
        if self.d < 2:
            raise InvalidArgumentError(f"dimension must be >= 2, got {self.d}")
        object.__setattr__(self, "d", int(self.d))

    @cached_property
    def omega_table(self) -> np.ndarray:
        return _root_table(self.d)

    @cached_property
    def tau_table(self) -> np.ndarray:
        return _root_table(2 * self.d)

    @property
    def omega(self) -> complex:
        return complex(self.omega_table[1])

    @property
    def tau(self) -> complex:
        return complex(self.tau_table[1])

    def omega_pow(self, k):
        """omega**k with the exponent reduced mod d. Accepts ints or int arrays."""
        return self.omega_table[np.mod(k, self.d)]

    def tau_pow(self, k):
        """tau**k with the exponent reduced mod 2d."""
        return self.tau_table[np.mod(k, 2 * self.d)]


@lru_cache(maxsize=None)
def _dimension(d: int) -> Dimension:
    return Dimension(d)


def as_dimension(dim: Union[Dimension, int]) -> Dimension:
    if isinstance(dim, Dimension):
        return dim
    if isinstance(dim, bool) or not isinstance(dim, (int, np.integer)):
        raise InvalidArgumentError(f"dimension must be an integer, got {dim!r}")
    if dim < 2:
        raise InvalidArgumentError(f"dimension must be >= 2, got {dim}")
    return _dimension(int(dim))


def qudit_count(size: int, d: int) -> int:
    """Return n with d**n == size, or raise DimensionMismatchError."""
    n, rest = 0, size
    while rest > 1 and rest % d == 0:
        rest //= d
        n += 1
    if rest != 1 or n == 0:
        raise DimensionMismatchError(f"size {size} is not a positive power of d={d}")
    return n


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state of ``n_qudits`` qudits."""

    dim: Dimension
    amplitudes: np.ndarray
    n_qudits: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "dim", as_dimension(self.dim))
        amps = _frozen(self.amplitudes)
        if amps.ndim != 1:
            raise DimensionMismatchError("amplitudes must be one-dimensional")
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "n_qudits", qudit_count(amps.size, self.dim.d))
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > DEFAULT_TOL:
            raise DegenerateInputError(f"state is not normalized (norm={norm:.3g}); use make_state")

    @property
    def d(self) -> int:
        return self.dim.d

    def __len__(self) -> int:
        return self.amplitudes.size

    def density(self) -> DensityMatrix:
        return DensityMatrix(self.dim, np.outer(self.amplitudes, self.amplitudes.conj()))

    def __repr__(self) -> str:
        return f"StateVector(d={self.d}, n={self.n_qudits}, amplitudes={np.round(self.amplitudes, 6)})"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace operator."""

    dim: Dimension
    matrix: np.ndarray
    n_qudits: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "dim", as_dimension(self.dim))
        m = _frozen(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatchError(f"density matrix must be square, got shape {m.shape}")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "n_qudits", qudit_count(m.shape[0], self.dim.d))
        if not np.allclose(m, m.conj().T, atol=DEFAULT_TOL, rtol=0):
            raise InvalidArgumentError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > DEFAULT_TOL:
            raise InvalidArgumentError(f"density matrix trace is {np.trace(m).real:.3g}, not 1")
        if np.linalg.eigvalsh(m).min() < -DEFAULT_TOL:
            raise InvalidArgumentError("density matrix has a negative eigenvalue")

    @property
    def d(self) -> int:
        return self.dim.d

    @classmethod
    def maximally_mixed(cls, dim, n_qudits: int = 1) -> DensityMatrix:
        dim = as_dimension(dim)
        size = dim.d**n_qudits
        return cls(dim, np.eye(size) / size)


@dataclass(frozen=True, eq=False)
class UnitaryMatrix:
    """Unitary acting on ``n_qudits`` qudits."""

    dim: Dimension
    matrix: np.ndarray
    n_qudits: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "dim", as_dimension(self.dim))
        m = _frozen(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatchError(f"gate must be square, got shape {m.shape}")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "n_qudits", qudit_count(m.shape[0], self.dim.d))
        if not np.allclose(m.conj().T @ m, np.eye(m.shape[0]), atol=DEFAULT_TOL, rtol=0):
            raise InvalidGateError("matrix is not unitary")

    @property
    def d(self) -> int:
        return self.dim.d

    def dag(self) -> UnitaryMatrix:
        return UnitaryMatrix(self.dim, self.matrix.conj().T)

    def power(self, k: int) -> UnitaryMatrix:
        return UnitaryMatrix(self.dim, np.linalg.matrix_power(self.matrix, int(k)))

    def __matmul__(self, other: UnitaryMatrix) -> UnitaryMatrix:
        if not isinstance(other, UnitaryMatrix):
            return NotImplemented
        _check_same_dim(self, other)
        if self.matrix.shape != other.matrix.shape:
            raise DimensionMismatchError("gate shapes differ")
        return UnitaryMatrix(self.dim, self.matrix @ other.matrix)


QuantumObject = Union[StateVector, DensityMatrix, UnitaryMatrix]


def _check_same_dim(a, b) -> None:
    if a.dim.d != b.dim.d:
        raise DimensionMismatchError(f"dimensions differ: d={a.dim.d} vs d={b.dim.d}")


def make_state(dim, amplitudes: Sequence[complex]) -> StateVector:
    """Build a normalized state, dividing the amplitudes by their norm."""
    dim = as_dimension(dim)
    amps = np.asarray(amplitudes, dtype=complex).ravel()
    qudit_count(amps.size, dim.d)
    norm = np.linalg.norm(amps)
    if norm == 0.0:
        raise DegenerateInputError("all amplitudes are zero")
    return StateVector(dim, amps / norm)


def basis_state(dim, index: int, n_qudits: int = 1) -> StateVector:
    dim = as_dimension(dim)
    size = dim.d**n_qudits
    if not 0 <= index < size:
        raise InvalidArgumentError(f"basis index {index} out of range for {n_qudits} qudit(s) at d={dim.d}")
    amps = np.zeros(size, dtype=complex)
    amps[index] = 1.0
    return StateVector(dim, amps)


def tensor(*items: QuantumObject) -> QuantumObject:
    """Kronecker product, leftmost operand first (big-endian)."""
    if not items:
        raise InvalidArgumentError("tensor needs at least one operand")
    first = items[0]
    kind = type(first)
    for other in items[1:]:
        if type(other) is not kind:
            raise InvalidArgumentError("tensor operands must all be the same kind")
        _check_same_dim(first, other)
    if kind is StateVector:
        out = items[0].amplitudes
        for other in items[1:]:
            out = np.kron(out, other.amplitudes)
        return StateVector(first.dim, out)
    out = first.matrix
    for other in items[1:]:
        out = np.kron(out, other.matrix)
    return kind(first.dim, out)


def _check_targets(targets: Sequence[int], n: int) -> list[int]:
    targets = [int(t) for t in targets]
    if len(set(targets)) != len(targets):
        raise InvalidArgumentError(f"targets must be distinct, got {targets}")
    for t in targets:
        if not 0 <= t < n:
            raise InvalidArgumentError(f"target {t} out of range for {n} qudits")
    return targets


def _gate_array(u, d: int) -> np.ndarray:
    if isinstance(u, UnitaryMatrix):
        if u.d != d:
            raise DimensionMismatchError(f"gate has d={u.d}, register has d={d}")
        return u.matrix
    m = np.asarray(u, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidGateError(f"gate must be a square matrix, got shape {m.shape}")
    if not np.allclose(m.conj().T @ m, np.eye(m.shape[0]), atol=GATE_CHECK_TOL, rtol=0):
        raise InvalidGateError("matrix is not unitary")
    return m


def _apply_axes(t: np.ndarray, gate: np.ndarray, axes: list[int], d: int) -> np.ndarray:
    k = len(axes)
    g = gate.reshape((d,) * (2 * k))
    out = np.tensordot(g, t, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(out, list(range(k)), axes)


def apply_unitary(state: StateVector, u, targets: Sequence[int]) -> StateVector:
    """Apply a k-qudit gate to the listed qudits of ``state``."""
    d, n = state.d, state.n_qudits
    m = _gate_array(u, d)
    targets = _check_targets(targets, n)
    if m.shape[0] != d ** len(targets):
        raise DimensionMismatchError(
            f"gate acts on {qudit_count(m.shape[0], d)} qudits, {len(targets)} targets given"
        )
    psi = state.amplitudes.reshape((d,) * n)
    out = _apply_axes(psi, m, targets, d)
    return StateVector(state.dim, out.reshape(-1))


def conjugate(rho: DensityMatrix, u, targets: Sequence[int] | None = None) -> DensityMatrix:
    """Return U rho U^dagger with U embedded on ``targets`` (default: all qudits)."""
    d, n = rho.d, rho.n_qudits
    m = _gate_array(u, d)
    targets = list(range(n)) if targets is None else _check_targets(targets, n)
    if m.shape[0] != d ** len(targets):
        raise DimensionMismatchError("gate size does not match the number of targets")
    t = rho.matrix.reshape((d,) * (2 * n))
    t = _apply_axes(t, m, targets, d)
    t = _apply_axes(t, m.conj(), [n + a for a in targets], d)
    size = d**n
    return DensityMatrix(rho.dim, t.reshape(size, size))


def partial_trace(rho: DensityMatrix | StateVector, keep: Sequence[int]) -> DensityMatrix:
    """Reduced state on ``keep``, in the order given."""
    if isinstance(rho, StateVector):
        rho = rho.density()
    d, n = rho.d, rho.n_qudits
    keep = list(keep)
    if not keep:
        raise InvalidArgumentError("keep must name at least one qudit")
    keep = _check_targets(keep, n)
    letters = string.ascii_letters
    rows = list(letters[:n])
    cols = [letters[n + i] if i in keep else rows[i] for i in range(n)]
    out = "".join(rows[i] for i in keep) + "".join(cols[i] for i in keep)
    spec = "".join(rows) + "".join(cols) + "->" + out
    t = np.einsum(spec, rho.matrix.reshape((d,) * (2 * n)))
    size = d ** len(keep)
    return DensityMatrix(rho.dim, t.reshape(size, size))


def permute_qudits(state: StateVector, order: Sequence[int]) -> StateVector:
    """Reorder qudits so that new qudit i is old qudit ``order[i]``."""
    d, n = state.d, state.n_qudits
    order = _check_targets(order, n)
    if len(order) != n:
        raise InvalidArgumentError(f"order must list all {n} qudits")
    psi = state.amplitudes.reshape((d,) * n).transpose(order)
    return StateVector(state.dim, psi.reshape(-1))


def overlap(a: StateVector, b: StateVector) -> complex:
    """Inner product <a|b>."""
    _check_same_dim(a, b)
    if a.n_qudits != b.n_qudits:
        raise DimensionMismatchError("states have different qudit counts")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def equal_up_to_global_phase(a: StateVector, b: StateVector, tol: float = DEFAULT_TOL) -> bool:
    return abs(overlap(a, b)) >= 1.0 - tol


def _matrix_of(x) -> np.ndarray:
    if isinstance(x, (DensityMatrix, UnitaryMatrix)):
        return x.matrix
    if isinstance(x, StateVector):
        return x.density().matrix
    return np.asarray(x, dtype=complex)


def trace_distance(a, b) -> float:
    """Half the trace norm of a - b, from the eigenvalues of the difference."""
    ma, mb = _matrix_of(a), _matrix_of(b)
    if ma.shape != mb.shape:
        raise DimensionMismatchError(f"shapes differ: {ma.shape} vs {mb.shape}")
    diff = ma - mb
    off = diff - np.diag(np.diag(diff))
    if not off.any():
        return float(0.5 * np.abs(np.diag(diff)).sum())
    return float(0.5 * np.abs(np.linalg.eigvalsh(diff)).sum())


def computational_probabilities(state: StateVector, target: int) -> np.ndarray:
    d, n = state.d, state.n_qudits
    (target,) = _check_targets([target], n)
    psi = np.moveaxis(state.amplitudes.reshape((d,) * n), target, 0).reshape(d, -1)
    return np.sum(np.abs(psi) ** 2, axis=1)


def sample_index(probs: np.ndarray, rng: np.random.Generator) -> int:
    """Draw one index from ``probs`` using a single uniform from ``rng``."""
    cdf = np.cumsum(probs)
    idx = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    idx = min(idx, len(probs) - 1)
    while probs[idx] <= 0.0 and idx > 0:
        idx -= 1
    return idx


def measure_computational(
    state: StateVector, target: int, rng: np.random.Generator
) -> tuple[int, StateVector]:
    """Measure one qudit in the computational basis.

    The measured qudit stays in the register, collapsed onto the outcome.
    """
    d, n = state.d, state.n_qudits
    probs = computational_probabilities(state, target)
    outcome = sample_index(probs, rng)
    psi = state.amplitudes.reshape((d,) * n).copy()
    mask = np.zeros(d, dtype=bool)
    mask[outcome] = True
    index = [slice(None)] * n
    index[target] = ~mask
    psi[tuple(index)] = 0.0
    psi = psi.reshape(-1)
    return outcome, StateVector(state.dim, psi / np.linalg.norm(psi))


def split_first(state: StateVector, hint: StateVector | None = None) -> tuple[StateVector, StateVector]:
    """Factor ``state`` as (first qudit) x (rest).

    Raises EntangledStateError if the first qudit is entangled with the rest.
    The free global phase is put on the rest: the first factor is chosen so
    that <hint|first> is real and positive (or, without a usable hint, so its
    largest amplitude is real and positive).
    """
    d, n = state.d, state.n_qudits
    if n < 2:
        raise InvalidArgumentError("need at least two qudits to split")
    m = state.amplitudes.reshape(d, -1)
    u, s, vh = np.linalg.svd(m)
    if s.size > 1 and s[1] > DEFAULT_TOL:
        raise EntangledStateError(f"first qudit is entangled (second Schmidt coefficient {s[1]:.3g})")
    first = u[:, 0]
    rest = s[0] * vh[0]
    ref = np.vdot(hint.amplitudes, first) if hint is not None else 0.0
    if abs(ref) <= DEFAULT_TOL:
        ref = first[np.argmax(np.abs(first) > np.abs(first).max() - DEFAULT_TOL)]
    phase = ref / abs(ref)
    first = first * np.conj(phase)
    rest = rest * phase
    return StateVector(state.dim, first), StateVector(state.dim, rest / np.linalg.norm(rest))
