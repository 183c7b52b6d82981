"""Qudit quantum homomorphic encryption and butterfly-network coding simulator."""

from .core import (
    DensityMatrix,
    Dimension,
    StateVector,
    UnitaryMatrix,
    apply_unitary,
    basis_state,
    equal_up_to_global_phase,
    make_state,
    measure_computational,
    partial_trace,
    tensor,
    trace_distance,
)
from .errors import QuditError
from .frame import CXKeyPair, PauliKey, TGadgetRandomness, update_key, validate_rule
from .gates import GateId, TGateSpec
from .teleport import BellOutcome, bell_measure, teleport

__version__ = "0.1.0"

__all__ = [
    "BellOutcome",
    "CXKeyPair",
    "DensityMatrix",
    "Dimension",
    "GateId",
    "PauliKey",
    "QuditError",
    "StateVector",
    "TGadgetRandomness",
    "TGateSpec",
    "UnitaryMatrix",
    "apply_unitary",
    "basis_state",
    "bell_measure",
    "equal_up_to_global_phase",
    "make_state",
    "measure_computational",
    "partial_trace",
    "teleport",
    "tensor",
    "trace_distance",
    "update_key",
    "validate_rule",
]
