"""Two-qubit state simulation: explicit-matrix reference plus a batched fast path."""
from . import batch
from .states import (
    BASIS_STATES,
    BELL_STATES,
    EPS,
    MINUS,
    ONE,
    PAULI_MATRICES,
    PLUS,
    ZERO,
    Basis,
    BellLabel,
    MeasurementOutcome,
    PauliOp,
    apply_pauli,
    apply_pauli_single,
    bell_measure,
    bell_probabilities,
    equal_up_to_global_phase,
    identify_bell,
    is_normalized,
    make_bell,
    measure_basis,
    measure_qubit,
    two_qubit_operator,
)

__all__ = [
    "BASIS_STATES",
    "BELL_STATES",
    "EPS",
    "MINUS",
    "ONE",
    "PAULI_MATRICES",
    "PLUS",
    "ZERO",
    "Basis",
    "BellLabel",
    "MeasurementOutcome",
    "PauliOp",
    "apply_pauli",
    "apply_pauli_single",
    "batch",
    "bell_measure",
    "bell_probabilities",
    "equal_up_to_global_phase",
    "identify_bell",
    "is_normalized",
    "make_bell",
    "measure_basis",
    "measure_qubit",
    "two_qubit_operator",
]
