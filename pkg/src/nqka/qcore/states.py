"""Exact one- and two-qubit states, Pauli operations and measurements.

Everything here works on explicit matrices: single-qubit operators are 2x2
arrays and two-qubit operators are built with ``np.kron``.  This is the slow,
obvious route; :mod:`nqka.qcore.batch` has the vectorised route the protocol
engine uses, and the two are cross-checked in the test suite.

States are plain complex ``ndarray`` values of shape ``(2,)`` or ``(4,)``
indexed by the computational basis (``|00>, |01>, |10>, |11>`` for pairs).
Functions never mutate their inputs.

Note the Y operator is the real matrix ``[[0, 1], [-1, 0]]`` (equal to
``Z @ X``), not the Hermitian Pauli Y.  Results that differ from the
textbook by a sign are compared with :func:`equal_up_to_global_phase`.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Union

import numpy as np

EPS = 1e-12
SQRT1_2 = 1 / np.sqrt(2)


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=complex)
    arr.flags.writeable = False
    return arr


class PauliOp(enum.IntEnum):
    """The four encoding operations; the value is the 2-bit key symbol."""

    I = 0b00
    Z = 0b01
    X = 0b10
    Y = 0b11

    @property
    def code(self) -> int:
        return int(self)

    @property
    def matrix(self) -> np.ndarray:
        return PAULI_MATRICES[self]

    @classmethod
    def parse(cls, name: str) -> "PauliOp":
        try:
            return cls[name.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown Pauli operation {name!r}") from None


PAULI_MATRICES = {
    PauliOp.I: _frozen([[1, 0], [0, 1]]),
    PauliOp.Z: _frozen([[1, 0], [0, -1]]),
    PauliOp.X: _frozen([[0, 1], [1, 0]]),
    PauliOp.Y: _frozen([[0, 1], [-1, 0]]),
}

IDENTITY_2 = PAULI_MATRICES[PauliOp.I]


class Basis(enum.IntEnum):
    Z = 0
    X = 1


ZERO = _frozen([1, 0])
ONE = _frozen([0, 1])
PLUS = _frozen([SQRT1_2, SQRT1_2])
MINUS = _frozen([SQRT1_2, -SQRT1_2])

#: basis -> (state for outcome 0, state for outcome 1); outcome 1 in X is "-"
BASIS_STATES = {
    Basis.Z: (ZERO, ONE),
    Basis.X: (PLUS, MINUS),
}


class BellLabel(enum.IntEnum):
    """Bell basis; the value is the 2-bit XOR code (parity bit, phase bit)."""

    PHI_PLUS = 0b00
    PHI_MINUS = 0b01
    PSI_PLUS = 0b10
    PSI_MINUS = 0b11

    @property
    def code(self) -> int:
        return int(self)

    @property
    def parity(self) -> int:
        return int(self) >> 1

    @property
    def phase(self) -> int:
        return int(self) & 1

    @property
    def state(self) -> np.ndarray:
        return BELL_STATES[self]

    @property
    def symbol(self) -> str:
        return format(int(self), "02b")


BELL_STATES = {
    BellLabel.PHI_PLUS: _frozen([SQRT1_2, 0, 0, SQRT1_2]),
    BellLabel.PHI_MINUS: _frozen([SQRT1_2, 0, 0, -SQRT1_2]),
    BellLabel.PSI_PLUS: _frozen([0, SQRT1_2, SQRT1_2, 0]),
    BellLabel.PSI_MINUS: _frozen([0, SQRT1_2, -SQRT1_2, 0]),
}


@dataclass(frozen=True)
class MeasurementOutcome:
    """Result of a projective measurement.

    ``value`` is a bit for single-qubit measurements or a :class:`BellLabel`.
    """

    value: Union[int, BellLabel]
    post_state: np.ndarray
    probability: float


def is_normalized(state: np.ndarray) -> bool:
    return abs(np.vdot(state, state).real - 1.0) <= EPS


def _require_normalized(state: np.ndarray, size: int) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    if state.shape != (size,):
        raise ValueError(f"expected a state of shape ({size},), got {state.shape}")
    if not is_normalized(state):
        raise ValueError("state is not normalized")
    return state


def make_bell(label: BellLabel) -> np.ndarray:
    return BELL_STATES[BellLabel(label)].copy()


def two_qubit_operator(op: PauliOp, qubit: int) -> np.ndarray:
    """Return ``U (x) I`` for ``qubit == 0`` or ``I (x) U`` for ``qubit == 1``."""
    u = PauliOp(op).matrix
    if qubit == 0:
        return np.kron(u, IDENTITY_2)
    if qubit == 1:
        return np.kron(IDENTITY_2, u)
    raise ValueError(f"qubit index must be 0 or 1, got {qubit}")


def apply_pauli(op: PauliOp, qubit: int, state: np.ndarray) -> np.ndarray:
    state = _require_normalized(state, 4)
    return two_qubit_operator(op, qubit) @ state


def apply_pauli_single(op: PauliOp, state: np.ndarray) -> np.ndarray:
    state = _require_normalized(state, 2)
    return PauliOp(op).matrix @ state


def _sample(probs, rng: np.random.Generator) -> int:
    probs = np.asarray(probs, dtype=float)
    cum = np.cumsum(probs)
    r = rng.random() * cum[-1]
    return int(np.argmax(cum > r))


def measure_basis(state: np.ndarray, basis: Basis, rng: np.random.Generator) -> MeasurementOutcome:
    """Projective single-qubit measurement in the Z or X basis."""
    state = _require_normalized(state, 2)
    vectors = BASIS_STATES[Basis(basis)]
    probs = [abs(np.vdot(v, state)) ** 2 for v in vectors]
    bit = _sample(probs, rng)
    return MeasurementOutcome(bit, vectors[bit].copy(), probs[bit])


def bell_probabilities(state: np.ndarray) -> np.ndarray:
    state = _require_normalized(state, 4)
    return np.array([abs(np.vdot(BELL_STATES[b], state)) ** 2 for b in BellLabel])


def bell_measure(state: np.ndarray, rng: np.random.Generator) -> MeasurementOutcome:
    probs = bell_probabilities(state)
    label = BellLabel(_sample(probs, rng))
    return MeasurementOutcome(label, make_bell(label), float(probs[label]))


def measure_qubit(
    state: np.ndarray, qubit: int, basis: Basis, rng: np.random.Generator
) -> MeasurementOutcome:
    """Measure one half of a pair, leaving the other half untouched."""
    state = _require_normalized(state, 4)
    probs = []
    projected = []
    for v in BASIS_STATES[Basis(basis)]:
        proj = np.outer(v, v.conj())
        op = np.kron(proj, IDENTITY_2) if qubit == 0 else np.kron(IDENTITY_2, proj)
        after = op @ state
        probs.append(np.vdot(after, after).real)
        projected.append(after)
    bit = _sample(probs, rng)
    post = projected[bit] / np.sqrt(probs[bit])
    return MeasurementOutcome(bit, post, probs[bit])


def equal_up_to_global_phase(a: np.ndarray, b: np.ndarray, eps: float = EPS) -> bool:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        return False
    overlap = np.vdot(b, a)
    if abs(overlap) <= eps:
        return bool(np.all(np.abs(a) <= eps) and np.all(np.abs(b) <= eps))
    phase = overlap / abs(overlap)
    return bool(np.all(np.abs(a - phase * b) <= eps))


def identify_bell(state: np.ndarray, eps: float = EPS) -> BellLabel | None:
    """Return the Bell label ``state`` equals up to phase, if any."""
    for label in BellLabel:
        if equal_up_to_global_phase(state, BELL_STATES[label], eps):
            return label
    return None
