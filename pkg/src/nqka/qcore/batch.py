"""Vectorised state arithmetic used by the protocol engines.

Arrays hold many independent states at once: ``(m, 2)`` for single qubits,
``(m, 4)`` for pairs.  A Pauli on one qubit is a fixed reordering of the
amplitudes plus a sign pattern, so no matrix products are formed here, and
Bell measurement uses the closed-form projections
``(a00 +- a11)/sqrt2`` and ``(a01 +- a10)/sqrt2``.

All functions return new arrays.
"""
from __future__ import annotations

import numpy as np

from .states import SQRT1_2

# Pauli code -> (source index for each output amplitude, sign on output)
# for codes I=0, Z=1, X=2, Y=3 (Y = Z X, real).
_SINGLE_PERM = np.array([[0, 1], [0, 1], [1, 0], [1, 0]])
_SINGLE_SIGN = np.array([[1, 1], [1, -1], [1, 1], [1, -1]], dtype=float)

_PAIR_PERM = np.array(
    [
        # acting on the first qubit (|ab> index 2a+b)
        [[0, 1, 2, 3], [0, 1, 2, 3], [2, 3, 0, 1], [2, 3, 0, 1]],
        # acting on the second qubit
        [[0, 1, 2, 3], [0, 1, 2, 3], [1, 0, 3, 2], [1, 0, 3, 2]],
    ]
)
_PAIR_SIGN = np.array(
    [
        [[1, 1, 1, 1], [1, 1, -1, -1], [1, 1, 1, 1], [1, 1, -1, -1]],
        [[1, 1, 1, 1], [1, -1, 1, -1], [1, 1, 1, 1], [1, -1, 1, -1]],
    ],
    dtype=float,
)

_BELL_ROWS = np.array(
    [
        [SQRT1_2, 0, 0, SQRT1_2],
        [SQRT1_2, 0, 0, -SQRT1_2],
        [0, SQRT1_2, SQRT1_2, 0],
        [0, SQRT1_2, -SQRT1_2, 0],
    ],
    dtype=complex,
)

# basis -> [state for outcome 0, state for outcome 1]
_BASIS_VECTORS = np.array(
    [
        [[1, 0], [0, 1]],
        [[SQRT1_2, SQRT1_2], [SQRT1_2, -SQRT1_2]],
    ],
    dtype=complex,
)


def _codes(codes, m: int) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.intp)
    if codes.ndim == 0:
        codes = np.full(m, codes, dtype=np.intp)
    return codes


def apply_pauli_qubits(amps: np.ndarray, codes) -> np.ndarray:
    """Apply Pauli ``codes[i]`` to single-qubit state ``amps[i]``."""
    m = amps.shape[0]
    codes = _codes(codes, m)
    rows = np.arange(m)[:, None]
    return amps[rows, _SINGLE_PERM[codes]] * _SINGLE_SIGN[codes]


def apply_pauli_pairs(amps: np.ndarray, codes, qubit: int) -> np.ndarray:
    """Apply Pauli ``codes[i]`` to qubit ``qubit`` (0 or 1) of pair ``amps[i]``."""
    m = amps.shape[0]
    codes = _codes(codes, m)
    rows = np.arange(m)[:, None]
    return amps[rows, _PAIR_PERM[qubit][codes]] * _PAIR_SIGN[qubit][codes]


def _pick(probs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    cum = np.cumsum(probs, axis=1)
    r = rng.random(probs.shape[0]) * cum[:, -1]
    return np.argmax(cum > r[:, None], axis=1)


_BELL_LEFT = np.array([0, 0, 1, 1])
_BELL_RIGHT = np.array([3, 3, 2, 2])
_BELL_SIGN = np.array([1, -1, 1, -1], dtype=float)


def bell_amplitudes(amps: np.ndarray) -> np.ndarray:
    """Overlaps with the four Bell states, columns ordered by Bell code.

    Column ``c`` is ``(a[left] + sign * a[right]) / sqrt2``, e.g.
    ``(a00 - a11)/sqrt2`` for the phase-flipped |00>+|11> state.
    """
    return (amps[:, _BELL_LEFT] + _BELL_SIGN * amps[:, _BELL_RIGHT]) * SQRT1_2


def bell_measure_pairs(amps: np.ndarray, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Bell-measure every pair; returns (codes, collapsed states)."""
    probs = np.abs(bell_amplitudes(amps)) ** 2
    labels = _pick(probs, rng)
    return labels, _BELL_ROWS[labels].copy()


def measure_qubits(amps: np.ndarray, bases, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Measure single qubits, ``bases[i]`` 0 for Z or 1 for X."""
    m = amps.shape[0]
    bases = _codes(bases, m)
    a0, a1 = amps[:, 0], amps[:, 1]
    p1 = np.where(bases == 0, np.abs(a1) ** 2, np.abs(a0 - a1) ** 2 / 2)
    bits = (rng.random(m) < p1).astype(np.intp)
    return bits, _BASIS_VECTORS[bases, bits].copy()


def measure_pair_qubit(
    amps: np.ndarray, qubit: int, bases, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Measure one half of each pair; the other half is left alone."""
    m = amps.shape[0]
    bases = _codes(bases, m)
    vecs = _BASIS_VECTORS[bases]  # (m, o, k)
    grid = amps.reshape(m, 2, 2)
    if qubit == 0:
        # other-qubit amplitudes conditioned on each outcome: (m, o, 2)
        cond = np.einsum("mok,mkb->mob", vecs.conj(), grid)
    else:
        cond = np.einsum("mok,mak->moa", vecs.conj(), grid)
    probs = np.sum(np.abs(cond) ** 2, axis=2)
    bits = _pick(probs, rng)
    idx = np.arange(m)
    rest = cond[idx, bits] / np.sqrt(probs[idx, bits])[:, None]
    chosen = vecs[idx, bits]
    if qubit == 0:
        post = np.einsum("ma,mb->mab", chosen, rest)
    else:
        post = np.einsum("ma,mb->mab", rest, chosen)
    return bits, post.reshape(m, 4)


def prepare_qubits(bases, bits) -> np.ndarray:
    """Basis states ``|0>, |1>, |+>, |->`` selected per position."""
    return _BASIS_VECTORS[np.asarray(bases, dtype=np.intp), np.asarray(bits, dtype=np.intp)].copy()


def bell_pairs(codes) -> np.ndarray:
    return _BELL_ROWS[np.asarray(codes, dtype=np.intp)].copy()
