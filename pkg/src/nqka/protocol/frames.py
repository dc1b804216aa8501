"""In-transit qubit sequences with hidden single-photon decoys."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..qcore import batch

DECOY_LABELS = ("0", "1", "+", "-")
_BASIS_NAMES = bytes.maketrans(b"\x00\x01", b"ZX")


class ProtocolFault(RuntimeError):
    """Raised on internal inconsistencies, never on detected eavesdropping."""


@dataclass(frozen=True)
class DecoyRecord:
    """What the sender keeps secret until the receiver acknowledges receipt."""

    ring_id: int
    hop_index: int
    positions: np.ndarray
    bases: np.ndarray
    bits: np.ndarray

    @property
    def labels(self) -> list[str]:
        return [DECOY_LABELS[2 * b + v] for b, v in zip(self.bases, self.bits)]

    def announcement(self) -> dict:
        """The public part: positions and bases, not the prepared values."""
        return {
            "ring": self.ring_id,
            "hop": self.hop_index,
            "positions": self.positions.tolist(),
            "bases": self.bases.astype(np.uint8).tobytes().translate(_BASIS_NAMES).decode(),
        }


@dataclass(frozen=True)
class Frame:
    """A sequence of ``2n`` qubits on the wire.

    ``layout[p]`` is the message index at slot ``p``, or ``-(d + 1)`` for
    decoy ``d``.  Message pairs are kept whole in ``pairs``; the qubit on
    the wire is the second half of each pair.
    """

    ring_id: int
    hop_index: int
    sender: int
    receiver: int
    layout: np.ndarray
    decoys: np.ndarray
    pairs: np.ndarray
    attacked: bool = field(default=False, compare=False)

    def __len__(self) -> int:
        return int(self.layout.size)

    def qubits(self) -> list[tuple[str, int]]:
        """Slot order as ``("decoy", d)`` / ``("message", i)`` entries."""
        return [("message", int(s)) if s >= 0 else ("decoy", int(-s - 1)) for s in self.layout]

    def tampered(self, attack, rng: np.random.Generator) -> "Frame":
        decoys = attack.disturb_qubits(self.decoys, rng)
        pairs = attack.disturb_pair_halves(self.pairs, 1, rng)
        return Frame(
            self.ring_id, self.hop_index, self.sender, self.receiver,
            self.layout, decoys, pairs, attacked=True,
        )


def insert_decoys(
    pairs: np.ndarray,
    rng: np.random.Generator,
    *,
    ring_id: int = 0,
    hop_index: int = 0,
    sender: int = 0,
    receiver: int = 1,
) -> tuple[Frame, DecoyRecord]:
    """Scatter ``n`` random decoys among the ``n`` traveling message qubits."""
    n = pairs.shape[0]
    kinds = rng.integers(0, 4, size=n)
    bases, bits = kinds >> 1, kinds & 1
    positions = np.sort(rng.permutation(2 * n)[:n])
    # message slots keep their relative order
    layout = np.zeros(2 * n, dtype=np.int64)
    layout[positions] = -np.arange(1, n + 1)
    layout[layout == 0] = np.arange(n)
    frame = Frame(
        ring_id, hop_index, sender, receiver, layout,
        batch.prepare_qubits(bases, bits), pairs.copy(),
    )
    return frame, DecoyRecord(ring_id, hop_index, positions, bases, bits)


def extract_messages(frame: Frame) -> np.ndarray:
    """Drop the decoys; message pairs come back in their original order."""
    order = frame.layout[frame.layout >= 0]
    return frame.pairs[order].copy()


@dataclass(frozen=True)
class DecoyCheck:
    error_rate: float
    passed: bool
    mismatches: int


def check_decoys(
    frame: Frame, record: DecoyRecord, threshold: float, rng: np.random.Generator
) -> DecoyCheck:
    """Measure every decoy in its preparation basis and count flips."""
    if (frame.ring_id, frame.hop_index) != (record.ring_id, record.hop_index):
        raise ProtocolFault(
            f"decoy record for ring {record.ring_id} hop {record.hop_index} "
            f"does not belong to frame ring {frame.ring_id} hop {frame.hop_index}"
        )
    slots = frame.layout[record.positions]
    if np.any(slots >= 0):
        raise ProtocolFault("announced decoy position holds a message qubit")
    idx = -slots - 1
    observed, _ = batch.measure_qubits(frame.decoys[idx], record.bases, rng)
    mismatches = int(np.count_nonzero(observed != record.bits))
    rate = mismatches / len(record.positions)
    return DecoyCheck(rate, rate <= threshold, mismatches)
