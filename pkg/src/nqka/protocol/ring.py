"""One initiator's ring: preparation, hops, the measurement barrier, decoding.

Parties are numbered ``0 .. N-1``.  Ring ``j`` starts at party ``j`` and
visits ``j+1, ..., j+N-1`` (mod N) before returning home; each visited
party checks the decoys and then encodes its key on the traveling halves.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional

import numpy as np

from ..qcore import batch
from .frames import Frame, check_decoys, extract_messages, insert_decoys
from .keys import SecretKey


class Phase(enum.Enum):
    PREPARING = "preparing"
    IN_TRANSIT = "in_transit"
    AWAITING_CHECK = "awaiting_check"
    COMPLETE = "complete"
    ABORTED = "aborted"


@dataclass(frozen=True)
class ProtocolConfig:
    parties: int = 3
    symbols: int = 8
    error_threshold: float = 0.0
    seed: int = 0
    barrier_enforced: bool = True
    max_restarts: int = 10

    def __post_init__(self):
        if self.parties < 2:
            raise ValueError(f"need at least 2 parties, got {self.parties}")
        if self.symbols < 1:
            raise ValueError(f"need at least 1 key symbol, got {self.symbols}")
        if not 0.0 <= self.error_threshold <= 1.0:
            raise ValueError("error_threshold must lie in [0, 1]")
        if self.max_restarts < 0:
            raise ValueError("max_restarts must be non-negative")


@dataclass(frozen=True)
class RingState:
    """Snapshot of a ring.

    ``pairs[i]`` is the joint state of retained qubit ``p[i]`` (first) and
    traveling qubit ``q[i]`` (second).  ``k`` counts encodings applied.
    """

    initiator: int
    parties: int
    pairs: np.ndarray
    k: int = 0
    hop: int = 0
    holder: int = -1
    phase: Phase = Phase.PREPARING
    restarts: int = 0
    trace: tuple = ()

    def __post_init__(self):
        if self.holder < 0:
            object.__setattr__(self, "holder", self.initiator)
        if not self.trace:
            object.__setattr__(self, "trace", (self.phase,))

    @property
    def n(self) -> int:
        return int(self.pairs.shape[0])

    @property
    def finished(self) -> bool:
        return self.phase in (Phase.COMPLETE, Phase.ABORTED)

    def encoder_order(self) -> list[int]:
        return [(self.initiator + h) % self.parties for h in range(1, self.parties)]


def prepare_ring(
    initiator: int, n: int, parties: int = 2, rng: Optional[np.random.Generator] = None
) -> RingState:
    """Fresh ring of ``n`` |00>+|11> pairs held by ``initiator``.

    ``rng`` is accepted for interface symmetry; preparation is deterministic.
    """
    if n < 1:
        raise ValueError(f"a ring needs at least one pair, got n={n}")
    return RingState(initiator, parties, batch.bell_pairs(np.zeros(n, dtype=np.intp)))


def encode_key(pairs: np.ndarray, key: SecretKey) -> np.ndarray:
    """Apply the Pauli named by each key symbol to the traveling halves."""
    if len(key) != pairs.shape[0]:
        raise ValueError(f"key has {len(key)} symbols for {pairs.shape[0]} qubits")
    return batch.apply_pauli_pairs(pairs, key.symbols, qubit=1)


@dataclass(frozen=True)
class HopReport:
    ring_id: int
    hop: int
    sender: int
    receiver: int
    attacked: bool
    error_rate: float
    detected: bool
    restarted: bool = False
    aborted: bool = False
    announcements: tuple = field(default=(), compare=False)


def run_hop(
    ring: RingState,
    key: Optional[SecretKey],
    config: ProtocolConfig,
    rng: np.random.Generator,
    attack=None,
) -> tuple[RingState, HopReport]:
    """Send the ring's sequence one party onward.

    ``key`` is the receiver's key (ignored when the receiver is the
    initiator).  ``attack``, if given, may tamper with the frame on the wire.
    A failed decoy check restarts the ring from fresh pairs, or aborts it
    once ``config.max_restarts`` is used up.
    """
    if ring.finished:
        raise ValueError(f"ring {ring.initiator} is already {ring.phase.value}")
    sender = ring.holder
    receiver = (sender + 1) % ring.parties
    hop = ring.hop
    frame, record = insert_decoys(
        ring.pairs, rng, ring_id=ring.initiator, hop_index=hop, sender=sender, receiver=receiver
    )
    if attack is not None and attack.targets(ring.initiator, hop):
        frame = frame.tampered(attack, rng)
    announcements = (
        {"event": "ack", "ring": ring.initiator, "hop": hop, "from": receiver, "to": sender},
        {"event": "decoys", **record.announcement()},
    )
    home = receiver == ring.initiator
    trace = ring.trace + ((Phase.AWAITING_CHECK,) if home else ((Phase.IN_TRANSIT, hop),))
    check = check_decoys(frame, record, config.error_threshold, rng)
    announcements += ({"event": "check", "ring": ring.initiator, "hop": hop, "passed": check.passed},)

    report = dict(
        ring_id=ring.initiator, hop=hop, sender=sender, receiver=receiver,
        attacked=frame.attacked, error_rate=check.error_rate, detected=not check.passed,
    )
    if not check.passed:
        # message qubits of this attempt are discarded
        if ring.restarts >= config.max_restarts:
            aborted = replace(ring, phase=Phase.ABORTED, trace=trace + (Phase.ABORTED,))
            return aborted, HopReport(**report, aborted=True, announcements=announcements)
        fresh = prepare_ring(ring.initiator, ring.n, ring.parties)
        fresh = replace(fresh, restarts=ring.restarts + 1, trace=trace + (Phase.PREPARING,))
        return fresh, HopReport(**report, restarted=True, announcements=announcements)

    pairs = extract_messages(frame)
    if home:
        done = replace(ring, pairs=pairs, hop=hop + 1, holder=receiver,
                       phase=Phase.COMPLETE, trace=trace + (Phase.COMPLETE,))
        return done, HopReport(**report, announcements=announcements)
    if key is None:
        raise ValueError(f"party {receiver} must supply a key to encode ring {ring.initiator}")
    moved = replace(ring, pairs=encode_key(pairs, key), k=ring.k + 1, hop=hop + 1,
                    holder=receiver, phase=Phase.IN_TRANSIT, trace=trace)
    return moved, HopReport(**report, announcements=announcements)


class EarlyMeasureRejected(RuntimeError):
    """A Bell measurement was requested before the barrier allows it."""


@dataclass(frozen=True)
class MeasurementPermit:
    rings: frozenset


def measurement_barrier(
    rings: Iterable[RingState],
    request: Optional[int] = None,
    enforced: bool = True,
) -> MeasurementPermit:
    """Grant final measurement only once every ring is back home.

    With ``enforced=False`` any ring that has itself returned may be
    measured immediately; this mode exists to replay collusion attacks.
    """
    rings = list(rings)
    complete = frozenset(r.initiator for r in rings if r.phase is Phase.COMPLETE)
    if enforced:
        pending = sorted(r.initiator for r in rings if r.phase is not Phase.COMPLETE)
        if pending:
            raise EarlyMeasureRejected(f"rings {pending} have not returned yet")
        return MeasurementPermit(complete)
    if request is not None and request not in complete:
        raise EarlyMeasureRejected(f"ring {request} has not returned yet")
    return MeasurementPermit(complete if request is None else frozenset({request}))


def final_measure(
    ring: RingState, permit: MeasurementPermit, rng: np.random.Generator
) -> SecretKey:
    """Bell-measure each pair; the label code is the XOR of all encodings."""
    if ring.initiator not in permit.rings or ring.phase is not Phase.COMPLETE:
        raise EarlyMeasureRejected(f"no permit to measure ring {ring.initiator}")
    codes, _ = batch.bell_measure_pairs(ring.pairs, rng)
    return SecretKey(codes)
