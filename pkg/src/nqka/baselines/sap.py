"""The earlier two- and three-party agreements that use Bell-pair decoys.

Both protocols hide ``n/2`` decoy pairs among ``n`` message qubits by
concatenating them and shuffling the ``2n`` qubits with a random
permutation that is revealed only after the receiver acknowledges receipt.
Every party encodes one bit per message qubit: I/X in the first encoding
stage and, in the three-party version, I/Z in the second.

Keys here are arrays of bits (``uint8`` 0/1), not 2-bit symbols.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..protocol.frames import DecoyCheck, ProtocolFault
from ..qcore import BellLabel, batch
from ..rng import make_rng


class Permutation:
    """Bijection on ``size`` slots: ``apply(seq)[i] == seq[mapping[i]]``."""

    __slots__ = ("mapping", "inverse")

    def __init__(self, mapping):
        mapping = np.asarray(mapping, dtype=np.intp)
        if not np.array_equal(np.sort(mapping), np.arange(mapping.size)):
            raise ValueError("mapping is not a permutation")
        self.mapping = mapping
        self.inverse = np.argsort(mapping)

    @classmethod
    def random(cls, size: int, rng: np.random.Generator) -> "Permutation":
        return cls(rng.permutation(size))

    def __len__(self) -> int:
        return int(self.mapping.size)

    def apply(self, seq):
        return np.asarray(seq)[self.mapping]

    def restore(self, seq):
        return np.asarray(seq)[self.inverse]

    def then(self, other: "Permutation") -> "Permutation":
        """Permutation equal to applying ``self`` and then ``other``."""
        return Permutation(self.mapping[other.mapping])


@dataclass(frozen=True)
class BellDecoyRecord:
    ring_id: int
    hop_index: int
    positions: np.ndarray  # (n/2, 2) frame slots of each decoy pair
    expected: BellLabel = BellLabel.PHI_PLUS


@dataclass(frozen=True)
class SapFrame:
    """``2n`` shuffled qubits: ``n`` message halves plus ``n/2`` decoy pairs.

    Before shuffling, slot ``i < n`` is message ``i`` and slots
    ``n + 2d``, ``n + 2d + 1`` hold the two halves of decoy pair ``d``.
    """

    ring_id: int
    hop_index: int
    permutation: Permutation
    pairs: np.ndarray
    decoys: np.ndarray
    attacked: bool = False

    def tampered(self, attack, rng) -> "SapFrame":
        pairs = attack.disturb_pair_halves(self.pairs, 1, rng)
        decoys = attack.disturb_pair_halves(self.decoys, 0, rng)
        decoys = attack.disturb_pair_halves(decoys, 1, rng)
        return SapFrame(self.ring_id, self.hop_index, self.permutation, pairs, decoys, True)


def build_frame(
    pairs: np.ndarray, rng: np.random.Generator, ring_id: int = 0, hop_index: int = 0
) -> tuple[SapFrame, BellDecoyRecord]:
    n = pairs.shape[0]
    if n % 2:
        raise ValueError(f"Bell-pair decoys need an even message length, got n={n}")
    decoys = batch.bell_pairs(np.zeros(n // 2, dtype=np.intp))
    perm = Permutation.random(2 * n, rng)
    halves = n + np.arange(n).reshape(n // 2, 2)
    record = BellDecoyRecord(ring_id, hop_index, perm.inverse[halves])
    return SapFrame(ring_id, hop_index, perm, pairs.copy(), decoys), record


def check_bell_decoys(
    frame: SapFrame, record: BellDecoyRecord, threshold: float, rng: np.random.Generator
) -> DecoyCheck:
    """Re-pair the decoy halves at the announced slots and Bell-measure them."""
    if (frame.ring_id, frame.hop_index) != (record.ring_id, record.hop_index):
        raise ProtocolFault("decoy record does not belong to this frame")
    n = frame.pairs.shape[0]
    slots = frame.permutation.mapping[record.positions]  # original indices
    if np.any(slots[:, 0] < n) or np.any(slots[:, 1] != slots[:, 0] + 1) or np.any((slots[:, 0] - n) % 2):
        raise ProtocolFault("announced positions do not hold decoy pairs")
    order = (slots[:, 0] - n) // 2
    labels, _ = batch.bell_measure_pairs(frame.decoys[order], rng)
    mismatches = int(np.count_nonzero(labels != record.expected))
    rate = mismatches / len(order)
    return DecoyCheck(rate, rate <= threshold, mismatches)


def as_bits(key, n: Optional[int] = None) -> np.ndarray:
    bits = np.asarray([int(c) for c in key] if isinstance(key, str) else key, dtype=np.uint8).ravel()
    if np.any(bits > 1):
        raise ValueError("key bits must be 0 or 1")
    if n is not None and bits.size != n:
        raise ValueError(f"expected {n} key bits, got {bits.size}")
    return bits


def random_bits(n: int, rng: np.random.Generator) -> np.ndarray:
    return rng.integers(0, 2, size=n).astype(np.uint8)


# one bit per qubit: stage 1 uses {I, X}, stage 2 uses {I, Z}
STAGE_OPS = {1: 0b10, 2: 0b01}


def encode_stage(pairs: np.ndarray, bits: np.ndarray, stage: int) -> np.ndarray:
    return batch.apply_pauli_pairs(pairs, bits.astype(np.intp) * STAGE_OPS[stage], qubit=1)


@dataclass(frozen=True)
class SapResult:
    """Outcome of one baseline run.

    ``recovered[j]`` maps each other party to the bits party ``j`` read off
    its Bell measurements.
    """

    keys: tuple
    recovered: tuple
    party_keys: tuple
    final_key: Optional[np.ndarray]
    agreement: bool
    labels: tuple = ()
    detections: int = 0
    attacked_hops: int = 0
    restarts: int = 0
    aborted: bool = False
    log: tuple = field(default=(), compare=False)

    @property
    def detected(self) -> bool:
        return self.detections > 0


class _Abort(Exception):
    pass


def _transmit(pairs, rng, attack, ring_id, hop, threshold, stats, log, announce_full=True):
    frame, record = build_frame(pairs, rng, ring_id, hop)
    if attack is not None and attack.targets(ring_id, hop):
        frame = frame.tampered(attack, rng)
        stats["attacked"] += 1
    log.append({"event": "ack", "ring": ring_id, "hop": hop})
    if announce_full:
        log.append({"event": "permutation", "ring": ring_id, "hop": hop,
                    "mapping": frame.permutation.mapping.tolist()})
    else:
        log.append({"event": "decoy_positions", "ring": ring_id, "hop": hop,
                    "positions": record.positions.tolist()})
    check = check_bell_decoys(frame, record, threshold, rng)
    log.append({"event": "check", "ring": ring_id, "hop": hop, "passed": check.passed})
    if not check.passed:
        stats["detections"] += 1
        raise _Abort
    return frame


def _messages(frame: SapFrame) -> np.ndarray:
    # receiver drops the decoys; message slots keep their original index
    return frame.pairs


def _agree(party_keys) -> tuple[Optional[np.ndarray], bool]:
    first = party_keys[0]
    ok = all(np.array_equal(first, k) for k in party_keys[1:])
    return (first.copy() if ok else None), ok


def run_sap1(
    n: int,
    key_a=None,
    key_b=None,
    attack=None,
    rng: Optional[np.random.Generator] = None,
    *,
    threshold: float = 0.0,
    max_restarts: int = 10,
) -> SapResult:
    """Two-party baseline: Alice's pairs travel to Bob and back once."""
    rng = make_rng() if rng is None else rng
    key_a = random_bits(n, rng) if key_a is None else as_bits(key_a, n)
    key_b = random_bits(n, rng) if key_b is None else as_bits(key_b, n)
    stats = {"attacked": 0, "detections": 0}
    log: list[dict] = []
    for attempt in range(max_restarts + 1):
        try:
            pairs = batch.bell_pairs(np.zeros(n, dtype=np.intp))
            frame = _transmit(pairs, rng, attack, 0, 0, threshold, stats, log)
            q_b = encode_stage(_messages(frame), key_b, 1)
            frame = _transmit(q_b, rng, attack, 0, 1, threshold, stats, log, announce_full=False)
        except _Abort:
            continue
        # Alice publishes her key before learning Bob's message order
        log.append({"event": "key", "party": 0, "bits": key_a.tolist()})
        bob_key = key_a ^ key_b
        log.append({"event": "message_order", "ring": 0, "hop": 1,
                    "order": frame.permutation.inverse[:n].tolist()})
        labels, _ = batch.bell_measure_pairs(_messages(frame), rng)
        recovered_b = (labels >> 1).astype(np.uint8)
        alice_key = key_a ^ recovered_b
        final, ok = _agree((alice_key, bob_key))
        return SapResult(
            keys=(key_a, key_b),
            recovered=({1: recovered_b}, {0: key_a.copy()}),
            party_keys=(alice_key, bob_key),
            final_key=final,
            agreement=ok,
            labels=(labels,),
            detections=stats["detections"],
            attacked_hops=stats["attacked"],
            restarts=attempt,
            log=tuple(log),
        )
    return SapResult((key_a, key_b), ({}, {}), (None, None), None, False,
                     detections=stats["detections"], attacked_hops=stats["attacked"],
                     restarts=max_restarts, aborted=True, log=tuple(log))


def run_sap2(
    n: int,
    keys: Optional[Sequence] = None,
    attack=None,
    rng: Optional[np.random.Generator] = None,
    *,
    threshold: float = 0.0,
    max_restarts: int = 10,
    colluders: Optional[tuple[int, int]] = None,
) -> SapResult:
    """Three-party baseline with three simultaneous rounds.

    Round ``j`` starts at party ``j``; party ``j+1`` encodes with I/X, party
    ``j+2`` with I/Z, and party ``j`` Bell-measures the returned pairs.

    ``colluders=(a, b)`` replays the insider attack: after the second
    transmission the colluders measure the pairs of ``b``'s round to learn
    the third party's bits, then re-encode their second-stage operations so
    the third party's bits cancel out of every final key.
    """
    rng = make_rng() if rng is None else rng
    if keys is None:
        keys = [random_bits(n, rng) for _ in range(3)]
    keys = tuple(as_bits(k, n) for k in keys)
    if len(keys) != 3:
        raise ValueError("the three-party baseline needs exactly three keys")
    stats = {"attacked": 0, "detections": 0}
    log: list[dict] = []
    for attempt in range(max_restarts + 1):
        try:
            rings = [batch.bell_pairs(np.zeros(n, dtype=np.intp)) for _ in range(3)]
            stage_keys = [[keys[(j + 1) % 3], keys[(j + 2) % 3]] for j in range(3)]
            for hop in range(3):
                frames = [_transmit(rings[j], rng, attack, j, hop, threshold, stats, log) for j in range(3)]
                rings = [_messages(f) for f in frames]
                if hop == 1 and colluders is not None:
                    _collude(rings, stage_keys, keys, colluders, rng, log)
                if hop < 2:
                    rings = [encode_stage(rings[j], stage_keys[j][hop], hop + 1) for j in range(3)]
        except _Abort:
            continue
        measured = [batch.bell_measure_pairs(rings[j], rng)[0] for j in range(3)]
        recovered = tuple(
            {(j + 1) % 3: (measured[j] >> 1).astype(np.uint8), (j + 2) % 3: (measured[j] & 1).astype(np.uint8)}
            for j in range(3)
        )
        party_keys = tuple(keys[j] ^ recovered[j][(j + 1) % 3] ^ recovered[j][(j + 2) % 3] for j in range(3))
        if colluders is not None:
            a, b = colluders
            party_keys = tuple(keys[a] ^ keys[b] if j in colluders else party_keys[j] for j in range(3))
        final, ok = _agree(party_keys)
        return SapResult(
            keys=keys, recovered=recovered, party_keys=party_keys, final_key=final,
            agreement=ok, labels=tuple(measured), detections=stats["detections"],
            attacked_hops=stats["attacked"], restarts=attempt, log=tuple(log),
        )
    return SapResult(keys, ({}, {}, {}), (None,) * 3, None, False,
                     detections=stats["detections"], attacked_hops=stats["attacked"],
                     restarts=max_restarts, aborted=True, log=tuple(log))


def _collude(rings, stage_keys, keys, colluders, rng, log):
    a, b = colluders
    (t,) = {0, 1, 2} - {a, b}
    if (b + 1) % 3 != t:
        raise ValueError("colluders must be ordered so the target encodes first in b's round")
    # b's round has so far been encoded only by the target (I/X stage);
    # measuring a Bell state in the Bell basis leaves it unchanged
    labels, rings[b] = batch.bell_measure_pairs(rings[b], rng)
    learned = (labels >> 1).astype(np.uint8)
    log.append({"event": "collusion_measure", "ring": b, "by": [a, b]})
    # second-stage encoders: a in b's round, b in t's round
    stage_keys[b][1] = keys[a] ^ learned
    stage_keys[t][1] = keys[b] ^ learned
