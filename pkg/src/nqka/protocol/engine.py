"""Whole-protocol driver: N rings in lockstep, barrier, key derivation."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from ..rng import make_rng
from .keys import SecretKey, xor_keys
from .ring import (
    HopReport,
    Phase,
    ProtocolConfig,
    RingState,
    final_measure,
    measurement_barrier,
    prepare_ring,
    run_hop,
)


@dataclass(frozen=True)
class SharedKeyResult:
    """``recovered[j]`` is what party j measured; ``party_keys[j]`` its final key."""

    recovered: tuple
    party_keys: tuple
    final_key: Optional[SecretKey]
    agreement: bool


@dataclass(frozen=True)
class ProtocolStats:
    rounds: int
    restarts: tuple
    hop_checks: int
    detections: int
    attacked_hops: int
    attacked_detections: int
    mean_error_rate: float
    aborted: bool

    def as_dict(self) -> dict:
        return {
            "rounds": self.rounds,
            "restarts": list(self.restarts),
            "hop_checks": self.hop_checks,
            "detections": self.detections,
            "attacked_hops": self.attacked_hops,
            "attacked_detections": self.attacked_detections,
            "mean_error_rate": self.mean_error_rate,
            "aborted": self.aborted,
        }


@dataclass(frozen=True)
class ProtocolRun:
    keys: tuple
    result: SharedKeyResult
    stats: ProtocolStats
    log: tuple


class QkaSession:
    """Mutable harness around the immutable ring snapshots.

    The default schedule (:meth:`run`) advances every ring one hop per
    round.  Adversarial schedules can call :meth:`advance` and
    :meth:`measure` in any order; the barrier still applies.
    """

    def __init__(
        self,
        config: ProtocolConfig,
        keys: Sequence[SecretKey],
        rng: np.random.Generator,
        attack=None,
    ):
        if len(keys) != config.parties:
            raise ValueError(f"expected {config.parties} keys, got {len(keys)}")
        if any(len(k) != config.symbols for k in keys):
            raise ValueError(f"every key must have {config.symbols} symbols")
        self.config = config
        self.keys = tuple(keys)
        self.rng = rng
        self.attack = attack
        self.rings = [prepare_ring(j, config.symbols, config.parties) for j in range(config.parties)]
        self.reports: list[HopReport] = []
        self.log: list[dict] = []
        self.measured: dict[int, SecretKey] = {}
        self.rounds = 0

    @property
    def done(self) -> bool:
        return all(r.finished for r in self.rings)

    def advance(self, ring_id: int, key: Optional[SecretKey] = None) -> HopReport:
        """Move ring ``ring_id`` one hop; ``key`` overrides the receiver's key."""
        ring = self.rings[ring_id]
        receiver = (ring.holder + 1) % ring.parties
        if key is None and receiver != ring.initiator:
            key = self.keys[receiver]
        ring, report = run_hop(ring, key, self.config, self.rng, self.attack)
        self.rings[ring_id] = ring
        self.reports.append(report)
        self.log.extend(report.announcements)
        return report

    def step_round(self) -> None:
        for j, ring in enumerate(self.rings):
            if not ring.finished:
                self.advance(j)
        self.rounds += 1

    def measure(self, ring_id: int) -> SecretKey:
        permit = measurement_barrier(
            self.rings, request=ring_id, enforced=self.config.barrier_enforced
        )
        xor = final_measure(self.rings[ring_id], permit, self.rng)
        self.measured[ring_id] = xor
        return xor

    def run(self) -> None:
        while not self.done:
            self.step_round()

    def result(self) -> SharedKeyResult:
        if any(r.phase is Phase.ABORTED for r in self.rings):
            n = self.config.parties
            return SharedKeyResult((None,) * n, (None,) * n, None, False)
        for j in range(self.config.parties):
            if j not in self.measured:
                self.measure(j)
        recovered = tuple(self.measured[j] for j in range(self.config.parties))
        party_keys = tuple(k ^ x for k, x in zip(self.keys, recovered))
        agreement = all(k == party_keys[0] for k in party_keys)
        return SharedKeyResult(recovered, party_keys, party_keys[0] if agreement else None, agreement)

    def stats(self) -> ProtocolStats:
        reports = self.reports
        attacked = [r for r in reports if r.attacked]
        return ProtocolStats(
            rounds=self.rounds,
            restarts=tuple(r.restarts for r in self.rings),
            hop_checks=len(reports),
            detections=sum(r.detected for r in reports),
            attacked_hops=len(attacked),
            attacked_detections=sum(r.detected for r in attacked),
            mean_error_rate=float(np.mean([r.error_rate for r in reports])) if reports else 0.0,
            aborted=any(r.phase is Phase.ABORTED for r in self.rings),
        )


def run_protocol(
    config: ProtocolConfig,
    keys: Union[str, Sequence[SecretKey]] = "random",
    attack=None,
    rng: Optional[np.random.Generator] = None,
) -> ProtocolRun:
    """Run one complete agreement.

    The outcome is a pure function of ``(config, keys, attack)``; random
    keys and all quantum randomness come from ``config.seed`` unless an
    explicit ``rng`` is supplied.
    """
    rng = make_rng(config.seed) if rng is None else rng
    if isinstance(keys, str):
        if keys != "random":
            raise ValueError(f"keys must be a list of SecretKeys or 'random', got {keys!r}")
        keys = [SecretKey.random(config.symbols, rng) for _ in range(config.parties)]
    session = QkaSession(config, keys, rng, attack)
    session.run()
    return ProtocolRun(session.keys, session.result(), session.stats(), tuple(session.log))


def expected_key(keys: Sequence[SecretKey]) -> SecretKey:
    return xor_keys(keys)
