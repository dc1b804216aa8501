"""Two insiders trying to cancel the third party's key (N = 3)."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from ..protocol import (
    EarlyMeasureRejected,
    HopReport,
    ProtocolConfig,
    QkaSession,
    SecretKey,
)
from ..rng import make_rng


@dataclass(frozen=True)
class AttackOutcome:
    detected: bool
    hop_detection_events: tuple = ()
    key_influence: dict = field(default_factory=dict)
    final_key: Optional[SecretKey] = None
    succeeded: bool = False
    thwarted: bool = False


def _detections(reports: Sequence[HopReport]) -> tuple:
    return tuple(r for r in reports if r.detected)


def run_collusion(
    config: ProtocolConfig,
    keys: Sequence[SecretKey],
    colluders=frozenset({0, 1}),
    target: int = 2,
    respect_barrier: bool = True,
    rng=None,
) -> AttackOutcome:
    """Replay the adaptive collusion strategy.

    The first colluder ``a`` lets its own ring (encoded by the other
    colluder ``b`` and the target) return home while stalling everything
    else, then asks to measure it.  If the barrier refuses, the colluders
    have learned nothing and finish honestly.  Otherwise they recover the
    target's key and re-encode the remaining rings with ``K_a ^ K_t`` and
    ``K_b ^ K_t`` so the agreed key collapses to ``K_a ^ K_b``.

    ``final_key`` is the key the honest target ends up with.
    """
    colluders = frozenset(colluders)
    config = replace(config, barrier_enforced=respect_barrier)
    rng = make_rng(config.seed) if rng is None else rng
    session = QkaSession(config, keys, rng)

    if not colluders:
        session.run()
        result = session.result()
        return AttackOutcome(
            detected=bool(_detections(session.reports)),
            hop_detection_events=_detections(session.reports),
            key_influence={"target_offset": False},
            final_key=result.party_keys[target],
        )
    if config.parties != 3 or len(colluders) != 2:
        raise ValueError("collusion is modelled for two colluders among three parties")
    if target in colluders or not 0 <= target < 3 or not colluders <= {0, 1, 2}:
        raise ValueError("target must be the one honest party")

    a, b = sorted(colluders)
    t = target
    keys = session.keys

    # a's ring travels a -> a+1 -> a+2 -> a: encoded by b and t
    while not session.rings[a].finished:
        session.advance(a)

    try:
        xor_bt = session.measure(a)
    except EarlyMeasureRejected:
        session.run()
        result = session.result()
        return AttackOutcome(
            detected=bool(_detections(session.reports)),
            hop_detection_events=_detections(session.reports),
            key_influence={
                "target_offset": False,
                "early_measurement": "rejected",
                "final_equals_colluder_key": result.final_key == (keys[a] ^ keys[b]),
            },
            final_key=result.party_keys[t],
            thwarted=True,
        )

    learned = xor_bt ^ keys[b]
    # one colluder re-encodes in each remaining ring
    substitute = {b: (a, keys[a] ^ learned), t: (b, keys[b] ^ learned)}
    for ring_id, (cheater, fake_key) in substitute.items():
        while not session.rings[ring_id].finished:
            ring = session.rings[ring_id]
            receiver = (ring.holder + 1) % ring.parties
            session.advance(ring_id, key=fake_key if receiver == cheater else None)
    for ring_id in (b, t):
        session.measure(ring_id)

    target_key = keys[t] ^ session.measured[t]
    colluder_key = keys[a] ^ keys[b]
    return AttackOutcome(
        detected=bool(_detections(session.reports)),
        hop_detection_events=_detections(session.reports),
        key_influence={
            "target_offset": target_key == colluder_key,
            "early_measurement": "granted",
            "learned_target_key": learned == keys[t],
            "final_equals_colluder_key": target_key == colluder_key,
        },
        final_key=target_key,
        succeeded=target_key == colluder_key,
    )
