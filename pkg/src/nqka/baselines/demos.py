"""Executable versions of the three known weaknesses of the baselines."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..adversary import AttackOutcome, Flip
from ..protocol import ProtocolConfig, run_protocol
from ..qcore import PauliOp
from ..rng import make_rng
from .sap import random_bits, run_sap1, run_sap2

PROTOCOLS = ("sap1", "sap2")


def predicted_flip_mask(protocol: str, op: PauliOp, n: int) -> tuple[np.ndarray, ...]:
    """Per-party key bits an undetected flip on every party's first send corrupts.

    X turns a parity bit over, Z a phase bit.  The two-party baseline
    decodes only parity, and Bob's key comes from Alice's public
    announcement, so only Alice's key can be hit and only by X.
    """
    op = PauliOp.parse(op) if isinstance(op, str) else PauliOp(op)
    ones, zeros = np.ones(n, dtype=np.uint8), np.zeros(n, dtype=np.uint8)
    if protocol == "sap1":
        return (ones if op is PauliOp.X else zeros, zeros)
    if protocol == "sap2":
        return (ones, ones, ones) if op in (PauliOp.X, PauliOp.Z) else (zeros, zeros, zeros)
    raise ValueError(f"unknown baseline {protocol!r}")


def demo_flip_undetected(
    protocol: str, op, n: int, rng: Optional[np.random.Generator] = None
) -> AttackOutcome:
    """Flip every qubit of each party's first transmission.

    Bell-pair decoys are blind to the flip, so nothing is detected but
    keys change.  The same attack on the single-photon-decoy protocol (same
    party count, ``n`` symbols) is run for contrast.
    """
    rng = make_rng() if rng is None else rng
    op = PauliOp.parse(op) if isinstance(op, str) else PauliOp(op)
    if op not in (PauliOp.X, PauliOp.Z):
        raise ValueError("the baseline flip demo uses X or Z")
    attack = Flip(op, hops={0})
    if protocol == "sap1":
        result = run_sap1(n, attack=attack, rng=rng)
    elif protocol == "sap2":
        result = run_sap2(n, attack=attack, rng=rng)
    else:
        raise ValueError(f"unknown baseline {protocol!r}")
    honest = np.bitwise_xor.reduce(np.stack(result.keys))
    flipped = tuple(k ^ honest for k in result.party_keys)
    predicted = predicted_flip_mask(protocol, op, n)

    parties = 2 if protocol == "sap1" else 3
    contrast = run_protocol(
        ProtocolConfig(parties=parties, symbols=n, max_restarts=0),
        "random", Flip(op, hops={0}), rng=rng,
    )
    return AttackOutcome(
        detected=result.detected,
        key_influence={
            "flipped": flipped,
            "predicted": predicted,
            "matches_prediction": all(np.array_equal(f, p) for f, p in zip(flipped, predicted)),
            "single_photon_detected": contrast.stats.attacked_detections > 0,
        },
        final_key=result.party_keys[0],
        succeeded=not result.detected and any(f.any() for f in flipped),
    )


@dataclass(frozen=True)
class PrivacyLeak:
    keys: tuple
    recovered: tuple

    @property
    def success_rate(self) -> float:
        hits = [
            np.array_equal(bits, self.keys[other])
            for view in self.recovered
            for other, bits in view.items()
        ]
        return sum(hits) / len(hits)


def demo_privacy_leak(n: int, rng: Optional[np.random.Generator] = None) -> PrivacyLeak:
    """Honest three-party baseline run; each party reads both others' keys."""
    result = run_sap2(n, rng=make_rng() if rng is None else rng)
    return PrivacyLeak(result.keys, result.recovered)


def decode_stage_ops(label: int) -> tuple[PauliOp, PauliOp]:
    """Invert the two-stage encoding: (first-stage op, second-stage op)."""
    return (PauliOp.X if label >> 1 else PauliOp.I, PauliOp.Z if label & 1 else PauliOp.I)


def demo_collusion_sap2(
    n: int, rng: Optional[np.random.Generator] = None, colluders=(0, 1)
) -> AttackOutcome:
    """Two insiders cancel the third party's bits.

    The run is repeated with the target's key complemented and everything
    else (including randomness) fixed; success means the target ends up
    with the same key both times, namely the colluders' XOR.
    """
    rng = make_rng() if rng is None else rng
    a, b = colluders
    (t,) = {0, 1, 2} - {a, b}
    keys = [random_bits(n, rng) for _ in range(3)]
    state = rng.bit_generator.state
    first = run_sap2(n, keys, rng=rng, colluders=colluders)
    keys_alt = list(keys)
    keys_alt[t] = keys[t] ^ 1
    rng.bit_generator.state = state
    second = run_sap2(n, keys_alt, rng=rng, colluders=colluders)
    target_key = first.party_keys[t]
    colluder_key = keys[a] ^ keys[b]
    independent = np.array_equal(target_key, second.party_keys[t])
    return AttackOutcome(
        detected=first.detected or second.detected,
        key_influence={
            "independent_of_target": independent,
            "final_equals_colluder_key": np.array_equal(target_key, colluder_key),
            "agreement": first.agreement,
        },
        final_key=target_key,
        succeeded=independent and np.array_equal(target_key, colluder_key),
    )
