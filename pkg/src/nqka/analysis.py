"""Closed-form efficiency, detection and privacy figures.

Efficiency is ``eta = c / (q + b)``: message bits over qubits used plus
classical bits exchanged.  Resource counts are kept per unit ``n`` so they
hold for every key length.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

import numpy as np

from .adversary import AttackModel, Flip, Honest, InterceptResend
from .qcore import (
    BASIS_STATES,
    Basis,
    BellLabel,
    PauliOp,
    apply_pauli,
    apply_pauli_single,
    bell_probabilities,
    identify_bell,
    make_bell,
)

PROTOCOLS = ("ours", "sap2", "zhu")
SCHEMES = ("single_photon", "bell_pair")


@dataclass(frozen=True)
class ResourceCount:
    """Counts per unit ``n``: message bits, qubits, exchanged classical bits."""

    c: int
    q: int
    b: int

    def __post_init__(self):
        if min(self.c, self.q, self.b) < 0:
            raise ValueError("resource counts cannot be negative")

    def at(self, n: int) -> tuple[int, int, int]:
        return self.c * n, self.q * n, self.b * n


def efficiency(rc: ResourceCount) -> Fraction:
    if rc.q + rc.b == 0:
        raise ZeroDivisionError("no qubits or classical bits to divide by")
    return Fraction(rc.c, rc.q + rc.b)


def percent(eta: Fraction) -> str:
    return f"{float(eta) * 100:.2f}%"


def count_resources(protocol: str, parties: int = 3) -> ResourceCount:
    """Resource use of the compared three-party protocols, or ours for any N.

    Ours: each of N rings uses n pairs (2n qubits) and N n decoys, and each
    of its N transmissions discloses n bits of decoy coordinates.
    """
    if protocol == "ours":
        if parties < 2:
            raise ValueError("need at least two parties")
        return ResourceCount(c=2, q=parties * (2 + parties), b=parties * parties)
    if parties != 3:
        raise ValueError(f"{protocol} is only defined for three parties")
    if protocol == "sap2":
        return ResourceCount(c=1, q=15, b=9)
    if protocol == "zhu":
        return ResourceCount(c=1, q=15, b=12)
    raise ValueError(f"unknown protocol {protocol!r}")


def tally_resources(run) -> ResourceCount:
    """Count resources of an honest protocol run from its public log.

    Every ring prepares ``n`` pairs; each decoy announcement adds one
    single-photon decoy per listed position and one classical unit for
    disclosing it.  The agreed key carries two bits per symbol.
    """
    n = len(run.keys[0])
    rings = len(run.keys)
    decoys = sum(len(e["positions"]) for e in run.log if e["event"] == "decoys")
    qubits = rings * 2 * n + decoys
    if qubits % n or decoys % n:
        raise ValueError("log does not describe a whole number of units")
    return ResourceCount(c=2, q=qubits // n, b=decoys // n)


def general_efficiency(parties: int) -> Fraction:
    """Simplified form of our efficiency: ``1 / (N (N + 1))``."""
    return Fraction(1, parties * (parties + 1))


@dataclass(frozen=True)
class EfficiencyRow:
    protocol: str
    parties: int
    resources: ResourceCount
    eta: Fraction

    def as_dict(self) -> dict:
        return {
            "protocol": self.protocol,
            "parties": self.parties,
            "message_bits": f"{self.resources.c}n",
            "qubits": f"{self.resources.q}n",
            "exchanged_bits": f"{self.resources.b}n",
            "efficiency": percent(self.eta),
        }


def comparison_table() -> list[EfficiencyRow]:
    rows = []
    for name in ("sap2", "zhu", "ours"):
        rc = count_resources(name, 3)
        rows.append(EfficiencyRow(name, 3, rc, efficiency(rc)))
    return rows


def _decoy_disturbance(attack: AttackModel) -> Fraction:
    """Chance one single-photon decoy reads wrong, averaged over its 4 states."""
    total = Fraction(0)
    for basis in Basis:
        for bit, state in enumerate(BASIS_STATES[basis]):
            for after, weight in _attacked_qubit(attack, state):
                wrong = BASIS_STATES[basis][1 - bit]
                total += weight * _exact(abs(np.vdot(wrong, after)) ** 2)
    return total / 4


def _exact(p: float) -> Fraction:
    return Fraction(p).limit_denominator(1 << 20)


def _attacked_qubit(attack: AttackModel, state):
    """Possible post-attack states of one qubit with their probabilities."""
    if isinstance(attack, Flip):
        return [(apply_pauli_single(attack.op, state), Fraction(1))]
    if isinstance(attack, InterceptResend):
        bases = {"z": [Basis.Z], "x": [Basis.X], "random": [Basis.Z, Basis.X]}[attack.policy]
        out = []
        for basis in bases:
            for v in BASIS_STATES[basis]:
                p = _exact(abs(np.vdot(v, state)) ** 2)
                if p:
                    out.append((v, p / len(bases)))
        return out
    raise ValueError(f"no analytic model for {attack!r}")


def _bell_decoy_disturbance(attack: AttackModel) -> Fraction:
    """Chance a |00>+|11> decoy pair with both halves attacked fails its check."""
    pair = make_bell(BellLabel.PHI_PLUS)
    if isinstance(attack, Flip):
        after = apply_pauli(attack.op, 1, apply_pauli(attack.op, 0, pair))
        return 1 - _exact(bell_probabilities(after)[BellLabel.PHI_PLUS])
    if isinstance(attack, InterceptResend):
        bases = {"z": [Basis.Z], "x": [Basis.X], "random": [Basis.Z, Basis.X]}[attack.policy]
        ok = Fraction(0)
        for b0, b1 in itertools.product(bases, repeat=2):
            for v0, v1 in itertools.product(BASIS_STATES[b0], BASIS_STATES[b1]):
                product = np.kron(v0, v1)
                p = _exact(abs(np.vdot(product, pair)) ** 2)
                ok += p * _exact(bell_probabilities(product)[BellLabel.PHI_PLUS])
        return 1 - ok / len(bases) ** 2
    raise ValueError(f"no analytic model for {attack!r}")


def decoy_error_probability(attack: AttackModel, scheme: str = "single_photon") -> Fraction:
    if isinstance(attack, Honest) or not attack.intercepts:
        raise ValueError("detection probability is defined for intercepting attacks only")
    if scheme == "single_photon":
        return _decoy_disturbance(attack)
    if scheme == "bell_pair":
        return _bell_decoy_disturbance(attack)
    raise ValueError(f"unknown decoy scheme {scheme!r}")


def detection_probability(attack: AttackModel, scheme: str, n: int) -> float:
    """Per-hop chance that at least one decoy check fails.

    ``n`` message qubits travel with ``n`` single-photon decoys or
    ``n / 2`` decoy pairs.
    """
    p = decoy_error_probability(attack, scheme)
    count = n if scheme == "single_photon" else n // 2
    return float(1 - (1 - p) ** count)


def privacy_posterior(observed: BellLabel, parties: int) -> dict[tuple[int, ...], Fraction]:
    """Distribution of the other parties' symbols given one Bell outcome.

    Keys are uniform a priori, so the posterior is uniform over every tuple
    of ``N - 1`` symbols whose XOR equals the observed code.
    """
    if parties < 2:
        raise ValueError("need at least two parties")
    code = BellLabel(observed).code
    matches = [
        combo
        for combo in itertools.product(range(4), repeat=parties - 1)
        if reduce(lambda x, y: x ^ y, combo, 0) == code
    ]
    weight = Fraction(1, len(matches))
    return {combo: weight for combo in matches}


def guess_success_probability(parties: int) -> Fraction:
    """Best chance of naming every other party's symbol from one outcome."""
    return max(privacy_posterior(BellLabel.PHI_PLUS, parties).values())


# Transformation of |00>+|11> by the two encoders of a three-party ring,
# transcribed row by row: (first encoder, second encoder, XOR, final state).
TRANSFORMATION_TABLE = [
    ("00", "00", "00", BellLabel.PHI_PLUS),
    ("01", "01", "00", BellLabel.PHI_PLUS),
    ("10", "10", "00", BellLabel.PHI_PLUS),
    ("11", "11", "00", BellLabel.PHI_PLUS),
    ("00", "01", "01", BellLabel.PHI_MINUS),
    ("01", "00", "01", BellLabel.PHI_MINUS),
    ("10", "11", "01", BellLabel.PHI_MINUS),
    ("11", "10", "01", BellLabel.PHI_MINUS),
    ("00", "10", "10", BellLabel.PSI_PLUS),
    ("01", "11", "10", BellLabel.PSI_PLUS),
    ("10", "00", "10", BellLabel.PSI_PLUS),
    ("11", "01", "10", BellLabel.PSI_PLUS),
    ("00", "11", "11", BellLabel.PSI_MINUS),
    ("01", "10", "11", BellLabel.PSI_MINUS),
    ("10", "01", "11", BellLabel.PSI_MINUS),
    ("11", "00", "11", BellLabel.PSI_MINUS),
]

BELL_TEXT = {
    BellLabel.PHI_PLUS: "(|00>+|11>)/sqrt2",
    BellLabel.PHI_MINUS: "(|00>-|11>)/sqrt2",
    BellLabel.PSI_PLUS: "(|01>+|10>)/sqrt2",
    BellLabel.PSI_MINUS: "(|01>-|10>)/sqrt2",
}


@dataclass(frozen=True)
class TransformationRow:
    first: PauliOp
    second: PauliOp
    xor: str
    final: BellLabel | None
    phase: int
    expected_xor: str
    expected_final: BellLabel

    @property
    def ok(self) -> bool:
        return self.xor == self.expected_xor and self.final is self.expected_final

    def as_dict(self) -> dict:
        return {
            "initial": BELL_TEXT[BellLabel.PHI_PLUS],
            "first": f"{self.first.code:02b}({self.first.name})",
            "second": f"{self.second.code:02b}({self.second.name})",
            "xor": self.xor,
            "final": BELL_TEXT[self.final] if self.final is not None else None,
            "global_phase": self.phase,
            "matches_table": self.ok,
        }


def transformation_rows() -> list[TransformationRow]:
    """Recompute every row with explicit 4x4 matrices and compare."""
    rows = []
    for first_bits, second_bits, xor_bits, final in TRANSFORMATION_TABLE:
        first, second = PauliOp(int(first_bits, 2)), PauliOp(int(second_bits, 2))
        state = apply_pauli(second, 1, apply_pauli(first, 1, make_bell(BellLabel.PHI_PLUS)))
        label = identify_bell(state)
        phase = int(round(np.real(np.vdot(label.state, state)))) if label is not None else 0
        rows.append(TransformationRow(
            first, second, f"{first.code ^ second.code:02b}", label, phase, xor_bits, final,
        ))
    return rows
