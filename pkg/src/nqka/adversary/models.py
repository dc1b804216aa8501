"""Attack strategies that act on qubits while they are on the wire.

An attack sees whole frames and cannot tell decoys from message qubits, so
it treats every qubit alike.  Frames call back into the two hooks
``disturb_qubits`` (lone qubits) and ``disturb_pair_halves`` (one half of
an entangled pair) so the same strategy works against single-photon decoy
frames and Bell-pair decoy frames.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

import numpy as np

from ..qcore import PauliOp, batch

POLICIES = ("z", "x", "random")


def _as_set(values: Optional[Iterable[int]]) -> Optional[frozenset]:
    return None if values is None else frozenset(int(v) for v in values)


@dataclass(frozen=True)
class AttackModel:
    """Base strategy: touches nothing.

    ``rings`` / ``hops`` restrict which transmissions are intercepted
    (``None`` means all of them).
    """

    rings: Optional[frozenset] = field(default=None, kw_only=True)
    hops: Optional[frozenset] = field(default=None, kw_only=True)

    def __post_init__(self):
        object.__setattr__(self, "rings", _as_set(self.rings))
        object.__setattr__(self, "hops", _as_set(self.hops))

    @property
    def intercepts(self) -> bool:
        return False

    def targets(self, ring_id: int, hop: int) -> bool:
        if not self.intercepts:
            return False
        return (self.rings is None or ring_id in self.rings) and (
            self.hops is None or hop in self.hops
        )

    def disturb_qubits(self, amps: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        return amps

    def disturb_pair_halves(self, amps: np.ndarray, qubit: int, rng: np.random.Generator) -> np.ndarray:
        return amps

    def spec(self) -> str:
        return "none"

    def _scope(self) -> str:
        if self.hops is None:
            return ""
        return "@" + ",".join(str(h) for h in sorted(self.hops))


@dataclass(frozen=True)
class Honest(AttackModel):
    pass


@dataclass(frozen=True)
class Flip(AttackModel):
    """Apply one fixed Pauli to every qubit in transit."""

    op: PauliOp = PauliOp.X

    def __post_init__(self):
        super().__post_init__()
        op = PauliOp.parse(self.op) if isinstance(self.op, str) else PauliOp(self.op)
        if op is PauliOp.I:
            raise ValueError("a flip attack needs a non-identity Pauli")
        object.__setattr__(self, "op", op)

    @property
    def intercepts(self) -> bool:
        return True

    def disturb_qubits(self, amps, rng):
        return batch.apply_pauli_qubits(amps, self.op.code)

    def disturb_pair_halves(self, amps, qubit, rng):
        return batch.apply_pauli_pairs(amps, self.op.code, qubit)

    def spec(self) -> str:
        return f"flip:{self.op.name}{self._scope()}"


@dataclass(frozen=True)
class InterceptResend(AttackModel):
    """Measure every qubit (Z, X or random basis) and resend what was seen."""

    policy: str = "random"

    def __post_init__(self):
        super().__post_init__()
        policy = self.policy.lower()
        if policy not in POLICIES:
            raise ValueError(f"basis policy must be one of {POLICIES}, got {self.policy!r}")
        object.__setattr__(self, "policy", policy)

    @property
    def intercepts(self) -> bool:
        return True

    def _bases(self, m: int, rng: np.random.Generator) -> np.ndarray:
        if self.policy == "z":
            return np.zeros(m, dtype=np.intp)
        if self.policy == "x":
            return np.ones(m, dtype=np.intp)
        return rng.integers(0, 2, size=m)

    def disturb_qubits(self, amps, rng):
        _, post = batch.measure_qubits(amps, self._bases(amps.shape[0], rng), rng)
        return post

    def disturb_pair_halves(self, amps, qubit, rng):
        _, post = batch.measure_pair_qubit(amps, qubit, self._bases(amps.shape[0], rng), rng)
        return post

    def spec(self) -> str:
        return f"intercept:{self.policy}{self._scope()}"


@dataclass(frozen=True)
class Collusion(AttackModel):
    """Insiders pooling keys to cancel an honest party's contribution.

    This strategy changes the schedule and the colluders' encodings; it
    never touches qubits on the wire.
    """

    colluders: frozenset = frozenset()
    target: int = 2
    respect_barrier: bool = True

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "colluders", frozenset(self.colluders))
        if self.target in self.colluders:
            raise ValueError("the target cannot be one of the colluders")

    def spec(self) -> str:
        names = ",".join(str(c) for c in sorted(self.colluders))
        suffix = "" if self.respect_barrier else ":nobarrier"
        return f"collude:{names}->{self.target}{suffix}"


HONEST = Honest()


def intercept(frame, model: Union[AttackModel, None], rng: np.random.Generator):
    """Return the frame as it looks after ``model`` has handled it."""
    if model is None or not model.intercepts:
        return frame
    return frame.tampered(model, rng)


def flip_key_influence(parties: int, *ops: PauliOp) -> int:
    """XOR-code shift on the final Bell outcome from undetected flips.

    Pauli codes compose by XOR up to a global sign, so flips on one ring
    shift the measured symbol by the XOR of their codes, whatever N is.
    """
    if parties < 2:
        raise ValueError("need at least two parties")
    shift = 0
    for op in ops:
        op = PauliOp.parse(op) if isinstance(op, str) else PauliOp(op)
        shift ^= op.code
    return shift
