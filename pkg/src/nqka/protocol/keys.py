"""Secret keys as sequences of 2-bit symbols.

Symbol values double as Pauli codes: 00 -> I, 01 -> Z, 10 -> X, 11 -> Y.
"""
from __future__ import annotations

from functools import reduce
from typing import Iterable, Iterator, Sequence

import numpy as np

from ..qcore import PauliOp

SYMBOLS = ("00", "01", "10", "11")


def symbol_bits(symbol: int) -> str:
    return SYMBOLS[symbol]


def symbol_to_op(symbol: int) -> PauliOp:
    return PauliOp(symbol)


class SecretKey:
    """An immutable key of ``n`` symbols (``2n`` bits)."""

    __slots__ = ("symbols",)

    def __init__(self, symbols: Iterable[int] | np.ndarray):
        arr = np.array(list(symbols) if not isinstance(symbols, np.ndarray) else symbols, dtype=np.int64).ravel()
        if arr.size == 0:
            raise ValueError("a key needs at least one symbol")
        if arr.min() < 0 or arr.max() > 3:
            raise ValueError("key symbols must lie in 0..3")
        arr = arr.astype(np.uint8)
        arr.flags.writeable = False
        self.symbols = arr

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "SecretKey":
        return cls(rng.integers(0, 4, size=n))

    @classmethod
    def zeros(cls, n: int) -> "SecretKey":
        return cls(np.zeros(n, dtype=np.uint8))

    @classmethod
    def from_bits(cls, bits: str) -> "SecretKey":
        bits = bits.replace(" ", "")
        if len(bits) % 2 or set(bits) - {"0", "1"}:
            raise ValueError(f"not an even-length bit string: {bits!r}")
        return cls(int(bits[i : i + 2], 2) for i in range(0, len(bits), 2))

    def bits(self) -> str:
        return "".join(SYMBOLS[s] for s in self.symbols)

    def ops(self) -> list[PauliOp]:
        return [PauliOp(int(s)) for s in self.symbols]

    def __len__(self) -> int:
        return int(self.symbols.size)

    def __iter__(self) -> Iterator[int]:
        return (int(s) for s in self.symbols)

    def __getitem__(self, i: int) -> int:
        return int(self.symbols[i])

    def __xor__(self, other: "SecretKey") -> "SecretKey":
        if len(self) != len(other):
            raise ValueError("keys differ in length")
        return SecretKey(self.symbols ^ other.symbols)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SecretKey):
            return NotImplemented
        return np.array_equal(self.symbols, other.symbols)

    def __hash__(self) -> int:
        return hash(self.symbols.tobytes())

    def __repr__(self) -> str:
        return f"SecretKey({self.bits()!r})"


def xor_keys(keys: Sequence[SecretKey]) -> SecretKey:
    return reduce(lambda a, b: a ^ b, keys)
