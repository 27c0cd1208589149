from __future__ import annotations

from collections.abc import Iterator, Mapping
from typing import TypeVar

import numpy as np

K = TypeVar("K")
V = TypeVar("V")


class Frozen(Mapping[K, V]):
    """Read-only view of a mapping. The wrapped (mutable) mapping stays
    reachable under the `mapping` attribute.
    """

    __slots__ = ("mapping",)

    def __init__(self, mapping: Mapping[K, V]):
        self.mapping = mapping

    def __getitem__(self, key: K) -> V:
        return self.mapping[key]

    def __iter__(self) -> Iterator[K]:
        return iter(self.mapping)

    def __len__(self) -> int:
        return len(self.mapping)

    def __contains__(self, key: object) -> bool:
        return key in self.mapping

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.mapping!r})"


def FrozenDict(*args, **kwargs) -> Frozen:
    return Frozen(dict(*args, **kwargs))


def ceil_log2(x: int) -> int:
    """Return ``ceil(lg x)`` for a positive integer (0 for ``x == 1``)."""
    if x < 1:
        raise ValueError(f"ceil_log2 is undefined for {x!r}")
    return (x - 1).bit_length()


def floor_log2(x: int) -> int:
    """Return ``floor(lg x)`` for a positive integer."""
    if x < 1:
        raise ValueError(f"floor_log2 is undefined for {x!r}")
    return x.bit_length() - 1


def next_power_of_two(x: int) -> int:
    """Smallest power of two that is ``>= x`` (1 for ``x <= 1``)."""
    return 1 if x <= 1 else 1 << (x - 1).bit_length()


def resized(array: np.ndarray, length: int) -> np.ndarray:
    """Return a zero-padded copy of ``array`` with the given length."""
    out = np.zeros(length, dtype=array.dtype)
    keep = min(length, len(array))
    out[:keep] = array[:keep]
    return out
