"""Compact hashing: a linear-probing table that stores quotients of a
bijective hash instead of keys.

A key ``i`` with hash value ``h(i)`` has its initial address
``h1 = h(i) mod M`` and quotient ``h2 = h(i) div M``. A slot only keeps
``h2`` and the value; ``h1`` is restored from two bit vectors:

- ``homes[j]`` is set if some stored key has initial address ``j``;
- ``changes[j]`` is set if slot ``j`` holds the first entry of a group, the
  entries sharing one initial address.

Within a cluster (a maximal run of occupied slots) groups are sorted by
their initial address, so the ``r``-th set ``homes`` bit of a cluster
belongs to the ``r``-th group.
"""

from __future__ import annotations

import logging
import math
import random
from collections import deque
from collections.abc import Iterator

from bitarray import bitarray

from lztrie.accounting import AllocAccount
from lztrie.backend import (
    DEFAULT_SEED,
    SIGMA,
    BackendStats,
    Found,
    Inserted,
    TrieBackend,
    register_backend,
)
from lztrie.hash_families import BijectiveHash, HashFamily, draw_bijection
from lztrie.packed import IntVector
from lztrie.utils import floor_log2, next_power_of_two

logger = logging.getLogger(__name__)

DEFAULT_ALPHA = 0.3
MIN_SLOTS = 16


class _Slots:
    """Arrays of one table generation and the displacement bookkeeping."""

    def __init__(self, M: int, m: int, h: BijectiveHash):
        self.M = M
        self.m = m
        self.h = h
        self.address_bits = floor_log2(M)
        self.quotient_bits = ((h.range_size - 1) >> self.address_bits).bit_length()
        self.value_bits = m.bit_length()
        self.value_mask = (1 << self.value_bits) - 1
        self.entries = IntVector(M, self.quotient_bits + self.value_bits)
        self.homes = bitarray(M, endian="big")
        self.homes.setall(0)
        self.changes = bitarray(M, endian="big")
        self.changes.setall(0)

    @property
    def nbytes(self) -> int:
        return self.entries.nbytes + 2 * ((self.M + 7) // 8)

    def split(self, key: int) -> tuple[int, int]:
        x = self.h.forward(key)
        return x & (self.M - 1), x >> self.address_bits

    def occupied(self, slot: int) -> bool:
        return not self.entries.is_zero(slot)

    def cluster_start(self, slot: int) -> int:
        M = self.M
        while self.occupied((slot - 1) % M):
            slot = (slot - 1) % M
        return slot

    def count_homes(self, start: int, stop: int) -> int:
        """Number of set ``homes`` bits in the cyclic range ``[start, stop]``."""
        if start <= stop:
            return self.homes.count(1, start, stop + 1)
        return self.homes.count(1, start, self.M) + self.homes.count(1, 0, stop + 1)

    def nth_group(self, start: int, r: int) -> int | None:
        """Slot of the ``r``-th group of the cluster starting at ``start``, or
        None if the cluster has fewer groups.
        """
        slot = start
        while self.occupied(slot):
            if self.changes[slot]:
                r -= 1
                if r == 0:
                    return slot
            slot = (slot + 1) % self.M
        return None

    def group(self, first: int) -> Iterator[int]:
        yield first
        slot = (first + 1) % self.M
        while self.occupied(slot) and not self.changes[slot]:
            yield slot
            slot = (slot + 1) % self.M

    def group_of(self, h1: int) -> int:
        start = self.cluster_start(h1)
        first = self.nth_group(start, self.count_homes(start, h1))
        if first is None:
            raise RuntimeError(f"compact table is corrupted: no group for address {h1}")
        return first

    def find(self, h1: int, q: int) -> tuple[int | None, int]:
        """Return the value stored for ``(h1, q)`` (None if absent) and the
        number of non-matching entries examined.
        """
        if not self.homes[h1]:
            return None, 0
        examined = 0
        for slot in self.group(self.group_of(h1)):
            entry = self.entries[slot]
            if entry >> self.value_bits == q:
                return entry & self.value_mask, examined
            examined += 1
        return None, examined

    def insert(self, h1: int, q: int, value: int) -> None:
        entry = (q << self.value_bits) | value
        if not self.occupied(h1):
            self.entries[h1] = entry
            self.homes[h1] = 1
            self.changes[h1] = 1
            return

        if self.homes[h1]:
            *_, last = self.group(self.group_of(h1))
            position = (last + 1) % self.M
            new_group = False
        else:
            start = self.cluster_start(h1)
            position = self.nth_group(start, self.count_homes(start, h1) + 1)
            if position is None:
                position = self._cluster_end(start)
            self.homes[h1] = 1
            new_group = True

        self._shift_right(position)
        self.entries[position] = entry
        self.changes[position] = new_group

    def _cluster_end(self, slot: int) -> int:
        while self.occupied(slot):
            slot = (slot + 1) % self.M
        return slot

    def _shift_right(self, position: int) -> None:
        M = self.M
        slot = self._cluster_end(position)
        while slot != position:
            previous = (slot - 1) % M
            self.entries[slot] = self.entries[previous]
            self.changes[slot] = self.changes[previous]
            slot = previous

    def __iter__(self) -> Iterator[tuple[int, int, int]]:
        """Yield ``(initial address, quotient, value)`` of all entries."""
        M = self.M
        empty = next((slot for slot in range(M) if not self.occupied(slot)), None)
        if empty is None:
            return
        pending: deque[int] = deque()
        home = -1
        for step in range(1, M + 1):
            slot = (empty + step) % M
            if not self.occupied(slot):
                continue
            if self.homes[slot]:
                pending.append(slot)
            if self.changes[slot]:
                home = pending.popleft()
            entry = self.entries[slot]
            yield home, entry >> self.value_bits, entry & self.value_mask


class CompactTable:
    """Compact hash table mapping keys of ``[0 .. (m+1) sigma - 1]`` to labels
    in ``[1..m]``.

    ``M`` is a power of two and doubles when the table holds ``m = floor(alpha M)``
    entries; every growth draws a new bijective hash function and reinserts
    all keys, which are recovered with the inverse of the old function.

    Parameters
    ----------
    sigma : int
        Alphabet size; keys are ``sigma * parent + c - 1``.
    alpha : float
        Maximum load factor.
    family : {"lcg", "xorshift"}
        Family of the bijective hash functions.
    seed : int
        Seed of the random draws.
    account : AllocAccount, optional
    arena : str

    """

    def __init__(
        self,
        sigma: int = SIGMA,
        alpha: float = DEFAULT_ALPHA,
        family: HashFamily = "lcg",
        seed: int = DEFAULT_SEED,
        account: AllocAccount | None = None,
        arena: str = "cht",
    ):
        if not 0 < alpha < 1:
            raise ValueError(f"load factor must be in (0, 1), got {alpha}")
        self.sigma = sigma
        self.alpha = alpha
        self.family = family
        self.collisions = 0
        self._rng = random.Random(seed)
        self._account = account if account is not None else AllocAccount()
        self._arena = arena
        self._count = 0
        self._slots: _Slots | None = None

    @property
    def M(self) -> int:
        return self._slots.M if self._slots is not None else 0

    @property
    def m(self) -> int:
        return self._slots.m if self._slots is not None else 0

    @property
    def hash(self) -> BijectiveHash | None:
        return self._slots.h if self._slots is not None else None

    @property
    def quotient_bits(self) -> int:
        return self._slots.quotient_bits if self._slots is not None else 0

    @property
    def value_bits(self) -> int:
        return self._slots.value_bits if self._slots is not None else 0

    @property
    def key_universe(self) -> int:
        return (self.m + 1) * self.sigma

    @property
    def nbytes(self) -> int:
        return self._slots.nbytes if self._slots is not None else 0

    def __len__(self) -> int:
        return self._count

    def reserve(self, entries: int) -> None:
        if self._count or entries <= 0:
            return
        M = max(next_power_of_two(math.ceil(entries / self.alpha)), MIN_SLOTS)
        if M > self.M:
            self._rebuild(M)

    def _split(self, key: int) -> tuple[int, int]:
        assert self._slots is not None
        if not 0 <= key < self.key_universe:
            raise ValueError(f"key {key} is outside [0, {self.key_universe})")
        return self._slots.split(key)

    def get(self, key: int) -> int | None:
        if self._slots is None:
            return None
        value, examined = self._slots.find(*self._split(key))
        self.collisions += examined
        return value

    def find_or_insert(self, key: int, value: int) -> tuple[int, bool]:
        """Look up ``key``; store it with ``value`` if it is missing.

        Returns the stored value and whether ``key`` was inserted.
        """
        if value < 1:
            raise ValueError(f"value must be positive, got {value}")
        found = self.get(key)
        if found is not None:
            return found, False
        while self._count >= self.m or value > self.m:
            self._rebuild(max(2 * self.M, MIN_SLOTS))
        assert self._slots is not None
        self._slots.insert(*self._split(key), value)
        self._count += 1
        return value, True

    def items(self) -> Iterator[tuple[int, int]]:
        """Iterate over ``(key, value)`` pairs, recovering each key from its
        quotient and initial address.
        """
        if self._slots is None:
            return
        slots = self._slots
        for home, q, value in slots:
            yield slots.h.inverse((q << slots.address_bits) | home), value

    def _rebuild(self, M: int) -> None:
        m = math.floor(self.alpha * M)
        h = draw_bijection((m + 1) * self.sigma, self._rng, self.family)
        new = _Slots(M, m, h)
        self._account.alloc(self._arena, new.nbytes)

        old = self._slots
        if old is not None:
            for key, value in self.items():
                h1, q = new.split(key)
                new.insert(h1, q, value)
            self._account.free(self._arena, old.nbytes)
        self._slots = new
        logger.debug(
            "%s: rebuilt with M=%d, %d-bit quotients, %d-bit values, %r",
            self._arena,
            M,
            new.quotient_bits,
            new.value_bits,
            h,
        )

    def __repr__(self) -> str:
        return f"{type(self).__name__}(M={self.M}, entries={self._count}, family={self.family!r})"


@register_backend("cht", 4)
class CompactTrie(TrieBackend):
    """LZ trie stored in a :py:class:`CompactTable`.

    Like :py:class:`~lztrie.hash_trie.HashTrie`, a node is its label and the
    edge to a child by ``c`` is keyed by ``sigma * label + c - 1``, but keys
    are never stored: each slot holds a quotient and a label packed in
    ``lg(2 alpha sigma) + lg m`` bits.

    Parameters
    ----------
    account : AllocAccount, optional
    seed : int
        Seed of the hash function draws.
    hash_family : {"lcg", "xorshift"}
    alpha : float
        Maximum load factor.

    """

    def __init__(
        self,
        account: AllocAccount | None = None,
        seed: int = DEFAULT_SEED,
        hash_family: HashFamily = "lcg",
        alpha: float = DEFAULT_ALPHA,
    ):
        super().__init__(account)
        self._table = CompactTable(
            alpha=alpha, family=hash_family, seed=seed, account=self._account, arena=self.name
        )

    @property
    def table(self) -> CompactTable:
        return self._table

    def child_or_insert(self, node: int, c: int, new_label: int) -> Found | Inserted:
        label, inserted = self._table.find_or_insert(SIGMA * node + c - 1, new_label)
        if inserted:
            return Inserted(label)
        return Found(label, label)

    def reserve(self, expected_factors: int) -> None:
        self._table.reserve(expected_factors)

    def size(self) -> int:
        return len(self._table)

    def stats(self) -> BackendStats:
        return BackendStats(
            collisions=self._table.collisions,
            table_size_M=self._table.M,
            allocated_bytes=self._account.live_bytes(self.name),
            peak_bytes=self._account.peak_bytes(self.name),
            size=len(self._table),
            index_bits=self._table.value_bits,
        )
