"""Open-addressing hash table with linear probing, shared by the hash tries
and the fingerprint tries.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Iterator
from typing import Literal

import numpy as np

from lztrie.accounting import AllocAccount
from lztrie.utils import next_power_of_two

logger = logging.getLogger(__name__)

TableMode = Literal["power_of_two", "fitted"]

INITIAL_ALPHA = 0.3
MAX_ALPHA = 0.95


class ProbingTable:
    """Linear-probing table mapping integer keys to positive 32-bit values.

    Keys are stored packed in ``key_bytes`` bytes each, values in a
    ``uint32`` array where 0 marks an empty slot. At most ``m = floor(alpha M)``
    entries are stored; inserting beyond that grows the table.

    Parameters
    ----------
    key_bytes : int
        Width of a stored key (5 for the 40-bit node keys, 8 for 64-bit
        fingerprints).
    mode : {"power_of_two", "fitted"}
        ``"power_of_two"`` keeps ``M`` a power of two and addresses a key by
        ``h & (M - 1)``; ``"fitted"`` sizes the table from the resize hint
        and addresses a key by ``(M h) >> hash_bits``. A fitted table doubles
        until ``ceil(hint / 0.95)`` is below ``2 M``.
    address_hash : callable, optional
        Function applied to a key to get its hash value (identity if None).
    hash_bits : int
        Width of the hash values.
    account : AllocAccount, optional
        Allocation account charged with the table arrays.
    arena : str
        Arena label used in ``account``.
    hint : callable, optional
        Returns the expected final number of entries, or None.

    """

    def __init__(
        self,
        key_bytes: int,
        mode: TableMode = "power_of_two",
        address_hash: Callable[[int], int] | None = None,
        hash_bits: int = 64,
        account: AllocAccount | None = None,
        arena: str = "table",
        hint: Callable[[], int | None] | None = None,
    ):
        if mode not in ("power_of_two", "fitted"):
            raise ValueError(f"unknown table mode {mode!r}")
        if not 1 <= key_bytes <= 8:
            raise ValueError(f"key width must be 1 to 8 bytes, got {key_bytes}")
        self.key_bytes = key_bytes
        self.mode = mode
        self.hash_bits = hash_bits
        self._address_hash = address_hash
        self._account = account if account is not None else AllocAccount()
        self._arena = arena
        self._hint = hint

        self.alpha = INITIAL_ALPHA
        self.collisions = 0
        self._M = 0
        self._count = 0
        self._keys = bytearray()
        self._values = np.zeros(0, dtype=np.uint32)

    @property
    def M(self) -> int:
        """Number of slots."""
        return self._M

    @property
    def m(self) -> int:
        """Maximum number of entries before the table grows."""
        return math.floor(self.alpha * self._M)

    @property
    def slot_bytes(self) -> int:
        return self.key_bytes + 4

    @property
    def nbytes(self) -> int:
        return self._M * self.slot_bytes

    def __len__(self) -> int:
        return self._count

    def reserve(self, entries: int) -> None:
        """Size an empty table for ``entries`` entries at the initial load factor."""
        if self._count or entries <= 0:
            return
        slots = math.ceil(entries / self.alpha)
        if self.mode == "power_of_two":
            slots = next_power_of_two(slots)
        if slots > self._M:
            self._rebuild(slots)

    def _address(self, key: int) -> int:
        h = self._address_hash(key) if self._address_hash is not None else key
        if self.mode == "power_of_two":
            return h & (self._M - 1)
        return (self._M * h) >> self.hash_bits

    def _key_at(self, slot: int) -> int:
        start = slot * self.key_bytes
        return int.from_bytes(self._keys[start : start + self.key_bytes], "little")

    def _probe(self, key: int) -> tuple[int, bool]:
        """Return ``(slot, found)``: the slot holding ``key`` or the empty slot
        ending its probe sequence.
        """
        M, values = self._M, self._values
        slot = self._address(key)
        while values[slot]:
            if self._key_at(slot) == key:
                return slot, True
            self.collisions += 1
            slot += 1
            if slot == M:
                slot = 0
        return slot, False

    def _store(self, slot: int, key: int, value: int) -> None:
        start = slot * self.key_bytes
        self._keys[start : start + self.key_bytes] = key.to_bytes(self.key_bytes, "little")
        self._values[slot] = value

    def get(self, key: int) -> int | None:
        if not self._count:
            return None
        slot, found = self._probe(key)
        return int(self._values[slot]) if found else None

    def find_or_insert(self, key: int, value: int) -> tuple[int, bool]:
        """Look up ``key``; store it with ``value`` if it is missing.

        Returns
        -------
        value : int
            The value stored for ``key``.
        inserted : bool
            True if ``key`` was missing.

        """
        if key < 0 or key >> (8 * self.key_bytes):
            raise ValueError(f"key {key} does not fit in {self.key_bytes} bytes")
        if not 0 < value < 1 << 32:
            raise ValueError(f"value {value} is not a positive 32-bit integer")

        slot: int | None = None
        if self._count:
            slot, found = self._probe(key)
            if found:
                return int(self._values[slot]), False
        if self._count >= self.m:
            M = self._M
            self._grow()
            if self._M != M:
                slot = None
        if slot is None:
            slot, _ = self._probe(key)
        self._store(slot, key, value)
        self._count += 1
        return value, True

    def _grow(self) -> None:
        hint = self._hint() if self._hint is not None else None
        M = self._M
        if M == 0:
            self._rebuild(next_power_of_two(math.ceil(1 / self.alpha)))
            return

        if self.mode == "fitted":
            if hint is not None and hint > self._count:
                if hint <= math.floor(MAX_ALPHA * M):
                    logger.debug("hint %d fits M=%d at load %.2f: no resize", hint, M, MAX_ALPHA)
                    self.alpha = MAX_ALPHA
                    return
                slots = math.ceil(hint / MAX_ALPHA)
                if slots < 2 * M:
                    logger.debug("fitting table to hint %d: M=%d", hint, slots)
                    self.alpha = MAX_ALPHA
                    self._rebuild(slots)
                    return
            self._rebuild(2 * M)
            return

        if hint is not None and self.alpha < MAX_ALPHA:
            if hint <= math.floor(MAX_ALPHA * M) and math.floor(MAX_ALPHA * M) > self._count:
                logger.debug("hint %d fits M=%d at load %.2f: no resize", hint, M, MAX_ALPHA)
                self.alpha = MAX_ALPHA
                return
            if hint <= math.floor(MAX_ALPHA * 2 * M):
                self.alpha = MAX_ALPHA
        self._rebuild(2 * M)

    def _rebuild(self, slots: int) -> None:
        old_keys, old_values, old_M = self._keys, self._values, self._M
        self._account.alloc(self._arena, slots * self.slot_bytes)
        self._keys = bytearray(slots * self.key_bytes)
        self._values = np.zeros(slots, dtype=np.uint32)
        self._M = slots

        for slot in np.flatnonzero(old_values).tolist():
            start = slot * self.key_bytes
            key = int.from_bytes(old_keys[start : start + self.key_bytes], "little")
            target, _ = self._probe(key)
            self._store(target, key, int(old_values[slot]))

        self._account.free(self._arena, old_M * self.slot_bytes)
        logger.debug(
            "%s: rebuilt table M=%d -> M=%d (%d entries)", self._arena, old_M, slots, self._count
        )

    def items(self) -> Iterator[tuple[int, int]]:
        """Iterate over the stored ``(key, value)`` pairs in slot order."""
        for slot in np.flatnonzero(self._values).tolist():
            yield self._key_at(slot), int(self._values[slot])

    def probe_invariant_holds(self) -> bool:
        """Check that every key is reachable from its initial address without
        crossing an empty slot.
        """
        values = self._values
        for slot in np.flatnonzero(values).tolist():
            position = self._address(self._key_at(slot))
            while position != slot:
                if not values[position]:
                    return False
                position = (position + 1) % self._M
        return True

    def __repr__(self) -> str:
        return (
            f"{type(self).__name__}(mode={self.mode!r}, M={self._M}, "
            f"entries={self._count}, alpha={self.alpha})"
        )
