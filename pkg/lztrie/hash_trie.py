from __future__ import annotations

from typing import ClassVar

from lztrie.accounting import AllocAccount
from lztrie.backend import SIGMA, BackendStats, Found, Inserted, TrieBackend, register_backend
from lztrie.hash_families import scramble64
from lztrie.probing import ProbingTable, TableMode

#: Bytes per stored node key ``c - 1 + sigma * label`` (labels below 2**32).
KEY_BYTES = 5


@register_backend("hash", 2)
class HashTrie(TrieBackend):
    """LZ trie stored as a hash table.

    The edge from the node labelled ``l`` to its child by character ``c`` is
    the table entry with key ``c - 1 + sigma * l`` and the child's label as
    value, so a node is represented only by its label. Keys are addressed
    through :py:func:`~lztrie.hash_families.scramble64`.
    """

    table_mode: ClassVar[TableMode] = "power_of_two"

    def __init__(self, account: AllocAccount | None = None):
        super().__init__(account)
        self._table = ProbingTable(
            KEY_BYTES,
            mode=self.table_mode,
            address_hash=scramble64,
            account=self._account,
            arena=self.name,
            hint=self._table_hint,
        )

    @property
    def table(self) -> ProbingTable:
        return self._table

    def _table_hint(self) -> int | None:
        if self.table_mode == "fitted":
            return self.settled_capacity_hint()
        return self.capacity_hint()

    def child_or_insert(self, node: int, c: int, new_label: int) -> Found | Inserted:
        label, inserted = self._table.find_or_insert(c - 1 + SIGMA * node, new_label)
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
        )


@register_backend("hash+", 3)
class HashPlusTrie(HashTrie):
    """:py:class:`HashTrie` whose table is resized to the resize hint instead
    of the next power of two, once less than half of the input remains.
    """

    table_mode = "fitted"
