from __future__ import annotations

import logging
from collections.abc import Iterator

import numpy as np

from lztrie.accounting import AllocAccount
from lztrie.backend import BackendStats, Found, Inserted, TrieBackend, register_backend
from lztrie.utils import resized

logger = logging.getLogger(__name__)


class ArrayTrie(TrieBackend):
    """Common storage of the tries keeping node ``x`` at array position ``x - 1``.

    Subclasses declare the names of their 32-bit link arrays; every trie also
    has one byte array holding the character of each node's incoming edge.
    Arrays double on growth, unless the resize hint fits within the doubled
    size, in which case they are sized to the hint.
    """

    link_arrays: tuple[str, ...] = ()
    literal_chain: str = ""
    index_bits = 32

    def __init__(self, account: AllocAccount | None = None):
        super().__init__(account)
        self._capacity = 0
        self._size = 0
        self._links = {name: np.zeros(0, dtype=np.uint32) for name in self.link_arrays}
        self._chars = np.zeros(0, dtype=np.uint8)
        self._root_child = 0
        self.last_walk = 0

    @property
    def node_bytes(self) -> int:
        return 4 * len(self.link_arrays) + 1

    @property
    def capacity(self) -> int:
        return self._capacity

    @property
    def characters(self) -> bytes:
        """Byte (``c - 1``) on the incoming edge of nodes ``1..size``."""
        return self._chars[: self._size].tobytes()

    def links(self, name: str) -> list[int]:
        """Copy of one link array for nodes ``1..size`` (0 means no link)."""
        return self._links[name][: self._size].tolist()

    def size(self) -> int:
        return self._size

    def reserve(self, expected_factors: int) -> None:
        if expected_factors > self._capacity:
            self._resize(expected_factors)

    def insert_literals(self, sigma: int) -> list[int]:
        # same arrays as inserting 1..sigma one by one, built without walking
        # the growing chain of root children
        if self._size:
            raise ValueError("literal nodes can only be inserted into an empty trie")
        self.reserve(sigma)
        self._chars[:sigma] = np.arange(sigma, dtype=np.uint8)
        self._links[self.literal_chain][: sigma - 1] = np.arange(2, sigma + 1, dtype=np.uint32)
        self._root_child = 1 if sigma else 0
        self._size = sigma
        return list(range(1, sigma + 1))

    def _resize(self, capacity: int) -> None:
        self._alloc(capacity * self.node_bytes)
        self._links = {name: resized(array, capacity) for name, array in self._links.items()}
        self._chars = resized(self._chars, capacity)
        self._free(self._capacity * self.node_bytes)
        logger.debug("%s: resized from %d to %d nodes", self.name, self._capacity, capacity)
        self._capacity = capacity

    def _append(self, label: int, c: int) -> None:
        if label != self._size + 1:
            raise ValueError(f"expected node label {self._size + 1}, got {label}")
        if label > self._capacity:
            doubled = max(2 * self._capacity, 1)
            hint = self.capacity_hint()
            target = min(hint, doubled) if hint is not None and hint >= label else doubled
            self._resize(max(target, label))
        self._chars[label - 1] = c - 1
        self._size = label

    def stats(self) -> BackendStats:
        return BackendStats(
            allocated_bytes=self._account.live_bytes(self.name),
            peak_bytes=self._account.peak_bytes(self.name),
            size=self._size,
            index_bits=self.index_bits,
        )


@register_backend("binary", 0)
class BinaryTrie(ArrayTrie):
    """First-child next-sibling trie.

    Children are kept in the order of their insertion: a missing child is
    appended at the tail of its parent's sibling chain. The root has no array
    slot; the head of its chain is stored separately.
    """

    link_arrays = ("first_child", "next_sibling")
    literal_chain = "next_sibling"

    def child_or_insert(self, node: int, c: int, new_label: int) -> Found | Inserted:
        chars = self._chars
        next_sibling = self._links["next_sibling"]
        current = self._root_child if node == 0 else int(self._links["first_child"][node - 1])
        self.last_walk = 0

        if current == 0:
            self._append(new_label, c)
            if node == 0:
                self._root_child = new_label
            else:
                self._links["first_child"][node - 1] = new_label
            return Inserted(new_label)

        while True:
            if chars[current - 1] == c - 1:
                return Found(current, current)
            following = int(next_sibling[current - 1])
            if following == 0:
                break
            current = following
            self.last_walk += 1

        self._append(new_label, c)
        self._links["next_sibling"][current - 1] = new_label
        return Inserted(new_label)

    def iter_children(self, node: int) -> Iterator[tuple[int, int]]:
        """Yield ``(character code, label)`` of the children of ``node`` in
        sibling-chain order.
        """
        current = self._root_child if node == 0 else int(self._links["first_child"][node - 1])
        while current:
            yield int(self._chars[current - 1]) + 1, current
            current = int(self._links["next_sibling"][current - 1])
