from __future__ import annotations

from collections.abc import Iterator

from lztrie.backend import Found, Inserted, register_backend
from lztrie.binary import ArrayTrie


@register_backend("ternary", 1)
class TernaryTrie(ArrayTrie):
    """Ternary search trie.

    The children of a node form a binary search tree ordered by character,
    linked through the ``lo`` and ``hi`` arrays; ``child`` points to the
    root of a node's children tree. New children become leaves of that tree
    and are never rotated.
    """

    link_arrays = ("child", "lo", "hi")
    literal_chain = "hi"

    def child_or_insert(self, node: int, c: int, new_label: int) -> Found | Inserted:
        links = self._links
        current = self._root_child if node == 0 else int(links["child"][node - 1])
        self.last_walk = 0

        if current == 0:
            self._append(new_label, c)
            if node == 0:
                self._root_child = new_label
            else:
                self._links["child"][node - 1] = new_label
            return Inserted(new_label)

        ch = c - 1
        chars, lo, hi = self._chars, links["lo"], links["hi"]
        while True:
            here = chars[current - 1]
            if ch == here:
                return Found(current, current)
            side = "lo" if ch < here else "hi"
            following = int((lo if side == "lo" else hi)[current - 1])
            if following == 0:
                break
            current = following
            self.last_walk += 1

        self._append(new_label, c)
        self._links[side][current - 1] = new_label
        return Inserted(new_label)

    def iter_children(self, node: int) -> Iterator[tuple[int, int]]:
        """Yield ``(character code, label)`` of the children of ``node`` in
        in-order (by character) of their search tree.
        """
        start = self._root_child if node == 0 else int(self._links["child"][node - 1])
        stack: list[int] = []
        current = start
        while stack or current:
            while current:
                stack.append(current)
                current = int(self._links["lo"][current - 1])
            current = stack.pop()
            yield int(self._chars[current - 1]) + 1, current
            current = int(self._links["hi"][current - 1])
