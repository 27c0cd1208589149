"""Monte Carlo LZ trie keyed by Karp-Rabin fingerprints.

A node is the fingerprint of its whole factor string, so navigating to a
child only extends the running fingerprint by one character and looks it up
in a :py:class:`~lztrie.probing.ProbingTable`. Two different factors with the
same fingerprint are silently merged; :py:func:`factorize_verified` detects
the resulting wrong factorizations.
"""

from __future__ import annotations

import abc
import random
import warnings
from collections.abc import Sequence
from dataclasses import dataclass
from typing import ClassVar, Literal

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
from lztrie.factorize import Factor, factorize_lz78, factorize_lzw, verify_factorization
from lztrie.hash_families import scramble64
from lztrie.probing import ProbingTable, TableMode

RollingFamily = Literal["fermat", "id37"]
LzFormat = Literal["lz78", "lzw"]

DEFAULT_WIDTH = 64


class MonteCarloWarning(UserWarning):
    """A fingerprint-based factorization runs without verification."""


class CollisionDetected(ValueError):
    """The factorization computed with fingerprints does not decode to the
    input: two factors had equal fingerprints.
    """

    def __init__(self, factors: Sequence[Factor]):
        self.factors = list(factors)
        super().__init__(
            f"fingerprint collision detected: the {len(self.factors)} factors "
            "do not reproduce the input"
        )


def fermat_extend(fp: int, c: int, w: int = DEFAULT_WIDTH) -> int:
    """Append character code ``c`` to a Fermat fingerprint (base ``sigma + 1``)."""
    return (fp * (SIGMA + 1) + c - 1) & ((1 << w) - 1)


def id37_extend(fp: int, c: int, base: int, psi: Sequence[int], w: int = DEFAULT_WIDTH) -> int:
    """Append character code ``c`` to an ID37 fingerprint with odd ``base``
    and per-character randomization ``psi``."""
    return (fp * base + psi[c - 1]) & ((1 << w) - 1)


class RollingFn(abc.ABC):
    """Rolling hash function on ``w``-bit fingerprints."""

    family: ClassVar[str]

    def __init__(self, w: int = DEFAULT_WIDTH):
        if not 1 <= w <= 64:
            raise ValueError(f"fingerprint width must be in [1, 64], got {w}")
        self.w = w
        self.mask = (1 << w) - 1

    def empty(self) -> int:
        """Fingerprint of the empty string."""
        return 0

    @abc.abstractmethod
    def extend(self, fp: int, c: int) -> int:
        """Fingerprint of the string of ``fp`` followed by character code ``c``."""
        ...

    def fingerprint(self, data: bytes) -> int:
        fp = self.empty()
        for byte in data:
            fp = self.extend(fp, byte + 1)
        return fp

    def __repr__(self) -> str:
        return f"{type(self).__name__}(w={self.w})"


class FermatFn(RollingFn):
    """``sum (T[i] - 1) (sigma + 1)**(|T| - i) mod 2**w``, evaluated with
    Horner's rule.

    Leading characters of code 1 (the byte 0) contribute nothing, so
    ``"\\x00X"`` and ``"X"`` always share a fingerprint.
    """

    family = "fermat"

    def extend(self, fp: int, c: int) -> int:
        return (fp * (SIGMA + 1) + c - 1) & self.mask


class Id37Fn(RollingFn):
    """Randomized polynomial fingerprint ``fp B + psi(c) mod 2**w``.

    The odd base ``B`` and the table ``psi`` of one random ``w``-bit value
    per character are drawn from ``seed``.
    """

    family = "id37"

    def __init__(self, w: int = DEFAULT_WIDTH, seed: int = DEFAULT_SEED):
        super().__init__(w)
        rng = random.Random(seed)
        self.base = rng.getrandbits(w) | 1
        self.psi = tuple(rng.getrandbits(w) for _ in range(SIGMA))

    def extend(self, fp: int, c: int) -> int:
        return id37_extend(fp, c, self.base, self.psi, self.w)


def make_rolling_fn(
    family: RollingFamily = "id37", w: int = DEFAULT_WIDTH, seed: int = DEFAULT_SEED
) -> RollingFn:
    if family == "fermat":
        return FermatFn(w)
    if family == "id37":
        return Id37Fn(w, seed)
    raise ValueError(f"unknown rolling hash family {family!r}; expected 'fermat' or 'id37'")


@dataclass(frozen=True, slots=True)
class RollingState:
    """Node handle of the fingerprint trie: fingerprint and length of the
    factor prefix read so far, and its label (0 at the root).
    """

    fp: int
    depth: int
    label: int


@register_backend("rolling", 5)
class RollingTrie(TrieBackend):
    """Fingerprint trie over a power-of-two probing table.

    The root is implicit: it is never stored in the table, so an empty
    fingerprint never matches it.

    Parameters
    ----------
    account : AllocAccount, optional
    seed : int
        Seed of the randomized fingerprint family.
    rolling_fn : {"id37", "fermat"}
    scramble : bool
        Address the table through :py:func:`~lztrie.hash_families.scramble64`
        of the fingerprint instead of its low bits. Always set for the fitted
        table of ``rolling+``.
    width : int
        Fingerprint width in bits.

    """

    table_mode: ClassVar[TableMode] = "power_of_two"

    def __init__(
        self,
        account: AllocAccount | None = None,
        seed: int = DEFAULT_SEED,
        rolling_fn: RollingFamily = "id37",
        scramble: bool = False,
        width: int = DEFAULT_WIDTH,
    ):
        super().__init__(account)
        self._fn = make_rolling_fn(rolling_fn, width, seed)
        # scaled-division addressing reads the high bits, which short
        # fingerprints leave empty
        self.scramble = scramble or self.table_mode == "fitted"
        self._table = ProbingTable(
            (width + 7) // 8,
            mode=self.table_mode,
            address_hash=scramble64 if self.scramble else None,
            hash_bits=64 if self.scramble else width,
            account=self._account,
            arena=self.name,
            hint=self._table_hint,
        )

    @property
    def rolling_fn(self) -> RollingFn:
        return self._fn

    @property
    def table(self) -> ProbingTable:
        return self._table

    def _table_hint(self) -> int | None:
        if self.table_mode == "fitted":
            return self.settled_capacity_hint()
        return self.capacity_hint()

    def root(self) -> RollingState:
        return RollingState(self._fn.empty(), 0, 0)

    def child_or_insert(self, node: RollingState, c: int, new_label: int) -> Found | Inserted:
        fp = self._fn.extend(node.fp, c)
        label, inserted = self._table.find_or_insert(fp, new_label)
        if inserted:
            return Inserted(label)
        return Found(RollingState(fp, node.depth + 1, label), label)

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


@register_backend("rolling+", 6)
class RollingPlusTrie(RollingTrie):
    """:py:class:`RollingTrie` with a scrambled table fitted to the resize hint."""

    table_mode = "fitted"


def warn_unverified(backend: str) -> None:
    warnings.warn(
        f"backend {backend!r} computes the factorization with fingerprints and may "
        "return a wrong result on a fingerprint collision; verify the output to detect it",
        MonteCarloWarning,
        stacklevel=2,
    )


def factorize_verified(
    data: bytes, trie: TrieBackend, format: LzFormat = "lz78"
) -> list[Factor]:
    """Factorize ``data`` and check the result by decoding it.

    Raises
    ------
    CollisionDetected
        If the factors do not reproduce ``data``.

    """
    factors: list[Factor]
    if format == "lz78":
        factors = list(factorize_lz78(data, trie))
    elif format == "lzw":
        factors = list(factorize_lzw(data, trie))
    else:
        raise ValueError(f"unknown format {format!r}; expected 'lz78' or 'lzw'")
    if not verify_factorization(data, factors):
        raise CollisionDetected(factors)
    return factors
