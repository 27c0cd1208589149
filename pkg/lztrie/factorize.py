"""LZ78 and LZW factorization over any :py:class:`~lztrie.backend.TrieBackend`.

Characters are bytes; the byte value ``b`` is handled as character code
``b + 1`` in ``[1..256]`` by the tries.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from typing import NamedTuple

from lztrie.backend import SIGMA, Found, TrieBackend
from lztrie.utils import floor_log2

logger = logging.getLogger(__name__)

FactorIndex = int


class Lz78Factor(NamedTuple):
    """LZ78 factor ``F_x = F_ref ext``.

    ``ext`` is a character code in ``[1..256]``, or None for a final factor
    that ends with the input.
    """

    ref: FactorIndex
    ext: int | None


class LzwFactor(NamedTuple):
    """LZW factor: ``-c`` for the literal character code ``c``, or the
    (positive) referred index ``y``.
    """

    code: int


Factor = Lz78Factor | LzwFactor


@dataclass
class ResizeHintState:
    """Progress of a running factorization, used for resize hints.

    Attributes
    ----------
    n : int
        Total input length.
    r : int
        Number of characters not consumed yet.
    z_prime : int
        Number of factors computed so far.
    base : int
        Number of nodes inserted before parsing started (the literal nodes
        of the LZW trie).

    """

    n: int
    r: int
    z_prime: int = 0
    base: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.r <= self.n:
            raise ValueError(f"remaining characters r={self.r} must be in [0, n={self.n}]")
        if self.z_prime < 0:
            raise ValueError(f"number of factors must be non-negative, got {self.z_prime}")

    @property
    def settled(self) -> bool:
        """True once less than half of the input remains, where the estimate
        no longer extrapolates from the first factors.
        """
        return 2 * self.r < self.n

    def capacity_hint(self) -> int:
        """Expected number of trie nodes at the end of the factorization."""
        return self.base + growth_estimate(self)


def initial_reserve(n: int) -> int:
    """Number of factors to reserve space for before parsing: ``ceil(sqrt(2n))``."""
    if n < 0:
        raise ValueError(f"input length must be non-negative, got {n}")
    root = math.isqrt(2 * n)
    return root if root * root == 2 * n else root + 1


def growth_estimate(state: ResizeHintState) -> int:
    """Estimate the final number of factors from a partial factorization.

    Uses ``z' + 3r / lg r`` in the second half of the input and the linear
    interpolation ``z' + z' r / (n - r)`` before. With nothing parsed yet
    (``r == n``) the interpolation is undefined and the first form is used;
    for ``r <= 1`` the estimate is ``z' + r``.
    """
    n, r, z = state.n, state.r, state.z_prime
    if r <= 1:
        return z + r
    if 2 * r < n or r == n:
        return z + -(-3 * r // floor_log2(r))
    return z + -(-z * r // (n - r))


def lemma1_lower_bound(n: int) -> float:
    """Smallest possible number of LZ78 factors of a text of length ``n``."""
    return math.sqrt(2 * n + 0.25) - 0.5


def lemma1_upper_ratio(n: int, z: int, sigma: int = SIGMA) -> float:
    """Return ``z log_sigma(n) / n``, the constant of the upper factor bound
    realized by a factorization with ``z`` factors.
    """
    if n < 2:
        return 0.0
    return z * math.log(n, max(sigma, 2)) / n


def _input_length(data: Iterable[int], n: int | None) -> int:
    if n is not None:
        if n < 0:
            raise ValueError(f"input length must be non-negative, got {n}")
        return n
    try:
        return len(data)  # type: ignore[arg-type]
    except TypeError:
        raise ValueError("input length must be known: pass n for unsized streams") from None


def _consumed(n: int, r: int) -> None:
    if r < 0:
        raise ValueError(f"input is longer than its declared length {n}")


def _report(kind: str, n: int, z: int) -> None:
    logger.debug(
        "%s factorization: n=%d z=%d upper-bound ratio=%.4f", kind, n, z, lemma1_upper_ratio(n, z)
    )


def iter_lz78(
    data: Iterable[int], trie: TrieBackend, n: int | None = None
) -> Iterator[Lz78Factor]:
    """Compute the LZ78 factorization online, yielding each factor as soon
    as it is complete.

    Parameters
    ----------
    data : iterable of int
        Input bytes (values in ``[0..255]``), e.g. a ``bytes`` object or a
        generator reading a stream.
    trie : TrieBackend
        An empty trie backend.
    n : int, optional
        Input length, required if ``data`` has no ``len()``.

    """
    n = _input_length(data, n)
    hints = ResizeHintState(n=n, r=n)
    trie.bind_hints(hints)
    trie.reserve(initial_reserve(n))

    root = trie.root()
    node, ref, z, r = root, 0, 0, n
    pending = False

    for byte in data:
        c = byte + 1
        r -= 1
        _consumed(n, r)
        hints.r = r
        result = trie.child_or_insert(node, c, z + 1)
        if isinstance(result, Found):
            node, ref, pending = result.node, result.label, True
        else:
            z += 1
            hints.z_prime = z
            yield Lz78Factor(ref, c)
            node, ref, pending = root, 0, False

    if r != 0:
        raise ValueError(f"input is shorter ({n - r}) than its declared length {n}")
    if pending:
        z += 1
        yield Lz78Factor(ref, None)
    _report("LZ78", n, z)


def _lzw_code(label: int) -> int:
    return -label if label <= SIGMA else label - SIGMA


def iter_lzw(data: Iterable[int], trie: TrieBackend, n: int | None = None) -> Iterator[LzwFactor]:
    """Compute the LZW factorization online (see :py:func:`iter_lz78`).

    The literal nodes of all characters are inserted first as children of
    the root with labels ``1..256``; the node created after factor ``x``
    gets label ``256 + x``.
    """
    n = _input_length(data, n)
    hints = ResizeHintState(n=n, r=n, base=SIGMA)
    trie.bind_hints(hints)
    trie.reserve(SIGMA + initial_reserve(n))

    if trie.size():
        raise ValueError("the LZW factorization requires an empty trie")
    literals = [trie.root(), *trie.insert_literals(SIGMA)]

    node = None
    label, z, r = 0, 0, n

    for byte in data:
        c = byte + 1
        r -= 1
        _consumed(n, r)
        hints.r = r
        if node is None:
            node, label = literals[c], c
            continue
        result = trie.child_or_insert(node, c, SIGMA + z + 1)
        if isinstance(result, Found):
            node, label = result.node, result.label
        else:
            z += 1
            hints.z_prime = z
            yield LzwFactor(_lzw_code(label))
            node, label = literals[c], c

    if r != 0:
        raise ValueError(f"input is shorter ({n - r}) than its declared length {n}")
    if node is not None:
        z += 1
        yield LzwFactor(_lzw_code(label))
    _report("LZW", n, z)


def factorize_lz78(
    data: Iterable[int], trie: TrieBackend, n: int | None = None
) -> list[Lz78Factor]:
    """Return the LZ78 factorization of ``data`` computed with ``trie``."""
    return list(iter_lz78(data, trie, n))


def factorize_lzw(data: Iterable[int], trie: TrieBackend, n: int | None = None) -> list[LzwFactor]:
    """Return the LZW factorization of ``data`` computed with ``trie``."""
    return list(iter_lzw(data, trie, n))


def expand_factors(factors: Sequence[Factor]) -> Iterator[bytes]:
    """Yield the bytes of each factor of an LZ78 or LZW factorization.

    Raises
    ------
    ValueError
        If a factor refers to itself or to a later factor, carries an invalid
        character, or mixes both factorization kinds.

    """
    if not factors:
        return
    if isinstance(factors[0], Lz78Factor):
        yield from _expand_lz78(factors)
    elif isinstance(factors[0], LzwFactor):
        yield from _expand_lzw(factors)
    else:
        raise ValueError(f"not a factor: {factors[0]!r}")


def _expand_lz78(factors: Sequence[Factor]) -> Iterator[bytes]:
    phrases = [b""]
    last = len(factors)
    for x, factor in enumerate(factors, start=1):
        if not isinstance(factor, Lz78Factor):
            raise ValueError(f"factor {x} is not an LZ78 factor: {factor!r}")
        ref, ext = factor
        if not 0 <= ref < x:
            raise ValueError(f"factor {x} refers to factor {ref}")
        if ext is None:
            if x != last or ref == 0:
                raise ValueError(f"factor {x} has no extension character")
            phrase = phrases[ref]
        elif 1 <= ext <= SIGMA:
            phrase = phrases[ref] + bytes((ext - 1,))
        else:
            raise ValueError(f"factor {x} has an invalid character code {ext}")
        phrases.append(phrase)
        yield phrase


def _expand_lzw(factors: Sequence[Factor]) -> Iterator[bytes]:
    phrases = [b""]
    for x, factor in enumerate(factors, start=1):
        if not isinstance(factor, LzwFactor):
            raise ValueError(f"factor {x} is not an LZW factor: {factor!r}")
        code = factor.code
        if -SIGMA <= code < 0:
            phrase = bytes((-code - 1,))
        elif 0 < code < x - 1:
            phrase = phrases[code] + phrases[code + 1][:1]
        elif 0 < code == x - 1:
            phrase = phrases[code] + phrases[code][:1]
        else:
            raise ValueError(f"factor {x} has an invalid code {code}")
        phrases.append(phrase)
        yield phrase


def verify_factorization(data: bytes, factors: Sequence[Factor]) -> bool:
    """Check that expanding ``factors`` gives back ``data`` exactly.

    Malformed factor sequences are reported as invalid (False).
    """
    try:
        return b"".join(expand_factors(factors)) == bytes(data)
    except ValueError:
        return False
