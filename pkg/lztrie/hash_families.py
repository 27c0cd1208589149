"""Integer hash functions used by the hash-based tries.

:py:func:`scramble64` is the mixing function addressing the probing tables
(keys are never recovered from it). The bijective families
:py:class:`LcgHash` and :py:class:`XorshiftHash` have exact inverses and
back the compact table, which stores only part of each hash value.
"""

from __future__ import annotations

import abc
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal

from lztrie.utils import Frozen, FrozenDict, ceil_log2

MASK64 = (1 << 64) - 1

# first twelve primes: deterministic Miller-Rabin bases for n < 3.3e24
_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def scramble64(x: int) -> int:
    """Finalizer of SplitMix64: two odd-constant multiplications modulo
    2**64 interleaved with xorshifts. Bijective on 64-bit integers.
    """
    x &= MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test (exact below 3.3e24)."""
    if n < 2:
        return False
    for p in _WITNESSES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(u: int) -> int:
    """Smallest prime strictly greater than ``u``."""
    candidate = max(u + 1, 2)
    while not is_prime(candidate):
        candidate += 1
    return candidate


@lru_cache(maxsize=1)
def prime_table() -> Frozen[int, int]:
    """For each ``k`` in ``[1..64]``, a prime ``p`` with ``2**k < p < 2**(k+1)``."""
    return FrozenDict((k, next_prime(1 << k)) for k in range(1, 65))


def mod_inverse_egcd(a: int, n: int) -> int:
    """Inverse of ``a`` modulo ``n`` by the extended Euclidean algorithm."""
    old_r, r = a % n, n
    old_s, s = 1, 0
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
    if old_r != 1:
        raise ValueError(f"{a} has no inverse modulo {n}")
    return old_s % n


class BijectiveHash(abc.ABC):
    """An invertible hash function from ``[0..domain_size-1]`` into
    ``[0..range_size-1]``.
    """

    @property
    @abc.abstractmethod
    def domain_size(self) -> int: ...

    @property
    @abc.abstractmethod
    def range_size(self) -> int: ...

    @abc.abstractmethod
    def forward(self, x: int) -> int: ...

    @abc.abstractmethod
    def inverse(self, y: int) -> int: ...

    def __call__(self, x: int) -> int:
        return self.forward(x)


@dataclass(frozen=True)
class LcgHash(BijectiveHash):
    """Linear congruential function ``x -> (a x + b) mod p`` for a prime ``p``."""

    a: int
    b: int
    p: int
    a_inv: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise ValueError(f"LCG modulus must be prime, got {self.p}")
        if not 0 < self.a < self.p or not 0 <= self.b < self.p:
            raise ValueError(f"LCG parameters out of range: a={self.a}, b={self.b}, p={self.p}")
        # Fermat's little theorem
        object.__setattr__(self, "a_inv", pow(self.a, self.p - 2, self.p))

    @property
    def domain_size(self) -> int:
        return self.p

    @property
    def range_size(self) -> int:
        return self.p

    def forward(self, x: int) -> int:
        if not 0 <= x < self.p:
            raise ValueError(f"LCG input {x} is outside [0, {self.p})")
        return (self.a * x + self.b) % self.p

    def inverse(self, y: int) -> int:
        if not 0 <= y < self.p:
            raise ValueError(f"LCG output {y} is outside [0, {self.p})")
        return (y - self.b) * self.a_inv % self.p


def lcg_forward(h: LcgHash, x: int) -> int:
    return h.forward(x)


def lcg_inverse(h: LcgHash, y: int) -> int:
    return h.inverse(y)


def xorshift_step(w: int, j: int, x: int) -> int:
    """Return ``x xor (2**j x mod 2**w)``, a right shift for negative ``j``.

    The step is its own inverse if ``|j| > floor(w/2)``, which is required.
    """
    if abs(j) <= w // 2:
        raise ValueError(f"xorshift by {j} on {w} bits is not self-inverse (need |j| > {w // 2})")
    mask = (1 << w) - 1
    if not 0 <= x <= mask:
        raise ValueError(f"xorshift input {x} does not fit in {w} bits")
    shifted = (x << j) & mask if j > 0 else x >> -j
    return x ^ shifted


@dataclass(frozen=True)
class XorshiftStep:
    j: int

    def apply(self, w: int, x: int) -> int:
        return xorshift_step(w, self.j, x)

    def undo(self, w: int, y: int) -> int:
        return xorshift_step(w, self.j, y)


@dataclass(frozen=True)
class MultiplyStep:
    """Multiplication by an odd constant modulo ``2**w``."""

    a: int

    def apply(self, w: int, x: int) -> int:
        return (x * self.a) & ((1 << w) - 1)

    def undo(self, w: int, y: int) -> int:
        return (y * pow(self.a, -1, 1 << w)) & ((1 << w) - 1)


@dataclass(frozen=True)
class XorshiftHash(BijectiveHash):
    """Composite of xorshift and odd-multiplier steps on ``w``-bit integers."""

    w: int
    steps: tuple[XorshiftStep | MultiplyStep, ...]

    def __post_init__(self) -> None:
        for step in self.steps:
            if isinstance(step, XorshiftStep) and abs(step.j) <= self.w // 2:
                raise ValueError(f"xorshift by {step.j} on {self.w} bits is not self-inverse")
            if isinstance(step, MultiplyStep) and step.a % 2 == 0:
                raise ValueError(f"multiplier {step.a} must be odd")

    @property
    def domain_size(self) -> int:
        return 1 << self.w

    @property
    def range_size(self) -> int:
        return 1 << self.w

    def forward(self, x: int) -> int:
        if not 0 <= x < 1 << self.w:
            raise ValueError(f"input {x} does not fit in {self.w} bits")
        for step in self.steps:
            x = step.apply(self.w, x)
        return x

    def inverse(self, y: int) -> int:
        if not 0 <= y < 1 << self.w:
            raise ValueError(f"output {y} does not fit in {self.w} bits")
        for step in reversed(self.steps):
            y = step.undo(self.w, y)
        return y


HashFamily = Literal["lcg", "xorshift"]


def draw_bijection(
    u: int, rng: random.Random | int, family: HashFamily = "lcg"
) -> BijectiveHash:
    """Draw a random bijective hash function for keys in ``[0..u-1]`` whose
    values lie in ``[0..2u-1]``.

    Parameters
    ----------
    u : int
        Size of the key universe (``m * sigma`` for the compact table).
    rng : random.Random or int
        Random source, or a seed to create one.
    family : {"lcg", "xorshift"}
        ``"lcg"`` picks a prime ``u < p < 2u`` and random ``a``, ``b``;
        ``"xorshift"`` works on ``w = ceil(lg u)`` bits.

    """
    if u < 8:
        raise ValueError(f"key universe too small for a bijective hash: {u}")
    if isinstance(rng, int):
        rng = random.Random(rng)

    if family == "lcg":
        k = u.bit_length() - 1
        p = prime_table()[k] if u == 1 << k and k in prime_table() else next_prime(u)
        return LcgHash(a=rng.randrange(1, p), b=rng.randrange(0, p), p=p)

    if family == "xorshift":
        w = ceil_log2(u)
        mask = (1 << w) - 1

        def shift() -> XorshiftStep:
            j = rng.randint(w // 2 + 1, w - 1)
            return XorshiftStep(j if rng.random() < 0.5 else -j)

        return XorshiftHash(w, (shift(), MultiplyStep(rng.randrange(1, mask + 1) | 1), shift()))

    raise ValueError(f"unknown hash family {family!r}; expected 'lcg' or 'xorshift'")
