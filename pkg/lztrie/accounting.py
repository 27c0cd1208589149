from __future__ import annotations

import time
from collections import Counter

from lztrie.utils import Frozen, FrozenDict


class AllocAccount:
    """Live and peak byte counters for labelled arenas.

    Trie backends report every array they allocate or release to an account,
    which gives structure-level memory figures independent of the Python
    object overhead. Each backend uses its registry name as arena label.

    """

    def __init__(self) -> None:
        self._live: Counter[str] = Counter()
        self._peak: Counter[str] = Counter()
        self._total_live = 0
        self._total_peak = 0

    def alloc(self, arena: str, nbytes: int) -> None:
        if nbytes < 0:
            raise ValueError(f"cannot allocate a negative number of bytes ({nbytes})")
        self._live[arena] += nbytes
        self._peak[arena] = max(self._peak[arena], self._live[arena])
        self._total_live += nbytes
        self._total_peak = max(self._total_peak, self._total_live)

    def free(self, arena: str, nbytes: int) -> None:
        if nbytes < 0:
            raise ValueError(f"cannot free a negative number of bytes ({nbytes})")
        if nbytes > self._live[arena]:
            raise ValueError(
                f"arena {arena!r} releases {nbytes} bytes but only "
                f"{self._live[arena]} bytes are live"
            )
        self._live[arena] -= nbytes
        self._total_live -= nbytes

    def live_bytes(self, arena: str | None = None) -> int:
        """Currently allocated bytes of one arena, or of all arenas."""
        if arena is None:
            return self._total_live
        return self._live[arena]

    def peak_bytes(self, arena: str | None = None) -> int:
        """Largest number of simultaneously allocated bytes seen so far."""
        if arena is None:
            return self._total_peak
        return self._peak[arena]

    @property
    def arenas(self) -> Frozen[str, int]:
        """Immutable mapping of arena labels to their live bytes."""
        return FrozenDict(self._live)

    def __repr__(self) -> str:
        return (
            f"{type(self).__name__}(live={self._total_live}, peak={self._total_peak}, "
            f"arenas={sorted(self._live)})"
        )


class Stopwatch:
    """Wall-clock timer used as a context manager."""

    elapsed: float

    def __init__(self) -> None:
        self.elapsed = 0.0
        self._start = 0.0

    def __enter__(self) -> Stopwatch:
        self._start = time.perf_counter()
        return self

    def __exit__(self, *exc) -> None:
        self.elapsed = time.perf_counter() - self._start

    @property
    def elapsed_ms(self) -> float:
        return self.elapsed * 1000.0
