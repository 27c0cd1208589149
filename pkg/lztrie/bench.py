"""Benchmark support: corpus generation, the brute-force reference
factorization, space envelopes and result tables.
"""

from __future__ import annotations

import logging
import math
import warnings
from collections.abc import Iterable, Sequence
from dataclasses import asdict, dataclass
from importlib.resources import files
from pathlib import Path
from typing import Literal, TextIO

import numpy as np
import xarray as xr
from pydantic import BaseModel, ConfigDict, Field, model_validator

from lztrie.accounting import AllocAccount, Stopwatch
from lztrie.backend import DEFAULT_SEED, SIGMA, create_backend
from lztrie.factorize import (
    Factor,
    Lz78Factor,
    LzwFactor,
    iter_lz78,
    iter_lzw,
    lemma1_lower_bound,
    verify_factorization,
)

logger = logging.getLogger(__name__)

CorpusKind = Literal["random-uniform", "repetitive-period-k", "all-equal", "english-sample-file"]

#: Columns of the statistics CSV files, in order.
STATS_COLUMNS = (
    "backend",
    "format",
    "corpus",
    "n",
    "z",
    "time_ms",
    "peak_bytes",
    "collisions",
    "table_M",
    "seed",
)

ENVELOPE_TOLERANCE = 1.15


def english_sample() -> bytes:
    """Return the English text shipped with the package."""
    return (files("lztrie") / "data" / "sample_english.txt").read_bytes()


class CorpusSpec(BaseModel):
    """Description of a generated test corpus.

    ``alphabet`` is the number of distinct byte values ``0..alphabet-1`` of
    the random kinds, ``period`` the length of the block repeated by
    ``"repetitive-period-k"`` and ``path`` the text used by
    ``"english-sample-file"`` (the packaged sample if omitted). Texts shorter
    than ``length`` are repeated.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: CorpusKind
    length: int = Field(ge=0)
    alphabet: int = Field(default=SIGMA, ge=1, le=SIGMA)
    period: int = Field(default=5, ge=1)
    seed: int = DEFAULT_SEED
    path: Path | None = None

    @model_validator(mode="after")
    def _check_path(self) -> CorpusSpec:
        if self.path is not None and self.kind != "english-sample-file":
            raise ValueError(
                f"a text file is only used by 'english-sample-file', not {self.kind!r}"
            )
        return self

    @property
    def name(self) -> str:
        if self.kind == "random-uniform":
            return f"random-s{self.alphabet}-{self.length}"
        if self.kind == "repetitive-period-k":
            return f"period{self.period}-{self.length}"
        if self.kind == "all-equal":
            return f"equal-{self.length}"
        return f"{self.path.stem if self.path else 'english'}-{self.length}"


def _tile(text: bytes, length: int) -> bytes:
    if length and not text:
        raise ValueError("cannot build a corpus from an empty text")
    return (text * (length // max(len(text), 1) + 1))[:length]


def generate_corpus(spec: CorpusSpec) -> bytes:
    """Return the bytes described by ``spec``; equal specs give equal bytes."""
    rng = np.random.default_rng(spec.seed)
    if spec.kind == "random-uniform":
        return rng.integers(0, spec.alphabet, spec.length, dtype=np.uint8).tobytes()
    if spec.kind == "repetitive-period-k":
        block = rng.integers(0, spec.alphabet, spec.period, dtype=np.uint8).tobytes()
        return _tile(block, spec.length)
    if spec.kind == "all-equal":
        return b"a" * spec.length
    text = spec.path.read_bytes() if spec.path is not None else english_sample()
    return _tile(text, spec.length)


def oracle_factorize(data: bytes, format: Literal["lz78", "lzw"] = "lz78") -> list[Factor]:
    """Factorize ``data`` straight from the definitions, with a dictionary of
    factor strings. Takes quadratic time: meant for short test inputs.
    """
    data = bytes(data)
    if format == "lz78":
        return list(_oracle_lz78(data))
    if format == "lzw":
        return list(_oracle_lzw(data))
    raise ValueError(f"unknown format {format!r}; expected 'lz78' or 'lzw'")


def _oracle_lz78(data: bytes) -> Iterable[Lz78Factor]:
    index = {b"": 0}
    i, n = 0, len(data)
    while i < n:
        j = i
        while j < n and data[i : j + 1] in index:
            j += 1
        if j == n:
            yield Lz78Factor(index[data[i:j]], None)
            return
        yield Lz78Factor(index[data[i:j]], data[j] + 1)
        index[data[i : j + 1]] = len(index)
        i = j + 1


def _oracle_lzw(data: bytes) -> Iterable[LzwFactor]:
    # phrase F_y F_(y+1)[1] -> y, for every y < x
    index: dict[bytes, int] = {}
    previous = b""
    longest = 1
    i, x, n = 0, 0, len(data)
    while i < n:
        x += 1
        if previous:
            index[previous + data[i : i + 1]] = x - 1
            longest = max(longest, len(previous) + 1)
        for length in range(min(longest, n - i), 1, -1):
            y = index.get(data[i : i + length])
            if y is not None:
                yield LzwFactor(y)
                break
        else:
            length = 1
            yield LzwFactor(-(data[i] + 1))
        previous = data[i : i + length]
        i += length


@dataclass(frozen=True)
class EnvelopeReport:
    """Measured peak memory of a run against the best and worst case bounds."""

    backend: str
    z: int
    measured_bits: int
    best_bits: float
    worst_bits: float
    passed: bool

    @property
    def ratio(self) -> float:
        """Measured over worst case (0 for an empty run)."""
        return self.measured_bits / self.worst_bits if self.worst_bits else 0.0


def space_envelope(
    backend: str,
    z: int,
    sigma: int = SIGMA,
    alpha: float = 0.3,
    w: int = 64,
    index_bits: int | None = None,
) -> tuple[float, float]:
    """Best and worst case of the maximum memory (in bits) used by a trie
    with ``z`` nodes.

    ``index_bits`` replaces ``lg z`` for tries storing node labels in
    fixed-width words. The compact table always uses ``lg z``.
    """
    if z <= 0:
        return 0.0, 0.0
    lg_s = math.log2(sigma)
    lg_z = index_bits if index_bits is not None else math.log2(z)
    if backend == "binary":
        return 3 * z * (2 * lg_z + lg_s - 2 / 3) / 2, 3 * z * (2 * lg_z + lg_s + 4 / 3)
    if backend == "ternary":
        return 3 * z * (3 * lg_z + lg_s - 1) / 2, 3 * z * (3 * lg_z + lg_s + 2)
    if backend in ("hash", "hash+"):
        return (
            3 * z * (2 * lg_z + lg_s - 2 / 3) / (2 * alpha),
            6 * z * (2 * lg_z + lg_s + 4 / 3) / alpha,
        )
    if backend == "cht":
        lg = math.log2(alpha * z * sigma)
        return 3 * z * (lg + 8 / 3) / (2 * alpha), 3 * z * (lg + 11 / 3) / alpha
    if backend in ("rolling", "rolling+"):
        return (
            3 * z * (w + lg_z + lg_s - 1 / 3) / (2 * alpha),
            6 * z * (w + lg_z + lg_s + 2 / 3) / alpha,
        )
    raise KeyError(f"no space envelope for backend {backend!r}")


def check_space_envelope(
    backend: str,
    z: int,
    measured_peak_bits: int,
    **options: float | int | None,
) -> EnvelopeReport:
    """Compare a measured peak against the worst case bound (with a 15%
    tolerance). The best case is reported but not checked.
    """
    best, worst = space_envelope(backend, z, **options)  # type: ignore[arg-type]
    passed = z == 0 or measured_peak_bits <= worst * ENVELOPE_TOLERANCE
    report = EnvelopeReport(backend, z, measured_peak_bits, best, worst, passed)
    logger.info(
        "%s: z=%d peak=%d bits, best case %.0f, worst case %.0f (%.2f)",
        backend,
        z,
        measured_peak_bits,
        best,
        worst,
        report.ratio,
    )
    return report


@dataclass
class StatsRecord:
    """One row of a statistics table."""

    backend: str
    format: str
    corpus: str
    n: int
    z: int
    time_ms: float
    peak_bytes: int
    collisions: int
    table_M: int
    seed: int


def measure(
    data: bytes,
    backend: str,
    format: Literal["lz78", "lzw"] = "lz78",
    corpus: str = "input",
    seed: int = DEFAULT_SEED,
    verify: bool = False,
    **options: object,
) -> StatsRecord:
    """Factorize ``data`` with a fresh backend and return its statistics.

    Raises
    ------
    ValueError
        If ``verify`` is set and the factorization does not decode to ``data``.

    """
    account = AllocAccount()
    trie = create_backend(backend, account=account, seed=seed, **options)
    factorize = iter_lz78 if format == "lz78" else iter_lzw
    with Stopwatch() as watch:
        factors = list(factorize(data, trie))
    if verify and not verify_factorization(data, factors):
        raise ValueError(f"{backend} computed a wrong {format} factorization of {corpus!r}")
    if len(factors) < lemma1_lower_bound(len(data)):
        raise ValueError(f"{len(factors)} factors are fewer than possible for n={len(data)}")
    stats = trie.stats()
    return StatsRecord(
        backend=backend,
        format=format,
        corpus=corpus,
        n=len(data),
        z=len(factors),
        time_ms=watch.elapsed_ms,
        peak_bytes=account.peak_bytes(),
        collisions=stats.collisions,
        table_M=stats.table_size_M,
        seed=seed,
    )


def _unique(values: Iterable[str]) -> list[str]:
    return list(dict.fromkeys(values))


def records_to_dataset(records: Sequence[StatsRecord]) -> xr.Dataset:
    """Arrange statistics records along the ``backend``, ``format`` and
    ``corpus`` dimensions. Missing combinations are NaN (seed 0).
    """
    coords = {
        "backend": _unique(r.backend for r in records),
        "format": _unique(r.format for r in records),
        "corpus": _unique(r.corpus for r in records),
    }
    shape = tuple(len(v) for v in coords.values())
    variables = {name: np.full(shape, np.nan) for name in STATS_COLUMNS[3:-1]}
    # seeds span the whole 64-bit range
    variables["seed"] = np.zeros(shape, dtype=np.uint64)
    for record in records:
        at = tuple(coords[dim].index(getattr(record, dim)) for dim in coords)
        for name, array in variables.items():
            array[at] = getattr(record, name)
    dims = tuple(coords)
    return xr.Dataset({name: (dims, array) for name, array in variables.items()}, coords=coords)


def write_stats(dataset: xr.Dataset, path: Path | str | TextIO) -> None:
    """Write the runs of a statistics dataset as CSV rows."""
    frame = dataset.to_dataframe().dropna(subset=["z"]).reset_index()
    integer_columns = [c for c in STATS_COLUMNS[3:-1] if c != "time_ms"]
    frame[integer_columns] = frame[integer_columns].astype("int64")
    frame[list(STATS_COLUMNS)].to_csv(path, index=False)


def run_bench(
    backends: Sequence[str],
    corpora: Sequence[CorpusSpec],
    formats: Sequence[Literal["lz78", "lzw"]] = ("lz78",),
    seed: int = DEFAULT_SEED,
    stats_path: Path | str | None = None,
    verify: bool = True,
    **options: object,
) -> xr.Dataset:
    """Run every backend on every corpus, sequentially.

    A failing run is reported with a warning and left out of the results.
    """
    if not 0 <= seed < 1 << 64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    records = []
    for spec in corpora:
        try:
            data = generate_corpus(spec)
        except OSError as err:
            warnings.warn(f"skipping corpus {spec.name!r}: {err}", UserWarning, stacklevel=2)
            continue
        for backend in backends:
            for format in formats:
                try:
                    record = measure(data, backend, format, spec.name, seed, verify, **options)
                except ValueError as err:
                    warnings.warn(
                        f"{backend}/{format} failed on {spec.name!r}: {err}",
                        UserWarning,
                        stacklevel=2,
                    )
                    continue
                logger.info("%s", asdict(record))
                records.append(record)

    dataset = records_to_dataset(records)
    if stats_path is not None:
        write_stats(dataset, stats_path)
    return dataset
