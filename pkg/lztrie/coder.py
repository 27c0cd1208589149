"""Bit-level coding of LZ78 and LZW factorizations.

A container is a 22-byte header followed by the factor codes, written
most-significant bit first and zero-padded to a whole byte. Factor ``x`` of
an LZ78 stream is its referred index in ``ceil(lg x)`` bits followed by its
extension byte (omitted for a last factor ending with the input). Factor
``x`` of an LZW stream is one code in ``ceil(lg(sigma + x - 1))`` bits: the
byte value for a literal, ``sigma + y - 1`` for the referred index ``y``.
See ``docs/wire_format.md``.
"""

from __future__ import annotations

import io
import logging
import struct
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from typing import BinaryIO, Literal

from bitarray import bitarray
from bitarray.util import ba2int, int2ba

from lztrie.backend import SIGMA, TrieBackend
from lztrie.factorize import Lz78Factor, LzwFactor, iter_lz78, iter_lzw

logger = logging.getLogger(__name__)

MAGIC = b"LZTR"
HEADER_FORMAT = "<4sBQBQ"
HEADER_SIZE = struct.calcsize(HEADER_FORMAT)

FORMATS: tuple[Literal["lz78", "lzw"], ...] = ("lz78", "lzw")

CHUNK_SIZE = 1 << 16


class CoderError(ValueError):
    """Base class of the errors raised while encoding or decoding a container."""


class CorruptHeaderError(CoderError):
    pass


class TruncatedStreamError(CoderError):
    pass


class LengthMismatchError(CoderError):
    pass


class DanglingReferenceError(CoderError):
    pass


class EncodingError(CoderError):
    pass


@dataclass(frozen=True)
class ContainerHeader:
    """Fixed-size header of a compressed container.

    Attributes
    ----------
    format : {"lz78", "lzw"}
    n : int
        Length of the original input in bytes.
    backend_id : int
        Identifier of the trie backend that computed the factorization.
    seed : int
        Seed of the randomized backends (informational).

    """

    format: Literal["lz78", "lzw"]
    n: int
    backend_id: int = 0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.format not in FORMATS:
            raise ValueError(f"unknown format {self.format!r}; expected one of {FORMATS}")
        if not 0 <= self.n < 1 << 64:
            raise ValueError(f"input length {self.n} does not fit in 64 bits")
        if not 0 <= self.backend_id < 256:
            raise ValueError(f"backend id {self.backend_id} does not fit in one byte")
        if not 0 <= self.seed < 1 << 64:
            raise ValueError(f"seed {self.seed} does not fit in 64 bits")

    def pack(self) -> bytes:
        return struct.pack(
            HEADER_FORMAT, MAGIC, FORMATS.index(self.format), self.n, self.backend_id, self.seed
        )

    @classmethod
    def unpack(cls, data: bytes) -> ContainerHeader:
        if len(data) < HEADER_SIZE:
            raise CorruptHeaderError(
                f"container header is {len(data)} bytes long, expected {HEADER_SIZE}"
            )
        magic, fmt, n, backend_id, seed = struct.unpack(HEADER_FORMAT, data[:HEADER_SIZE])
        if magic != MAGIC:
            raise CorruptHeaderError(f"bad magic number {magic!r}, expected {MAGIC!r}")
        if fmt >= len(FORMATS):
            raise CorruptHeaderError(f"unknown format code {fmt} in container header")
        return cls(FORMATS[fmt], n, backend_id, seed)


class BitSink:
    """Append-only bit buffer, most-significant bit first."""

    def __init__(self) -> None:
        self._bits = bitarray(endian="big")
        self.bits_written = 0

    def write(self, value: int, width: int) -> None:
        if width == 0:
            if value:
                raise EncodingError(f"value {value} does not fit in 0 bits")
            return
        if value < 0 or value >> width:
            raise EncodingError(f"value {value} does not fit in {width} bits")
        self._bits.extend(int2ba(value, length=width, endian="big"))
        self.bits_written += width

    @property
    def pending_bits(self) -> int:
        return len(self._bits)

    def take_bytes(self) -> bytes:
        """Remove and return the complete bytes written so far."""
        complete = len(self._bits) - len(self._bits) % 8
        out = self._bits[:complete].tobytes()
        del self._bits[:complete]
        return out

    def flush(self) -> bytes:
        """Remove and return everything, zero-padding the last byte."""
        out = self._bits.tobytes()
        self._bits.clear()
        return out

    def getvalue(self) -> bitarray:
        return self._bits.copy()


class BitSource:
    """Sequential bit reader over a byte string or a binary stream."""

    def __init__(self, data: bytes | BinaryIO):
        self._bits = bitarray(endian="big")
        self._pos = 0
        self._stream: BinaryIO | None = None
        if isinstance(data, bytes | bytearray | memoryview):
            self._bits.frombytes(bytes(data))
        else:
            self._stream = data

    def _fill(self, needed: int) -> bool:
        if self._pos > 8 * CHUNK_SIZE:
            del self._bits[: self._pos]
            self._pos = 0
        while len(self._bits) - self._pos < needed:
            chunk = self._stream.read(CHUNK_SIZE) if self._stream is not None else b""
            if not chunk:
                return False
            self._bits.frombytes(chunk)
        return True

    def read(self, width: int) -> int:
        if width == 0:
            return 0
        if not self._fill(width):
            raise TruncatedStreamError("compressed stream ends in the middle of a factor")
        value = ba2int(self._bits[self._pos : self._pos + width])
        self._pos += width
        return value

    def has_trailing_data(self) -> bool:
        """True if whole bytes remain after the current byte."""
        return self._fill(-self._pos % 8 + 1)


def lz78_ref_width(x: int) -> int:
    """Bits of the referred index of LZ78 factor ``x``: ``ceil(lg x)``."""
    return (x - 1).bit_length()


def lzw_code_width(x: int, sigma: int = SIGMA) -> int:
    """Bits of the code of LZW factor ``x``: ``ceil(lg(sigma + x - 1))``."""
    return (sigma + x - 2).bit_length()


class Lz78Encoder:
    def __init__(self, sink: BitSink):
        self.sink = sink
        self.x = 0

    def encode(self, factor: Lz78Factor) -> None:
        self.x += 1
        ref, ext = factor
        if not 0 <= ref < self.x:
            raise EncodingError(f"factor {self.x} refers to factor {ref}")
        self.sink.write(ref, lz78_ref_width(self.x))
        if ext is not None:
            if not 1 <= ext <= SIGMA:
                raise EncodingError(f"factor {self.x} has an invalid character code {ext}")
            self.sink.write(ext - 1, 8)


class LzwEncoder:
    def __init__(self, sink: BitSink):
        self.sink = sink
        self.x = 0

    def encode(self, factor: LzwFactor) -> None:
        self.x += 1
        code = factor.code
        if -SIGMA <= code < 0:
            value = -code - 1
        elif 0 < code < self.x:
            value = SIGMA + code - 1
        else:
            raise EncodingError(f"factor {self.x} has an invalid code {code}")
        self.sink.write(value, lzw_code_width(self.x))


def encode_lz78(factors: Iterable[Lz78Factor]) -> bitarray:
    """Return the unpadded bit stream of LZ78 factors."""
    sink = BitSink()
    encoder = Lz78Encoder(sink)
    for factor in factors:
        encoder.encode(factor)
    return sink.getvalue()


def encode_lzw(factors: Iterable[LzwFactor]) -> bitarray:
    """Return the unpadded bit stream of LZW factors."""
    sink = BitSink()
    encoder = LzwEncoder(sink)
    for factor in factors:
        encoder.encode(factor)
    return sink.getvalue()


class _PhraseTable:
    """Decoded factors as a table of ``(referred factor, last byte)``."""

    def __init__(self) -> None:
        self.parent = [0]
        self.last = [0]
        self.first = [0]
        self.length = [0]

    def add(self, parent: int, byte: int) -> int:
        self.parent.append(parent)
        self.last.append(byte)
        self.first.append(self.first[parent] if parent else byte)
        self.length.append(self.length[parent] + 1)
        return len(self.parent) - 1

    def phrase(self, x: int) -> bytes:
        out = bytearray(self.length[x])
        for i in range(len(out) - 1, -1, -1):
            out[i] = self.last[x]
            x = self.parent[x]
        return bytes(out)


def iter_decode_lz78(source: BitSource, n: int) -> Iterator[bytes]:
    """Decode LZ78 factors from ``source`` until ``n`` bytes are produced,
    yielding the bytes of each factor.
    """
    table = _PhraseTable()
    produced = 0
    x = 0
    while produced < n:
        x += 1
        ref = source.read(lz78_ref_width(x))
        if ref >= x:
            raise DanglingReferenceError(f"factor {x} refers to factor {ref}")
        length = table.length[ref]
        if ref and produced + length == n:
            yield table.phrase(ref)
            return
        if produced + length + 1 > n:
            raise LengthMismatchError(f"factor {x} extends past the declared length {n}")
        node = table.add(ref, source.read(8))
        produced += length + 1
        yield table.phrase(node)


def iter_decode_lzw(source: BitSource, n: int) -> Iterator[bytes]:
    """Decode LZW factors from ``source`` until ``n`` bytes are produced."""
    table = _PhraseTable()
    # factor x of the stream is phrase number x of the table
    produced = 0
    x = 0
    while produced < n:
        x += 1
        code = source.read(lzw_code_width(x))
        if code < SIGMA:
            node = table.add(0, code)
        else:
            y = code - SIGMA + 1
            if y >= x:
                raise DanglingReferenceError(f"factor {x} refers to factor {y}")
            # F_y followed by the first byte of F_(y+1), which is F_y's own when y + 1 == x
            next_first = table.first[y + 1] if y + 1 < x else table.first[y]
            node = table.add(y, next_first)
        length = table.length[node]
        if produced + length > n:
            raise LengthMismatchError(f"factor {x} extends past the declared length {n}")
        produced += length
        yield table.phrase(node)


def _check_end(source: BitSource, n: int) -> None:
    if source.has_trailing_data():
        raise LengthMismatchError(f"compressed stream continues after {n} decoded bytes")


def decode_lz78(data: bytes | bitarray, n: int) -> bytes:
    """Decode an LZ78 bit stream (without header) to ``n`` bytes."""
    source = BitSource(data.tobytes() if isinstance(data, bitarray) else data)
    out = b"".join(iter_decode_lz78(source, n))
    _check_end(source, n)
    return out


def decode_lzw(data: bytes | bitarray, n: int) -> bytes:
    """Decode an LZW bit stream (without header) to ``n`` bytes."""
    source = BitSource(data.tobytes() if isinstance(data, bitarray) else data)
    out = b"".join(iter_decode_lzw(source, n))
    _check_end(source, n)
    return out


def iter_stream_bytes(stream: BinaryIO, chunk_size: int = CHUNK_SIZE) -> Iterator[int]:
    """Yield the bytes of a binary stream one by one, reading it in chunks."""
    while chunk := stream.read(chunk_size):
        yield from chunk


@dataclass
class CompressResult:
    header: ContainerHeader
    z: int
    payload_bits: int


def write_container(
    factors: Iterable[Lz78Factor] | Iterable[LzwFactor], header: ContainerHeader, out: BinaryIO
) -> CompressResult:
    """Write ``header`` and the codes of ``factors`` to ``out``.

    Each factor is encoded as soon as it is produced, and complete output
    bytes are written in chunks, so the output is never buffered as a whole.
    """
    out.write(header.pack())
    sink = BitSink()
    encoder = Lz78Encoder(sink) if header.format == "lz78" else LzwEncoder(sink)
    z = 0
    for factor in factors:
        encoder.encode(factor)  # type: ignore[arg-type]
        z += 1
        if sink.pending_bits >= 8 * CHUNK_SIZE:
            out.write(sink.take_bytes())
    out.write(sink.flush())
    logger.info("%s: encoded %d factors in %d bits", header.format, z, sink.bits_written)
    return CompressResult(header, z, sink.bits_written)


def compress_stream(
    data: Iterable[int],
    n: int,
    out: BinaryIO,
    trie: TrieBackend,
    format: Literal["lz78", "lzw"] = "lz78",
    seed: int = 0,
) -> CompressResult:
    """Factorize ``n`` input bytes online and write the container to ``out``."""
    header = ContainerHeader(format, n, trie.backend_id, seed)
    factors = iter_lz78(data, trie, n) if format == "lz78" else iter_lzw(data, trie, n)
    return write_container(factors, header, out)


def compress(
    data: bytes,
    trie: TrieBackend,
    format: Literal["lz78", "lzw"] = "lz78",
    seed: int = 0,
) -> bytes:
    """Return the container of ``data``."""
    out = io.BytesIO()
    compress_stream(data, len(data), out, trie, format, seed)
    return out.getvalue()


def read_header(stream: BinaryIO) -> ContainerHeader:
    data = stream.read(HEADER_SIZE)
    if not data:
        raise CorruptHeaderError("empty input: missing container header")
    return ContainerHeader.unpack(data)


def decompress_stream(source: BinaryIO, out: BinaryIO) -> ContainerHeader:
    """Decode a container from ``source``, writing each factor to ``out`` as
    soon as it is decoded.
    """
    header = read_header(source)
    bits = BitSource(source)
    decode = iter_decode_lz78 if header.format == "lz78" else iter_decode_lzw
    for phrase in decode(bits, header.n):
        out.write(phrase)
    _check_end(bits, header.n)
    return header


def decompress(data: bytes) -> bytes:
    """Return the original bytes of a container."""
    out = io.BytesIO()
    decompress_stream(io.BytesIO(data), out)
    return out.getvalue()
