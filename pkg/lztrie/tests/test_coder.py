import io

import pytest
from bitarray import bitarray

from lztrie import coder
from lztrie.binary import BinaryTrie
from lztrie.coder import (
    HEADER_SIZE,
    BitSink,
    BitSource,
    ContainerHeader,
    CorruptHeaderError,
    DanglingReferenceError,
    EncodingError,
    LengthMismatchError,
    Lz78Encoder,
    TruncatedStreamError,
    compress,
    compress_stream,
    decode_lz78,
    decode_lzw,
    decompress,
    decompress_stream,
    encode_lz78,
    encode_lzw,
    iter_stream_bytes,
    lz78_ref_width,
    lzw_code_width,
    read_header,
)
from lztrie.factorize import Lz78Factor, LzwFactor, factorize_lz78, factorize_lzw
from lztrie.hash_trie import HashTrie
from lztrie.tests.conftest import A, B, EXAMPLE_TEXT


def test_code_widths() -> None:
    assert [lz78_ref_width(x) for x in range(1, 10)] == [0, 1, 2, 2, 3, 3, 3, 3, 4]
    assert [lzw_code_width(x) for x in (1, 2, 257, 258)] == [8, 9, 9, 10]


def test_encode_lz78_example() -> None:
    factors = factorize_lz78(EXAMPLE_TEXT, BinaryTrie())
    bits = encode_lz78(factors)

    expected = bitarray(
        "01100001"  # a
        "1" "01100001"  # 1 a
        "00" "01100010"  # 0 b
        "01" "01100010"  # 1 b
        "010" "01100001"  # 2 a
        "011" "01100001"  # 3 a
    )  # fmt: skip
    assert bits == expected
    assert len(bits) == 11 + 6 * 8
    assert decode_lz78(bits, len(EXAMPLE_TEXT)) == EXAMPLE_TEXT


def test_encode_lzw_example() -> None:
    factors = factorize_lzw(EXAMPLE_TEXT, BinaryTrie())
    bits = encode_lzw(factors)

    sink = BitSink()
    for value, width in zip([97, 256, 98, 97, 258, 257, 97], [8, 9, 9, 9, 9, 9, 9]):
        sink.write(value, width)
    assert bits == sink.getvalue()
    assert len(bits) == 62
    assert decode_lzw(bits, len(EXAMPLE_TEXT)) == EXAMPLE_TEXT


def test_encode_final_factor_without_extension() -> None:
    bits = encode_lz78([Lz78Factor(0, A), Lz78Factor(1, None)])
    assert bits == bitarray("01100001" "1")
    assert decode_lz78(bits, 2) == b"aa"


def test_decode_lzw_self_reference() -> None:
    factors = [LzwFactor(-A), LzwFactor(1), LzwFactor(2)]
    assert decode_lzw(encode_lzw(factors), 6) == b"aaaaaa"


def test_container_example() -> None:
    data = compress(EXAMPLE_TEXT, BinaryTrie())

    assert len(data) == HEADER_SIZE + 8
    assert data[:HEADER_SIZE] == b"LZTR\x00" + (11).to_bytes(8, "little") + bytes(9)
    assert data[HEADER_SIZE:] == bytes.fromhex("61b08c4b12616c20")
    assert decompress(data) == EXAMPLE_TEXT


def test_container_header() -> None:
    header = ContainerHeader("lzw", 1 << 40, backend_id=4, seed=0x5EED)
    packed = header.pack()
    assert len(packed) == HEADER_SIZE == 22
    assert packed[4] == 1
    assert ContainerHeader.unpack(packed) == header

    with pytest.raises(ValueError, match="unknown format"):
        ContainerHeader("lz77", 1)  # type: ignore[arg-type]

    with pytest.raises(ValueError, match="one byte"):
        ContainerHeader("lz78", 1, backend_id=256)


@pytest.mark.parametrize("format", ["lz78", "lzw"])
def test_compress_roundtrip(make_trie, format) -> None:
    data = b"it was the best of times, it was the worst of times\n" * 20
    container = compress(data, make_trie(), format)
    header = read_header(io.BytesIO(container))

    assert header.format == format
    assert header.n == len(data)
    assert decompress(container) == data


def test_compress_empty_input() -> None:
    container = compress(b"", BinaryTrie(), "lzw")
    assert len(container) == HEADER_SIZE
    assert decompress(container) == b""


def test_header_records_backend() -> None:
    container = compress(b"abc", HashTrie(), seed=77)
    header = read_header(io.BytesIO(container))
    assert header.backend_id == 2
    assert header.seed == 77


def test_streaming_in_small_chunks(monkeypatch) -> None:
    monkeypatch.setattr(coder, "CHUNK_SIZE", 4)
    data = b"abcd" * 50 + bytes(range(256)) + b"abcd" * 50

    out = io.BytesIO()
    result = compress_stream(iter_stream_bytes(io.BytesIO(data)), len(data), out, BinaryTrie())
    assert result.header.n == len(data)
    assert len(out.getvalue()) == HEADER_SIZE + (result.payload_bits + 7) // 8

    decoded = io.BytesIO()
    header = decompress_stream(io.BytesIO(out.getvalue()), decoded)
    assert header == result.header
    assert decoded.getvalue() == data


def test_bit_source_reads() -> None:
    source = BitSource(bytes([0b10110000]))
    assert source.read(1) == 1
    assert source.read(3) == 0b011
    assert source.read(0) == 0
    assert not source.has_trailing_data()

    with pytest.raises(TruncatedStreamError):
        source.read(5)


def test_bit_sink_errors() -> None:
    sink = BitSink()
    with pytest.raises(EncodingError, match="does not fit in 8 bits"):
        sink.write(256, 8)
    with pytest.raises(EncodingError, match="does not fit in 0 bits"):
        sink.write(1, 0)

    encoder = Lz78Encoder(sink)
    with pytest.raises(EncodingError, match="refers to factor 1"):
        encoder.encode(Lz78Factor(1, A))


def test_corrupt_header() -> None:
    container = compress(EXAMPLE_TEXT, BinaryTrie())

    with pytest.raises(CorruptHeaderError, match="bad magic"):
        decompress(b"ZZZZ" + container[4:])

    with pytest.raises(CorruptHeaderError, match="unknown format code"):
        decompress(container[:4] + b"\x07" + container[5:])

    with pytest.raises(CorruptHeaderError, match="expected 22"):
        decompress(container[:10])

    with pytest.raises(CorruptHeaderError, match="empty input"):
        decompress(b"")


def test_truncated_stream() -> None:
    container = compress(EXAMPLE_TEXT * 3, BinaryTrie())
    with pytest.raises(TruncatedStreamError):
        decompress(container[:-3])


def test_length_mismatch() -> None:
    # trailing bytes after the declared length
    header = ContainerHeader("lz78", 1).pack()
    with pytest.raises(LengthMismatchError, match="continues after 1 decoded bytes"):
        decompress(header + b"ab")

    bits = encode_lzw([LzwFactor(-A), LzwFactor(1)])
    with pytest.raises(LengthMismatchError, match="extends past the declared length 2"):
        decode_lzw(bits, 2)

    bits = encode_lz78([Lz78Factor(0, A), Lz78Factor(1, B), Lz78Factor(2, A)])
    with pytest.raises(LengthMismatchError, match="factor 3 extends past the declared length 4"):
        decode_lz78(bits, 4)

    bits = encode_lz78([Lz78Factor(0, A), Lz78Factor(1, B)])
    with pytest.raises(LengthMismatchError, match="continues after 2 decoded bytes"):
        decode_lz78(bits, 2)


def test_dangling_reference() -> None:
    sink = BitSink()
    sink.write(97, 8)
    sink.write(257, 9)
    with pytest.raises(DanglingReferenceError, match="factor 2 refers to factor 2"):
        decode_lzw(sink.flush(), 5)

    sink = BitSink()
    sink.write(97, 8)
    sink.write(0, 1)
    sink.write(98, 8)
    sink.write(3, 2)
    with pytest.raises(DanglingReferenceError, match="factor 3 refers to factor 3"):
        decode_lz78(sink.flush(), 10)
