import random

import pytest

from lztrie.accounting import AllocAccount
from lztrie.backend import SIGMA, Found, Inserted
from lztrie.compact import CompactTable, CompactTrie
from lztrie.factorize import factorize_lz78, factorize_lzw
from lztrie.hash_trie import HashTrie
from lztrie.tests.conftest import EXAMPLE_TEXT


@pytest.fixture(params=["lcg", "xorshift"])
def family(request) -> str:
    return request.param


def test_compact_table_widths(family) -> None:
    table = CompactTable(family=family)
    table.reserve(10)

    assert table.M == 64
    assert table.m == 19
    assert table.key_universe == 20 * 256
    assert table.value_bits == 5
    assert table.hash is not None
    assert table.quotient_bits == ((table.hash.range_size - 1) >> 6).bit_length()
    # lg(2 u / M) rounded up
    assert table.quotient_bits <= 8


def test_compact_table_grow(family) -> None:
    table = CompactTable(sigma=4, family=family, seed=3)
    table.reserve(10)
    for key in range(19):
        assert table.find_or_insert(key, key + 1) == (key + 1, True)
    assert table.M == 64

    table.find_or_insert(19, 20)
    assert table.M == 128
    assert table.m == 38
    assert sorted(table.items()) == [(key, key + 1) for key in range(20)]
    assert all(table.get(key) == key + 1 for key in range(20))
    assert table.find_or_insert(5, 99) == (6, False)


def test_compact_table_high_load(family) -> None:
    # long clusters that wrap around the end of the table
    rng = random.Random(11)
    table = CompactTable(alpha=0.9, family=family, seed=5)
    table.reserve(100)
    assert (table.M, table.m) == (128, 115)

    keys = rng.sample(range(table.key_universe), 115)
    for value, key in enumerate(keys, start=1):
        table.find_or_insert(key, value)
    assert table.M == 128

    expected = {key: value for value, key in enumerate(keys, start=1)}
    assert dict(table.items()) == expected
    assert all(table.get(key) == value for key, value in expected.items())

    absent = set(range(table.key_universe)) - set(keys)
    assert all(table.get(key) is None for key in rng.sample(sorted(absent), 200))


@pytest.mark.slow
def test_compact_table_recovers_keys_at_scale(family) -> None:
    rng = random.Random(21)
    table = CompactTable(family=family, seed=8)
    expected: dict[int, int] = {}
    while len(expected) < 100_000:
        # a child of an already stored node, as in the trie
        key = SIGMA * rng.randrange(len(expected) + 1) + rng.randrange(SIGMA)
        if key in expected:
            continue
        expected[key] = len(expected) + 1
        assert table.find_or_insert(key, expected[key]) == (expected[key], True)

    assert dict(table.items()) == expected
    for key, value in rng.sample(sorted(expected.items()), 1000):
        assert table.get(key) == value


def test_compact_table_errors() -> None:
    with pytest.raises(ValueError, match="load factor"):
        CompactTable(alpha=1.0)

    table = CompactTable()
    with pytest.raises(ValueError, match="must be positive"):
        table.find_or_insert(1, 0)

    table.reserve(10)
    with pytest.raises(ValueError, match="outside"):
        table.get(table.key_universe)


def test_compact_table_empty() -> None:
    table = CompactTable()
    assert table.get(3) is None
    assert list(table.items()) == []
    assert table.M == 0
    assert table.nbytes == 0


def test_compact_trie_matches_hash_trie(family) -> None:
    data = b"how much wood would a woodchuck chuck if a woodchuck could chuck wood" * 8
    compact = CompactTrie(hash_family=family)
    reference = HashTrie()

    assert factorize_lz78(data, compact) == factorize_lz78(data, reference)
    # keys are recovered from quotients and initial addresses
    assert sorted(compact.table.items()) == sorted(reference.table.items())
    assert sorted(label for _, label in compact.table.items()) == list(
        range(1, compact.size() + 1)
    )


def test_compact_trie_lzw(family) -> None:
    data = bytes(range(256)) + b"abracadabra" * 30
    assert factorize_lzw(data, CompactTrie(hash_family=family)) == factorize_lzw(data, HashTrie())


def test_compact_trie_child_or_insert() -> None:
    trie = CompactTrie()
    assert trie.child_or_insert(0, 3, 1) == Inserted(1)
    assert trie.child_or_insert(0, 3, 2) == Found(1, 1)
    assert trie.child_or_insert(1, 256, 2) == Inserted(2)
    assert trie.child_or_insert(1, 256, 3) == Found(2, 2)


def test_compact_trie_stats() -> None:
    account = AllocAccount()
    trie = CompactTrie(account=account)
    factorize_lz78(EXAMPLE_TEXT, trie)
    stats = trie.stats()

    assert stats.size == 6
    assert stats.table_size_M == 32
    assert stats.index_bits == trie.table.value_bits
    assert stats.allocated_bytes == trie.table.nbytes
    assert account.live_bytes("cht") == trie.table.nbytes


def test_compact_trie_seeded() -> None:
    data = b"abcabcabd" * 50
    first, second = CompactTrie(seed=1), CompactTrie(seed=1)
    factorize_lz78(data, first)
    factorize_lz78(data, second)
    assert first.table.hash == second.table.hash
    assert first.stats().collisions == second.stats().collisions
