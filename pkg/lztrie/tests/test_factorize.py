import pytest

from lztrie.backend import SIGMA
from lztrie.binary import BinaryTrie
from lztrie.factorize import (
    Lz78Factor,
    LzwFactor,
    ResizeHintState,
    expand_factors,
    factorize_lz78,
    factorize_lzw,
    growth_estimate,
    initial_reserve,
    iter_lz78,
    lemma1_lower_bound,
    lemma1_upper_ratio,
    verify_factorization,
)
from lztrie.tests.conftest import A, B, EXAMPLE_TEXT

EXAMPLE_LZ78 = [
    Lz78Factor(0, A),
    Lz78Factor(1, A),
    Lz78Factor(0, B),
    Lz78Factor(1, B),
    Lz78Factor(2, A),
    Lz78Factor(3, A),
]
EXAMPLE_LZW = [LzwFactor(c) for c in (-A, 1, -B, -A, 3, 2, -A)]


def test_lz78_example(make_trie) -> None:
    assert factorize_lz78(EXAMPLE_TEXT, make_trie()) == EXAMPLE_LZ78


def test_lzw_example(make_trie) -> None:
    assert factorize_lzw(EXAMPLE_TEXT, make_trie()) == EXAMPLE_LZW


def test_expand_example() -> None:
    assert list(expand_factors(EXAMPLE_LZ78)) == [b"a", b"aa", b"b", b"ab", b"aaa", b"ba"]
    assert list(expand_factors(EXAMPLE_LZW)) == [b"a", b"aa", b"b", b"a", b"ba", b"aab", b"a"]


@pytest.mark.parametrize(
    "data, expected",
    [
        (b"", []),
        (b"a", [Lz78Factor(0, A)]),
        (b"aa", [Lz78Factor(0, A), Lz78Factor(1, None)]),
        (b"aba", [Lz78Factor(0, A), Lz78Factor(0, B), Lz78Factor(1, None)]),
    ],
)
def test_lz78_edge_cases(make_trie, data, expected) -> None:
    assert factorize_lz78(data, make_trie()) == expected


@pytest.mark.parametrize(
    "data, expected",
    [
        (b"", []),
        (b"b", [-B]),
        (b"aaa", [-A, 1]),
        (b"aaaa", [-A, 1, -A]),
        # the third factor refers to the node created right after it
        (b"aaaaaa", [-A, 1, 2]),
    ],
)
def test_lzw_edge_cases(make_trie, data, expected) -> None:
    assert factorize_lzw(data, make_trie()) == [LzwFactor(c) for c in expected]


def test_factorize_every_byte(make_trie) -> None:
    data = bytes(range(256)) * 2
    factors = factorize_lz78(data, make_trie())
    assert verify_factorization(data, factors)
    assert [f.ext for f in factors[:256]] == list(range(1, 257))

    factors = factorize_lzw(data, make_trie())
    assert verify_factorization(data, factors)


def test_labels_are_factor_indices() -> None:
    trie = BinaryTrie()
    factors = factorize_lz78(EXAMPLE_TEXT, trie)
    assert trie.size() == len(factors)
    for x, factor in enumerate(factors, start=1):
        assert 0 <= factor.ref < x


def test_lz78_streamed_input() -> None:
    data = b"abracadabra" * 20
    streamed = list(iter_lz78(iter(data), BinaryTrie(), n=len(data)))
    assert streamed == factorize_lz78(data, BinaryTrie())


def test_input_length_errors() -> None:
    with pytest.raises(ValueError, match="input length must be known"):
        list(iter_lz78(iter(b"ab"), BinaryTrie()))

    with pytest.raises(ValueError, match="longer than its declared length"):
        list(iter_lz78(iter(b"abc"), BinaryTrie(), n=2))

    with pytest.raises(ValueError, match="shorter"):
        list(iter_lz78(iter(b"abc"), BinaryTrie(), n=5))


def test_lzw_requires_empty_trie() -> None:
    trie = BinaryTrie()
    factorize_lz78(b"abc", trie)
    with pytest.raises(ValueError, match="requires an empty trie"):
        factorize_lzw(b"abc", trie)


def test_lzw_literal_layer() -> None:
    trie = BinaryTrie()
    factorize_lzw(b"", trie)
    assert trie.size() == SIGMA
    assert list(trie.iter_children(0)) == [(c, c) for c in range(1, SIGMA + 1)]


def test_verify_factorization() -> None:
    assert verify_factorization(EXAMPLE_TEXT, EXAMPLE_LZ78)
    assert verify_factorization(EXAMPLE_TEXT, EXAMPLE_LZW)

    altered = EXAMPLE_LZ78[:-1] + [Lz78Factor(5, A)]
    assert not verify_factorization(EXAMPLE_TEXT, altered)

    # forward reference
    assert not verify_factorization(b"ab", [Lz78Factor(0, A), Lz78Factor(2, B)])
    # missing extension before the last factor
    assert not verify_factorization(
        b"aab", [Lz78Factor(0, A), Lz78Factor(1, None), Lz78Factor(0, B)]
    )
    assert not verify_factorization(b"a", [LzwFactor(0)])
    assert not verify_factorization(b"a", [Lz78Factor(0, A), LzwFactor(-A)])


def test_expand_factors_errors() -> None:
    with pytest.raises(ValueError, match="refers to factor 1"):
        list(expand_factors([Lz78Factor(1, A)]))

    with pytest.raises(ValueError, match="invalid character code"):
        list(expand_factors([Lz78Factor(0, 257)]))

    with pytest.raises(ValueError, match="invalid code"):
        list(expand_factors([LzwFactor(-A), LzwFactor(2)]))


@pytest.mark.parametrize("n, expected", [(0, 0), (1, 2), (11, 5), (50, 10)])
def test_initial_reserve(n, expected) -> None:
    assert initial_reserve(n) == expected


def test_initial_reserve_error() -> None:
    with pytest.raises(ValueError, match="must be non-negative"):
        initial_reserve(-1)


@pytest.mark.parametrize(
    "n, r, z_prime, expected",
    [
        # first half: interpolation
        (100, 64, 10, 10 + 18),
        # second half: z' + 3r / lg r
        (100, 16, 40, 40 + 12),
        # nothing parsed yet
        (100, 100, 0, 50),
        (100, 0, 33, 33),
        (100, 1, 33, 34),
    ],
)
def test_growth_estimate(n, r, z_prime, expected) -> None:
    assert growth_estimate(ResizeHintState(n=n, r=r, z_prime=z_prime)) == expected


def test_resize_hint_state() -> None:
    hints = ResizeHintState(n=100, r=16, z_prime=40, base=SIGMA)
    assert hints.capacity_hint() == SIGMA + 52
    assert hints.settled
    assert not ResizeHintState(n=100, r=50).settled
    assert not ResizeHintState(n=0, r=0).settled

    with pytest.raises(ValueError, match="remaining characters"):
        ResizeHintState(n=10, r=11)

    with pytest.raises(ValueError, match="non-negative"):
        ResizeHintState(n=10, r=1, z_prime=-1)


def test_resize_hints_bound_during_factorization() -> None:
    trie = BinaryTrie()
    data = b"abcabcabcabd" * 10
    factors = factorize_lz78(data, trie)
    assert trie._hints is not None
    assert trie._hints.r == 0
    assert trie._hints.z_prime == len(factors) - (factors[-1].ext is None)


def test_lemma1_bounds() -> None:
    assert lemma1_lower_bound(0) == 0.0
    # a, aa, aaa: 3 factors for 6 characters
    assert lemma1_lower_bound(6) == pytest.approx(3.0)
    assert lemma1_upper_ratio(1, 1) == 0.0
    assert lemma1_upper_ratio(256, 16) == pytest.approx(16 / 256)


def test_lemma1_lower_bound_holds(make_trie) -> None:
    data = b"a" * 500
    for factorize in (factorize_lz78, factorize_lzw):
        assert len(factorize(data, make_trie())) >= lemma1_lower_bound(len(data))
