import pytest

from lztrie.backend import create_backend

BACKEND_NAMES = ["binary", "ternary", "hash", "hash+", "cht", "rolling", "rolling+"]

# a a a b a b a a a b a, factorized as a|aa|b|ab|aaa|ba (LZ78)
EXAMPLE_TEXT = b"aaababaaaba"
A = ord("a") + 1
B = ord("b") + 1


@pytest.fixture(params=BACKEND_NAMES)
def backend_name(request) -> str:
    return request.param


@pytest.fixture
def make_trie(backend_name):
    def factory(**options):
        return create_backend(backend_name, **options)

    return factory
