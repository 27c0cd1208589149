from importlib.metadata import PackageNotFoundError, version

from .backend import (
    BackendStats,
    Found,
    Inserted,
    TrieBackend,
    available_backends,
    create_backend,
    register_backend,
)
from .binary import BinaryTrie
from .coder import compress, decompress
from .compact import CompactTrie
from .config import RunConfig
from .factorize import (
    Lz78Factor,
    LzwFactor,
    ResizeHintState,
    expand_factors,
    factorize_lz78,
    factorize_lzw,
    iter_lz78,
    iter_lzw,
    verify_factorization,
)
from .hash_trie import HashPlusTrie, HashTrie
from .rolling import (
    CollisionDetected,
    MonteCarloWarning,
    RollingPlusTrie,
    RollingTrie,
    factorize_verified,
)
from .ternary import TernaryTrie

__all__ = [
    "BackendStats",
    "BinaryTrie",
    "CollisionDetected",
    "CompactTrie",
    "Found",
    "HashPlusTrie",
    "HashTrie",
    "Inserted",
    "Lz78Factor",
    "LzwFactor",
    "MonteCarloWarning",
    "ResizeHintState",
    "RollingPlusTrie",
    "RollingTrie",
    "RunConfig",
    "TernaryTrie",
    "TrieBackend",
    "available_backends",
    "compress",
    "create_backend",
    "decompress",
    "expand_factors",
    "factorize_lz78",
    "factorize_lzw",
    "factorize_verified",
    "iter_lz78",
    "iter_lzw",
    "register_backend",
    "verify_factorization",
]

try:
    __version__ = version("lztrie")
except PackageNotFoundError:  # noqa
    # package is not installed
    pass
