from __future__ import annotations

import abc
import inspect
from collections.abc import Hashable
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, ClassVar, TypeVar

from lztrie.accounting import AllocAccount
from lztrie.utils import Frozen, FrozenDict

if TYPE_CHECKING:
    from lztrie.factorize import ResizeHintState

#: Alphabet size: the byte alphabet mapped to character codes 1..256.
SIGMA = 256

#: Seed of the randomized backends when none is given.
DEFAULT_SEED = 0x5EED

NodeHandle = Hashable


@dataclass(frozen=True, slots=True)
class Found:
    """The child exists: ``node`` is its handle and ``label`` its factor index."""

    node: NodeHandle
    label: int


@dataclass(frozen=True, slots=True)
class Inserted:
    """The child did not exist and was created with ``label``."""

    label: int


@dataclass(frozen=True)
class BackendStats:
    """Measurements of a trie backend.

    ``collisions`` counts occupied, non-matching slots traversed by probing
    (always 0 for the deterministic tries), ``table_size_M`` is the final
    hash table size (0 for deterministic tries).
    """

    collisions: int = 0
    table_size_M: int = 0
    allocated_bytes: int = 0
    peak_bytes: int = 0
    size: int = 0
    index_bits: int = 32


class TrieBackend(abc.ABC):
    """Base class of the dynamic LZ trie representations.

    The factorization driver only needs to navigate from a node to the child
    reached by a character and to create that child when it is missing, so
    this is the whole contract. Nodes are labelled by the driver with
    strictly increasing factor indices; the root has label 0.

    Parameters
    ----------
    account : AllocAccount, optional
        Allocation account receiving the sizes of all arrays allocated and
        released by the backend. A private account is created if omitted.

    """

    name: ClassVar[str] = ""
    backend_id: ClassVar[int] = -1

    _account: AllocAccount
    _hints: ResizeHintState | None

    def __init__(self, account: AllocAccount | None = None):
        self._account = account if account is not None else AllocAccount()
        self._hints = None

    @classmethod
    def from_options(cls, **options: Any) -> TrieBackend:
        """Create a backend, ignoring the options its constructor doesn't take."""
        params = inspect.signature(cls.__init__).parameters
        return cls(**{k: v for k, v in options.items() if k in params and v is not None})

    @property
    def account(self) -> AllocAccount:
        return self._account

    def root(self) -> NodeHandle:
        """Handle of the root node (the empty factor)."""
        return 0

    @abc.abstractmethod
    def child_or_insert(self, node: NodeHandle, c: int, new_label: int) -> Found | Inserted:
        """Navigate from ``node`` along the edge labelled ``c``.

        Parameters
        ----------
        node : hashable
            Handle of the current node, as returned by :py:meth:`root` or by
            a previous :py:class:`Found`.
        c : int
            Character code in ``[1..256]``.
        new_label : int
            Label given to the child if it has to be created.

        Returns
        -------
        Found or Inserted

        """
        ...

    @abc.abstractmethod
    def size(self) -> int:
        """Number of nodes stored (the root excluded)."""
        ...

    @abc.abstractmethod
    def stats(self) -> BackendStats: ...

    def insert_literals(self, sigma: int) -> list[NodeHandle]:
        """Insert the children ``1..sigma`` of the root, labelled by their
        character code, and return their handles.

        Raises
        ------
        ValueError
            If the trie is not empty.

        """
        root = self.root()
        for c in range(1, sigma + 1):
            if isinstance(self.child_or_insert(root, c, c), Found):
                raise ValueError(f"the root already has a child for character code {c}")
        handles = []
        for c in range(1, sigma + 1):
            found = self.child_or_insert(root, c, c)
            assert isinstance(found, Found)
            handles.append(found.node)
        return handles

    def reserve(self, expected_factors: int) -> None:
        """Hint that at least ``expected_factors`` nodes will be stored.

        Backends are free to ignore the hint.
        """

    def bind_hints(self, hints: ResizeHintState | None) -> None:
        """Attach the driver's progress state used to compute resize hints."""
        self._hints = hints

    def capacity_hint(self) -> int | None:
        """Expected final number of nodes, or None without a bound driver."""
        if self._hints is None:
            return None
        return self._hints.capacity_hint()

    def settled_capacity_hint(self) -> int | None:
        """:py:meth:`capacity_hint` once less than half of the input remains,
        None before.
        """
        if self._hints is None or not self._hints.settled:
            return None
        return self._hints.capacity_hint()

    def _alloc(self, nbytes: int) -> None:
        self._account.alloc(self.name, nbytes)

    def _free(self, nbytes: int) -> None:
        self._account.free(self.name, nbytes)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(size={self.size()})"


class BackendRegistry:
    """A registry of the trie backends selectable by name."""

    _backends: dict[str, type[TrieBackend]] = {}
    _names_by_id: dict[int, str] = {}

    @classmethod
    def register(cls, name: str, backend_id: int, backend_cls: Any) -> None:
        if not (isinstance(backend_cls, type) and issubclass(backend_cls, TrieBackend)):
            raise ValueError(f"class {backend_cls!r} is not a TrieBackend subclass")
        if name in cls._backends and cls._backends[name] is not backend_cls:
            raise ValueError(f"a backend named {name!r} is already registered")
        if backend_id in cls._names_by_id and cls._names_by_id[backend_id] != name:
            raise ValueError(
                f"backend id {backend_id} is already used by {cls._names_by_id[backend_id]!r}"
            )
        if not 0 <= backend_id < 256:
            raise ValueError(f"backend id must fit in one byte, got {backend_id}")

        backend_cls.name = name
        backend_cls.backend_id = backend_id
        cls._backends[name] = backend_cls
        cls._names_by_id[backend_id] = name

    @classmethod
    def get(cls, name: str) -> type[TrieBackend]:
        try:
            return cls._backends[name]
        except KeyError:
            raise KeyError(
                f"no backend named {name!r}; available backends: {sorted(cls._backends)}"
            ) from None

    @classmethod
    def name_of(cls, backend_id: int) -> str:
        try:
            return cls._names_by_id[backend_id]
        except KeyError:
            raise KeyError(f"unknown backend id {backend_id}") from None


T_BackendClass = TypeVar("T_BackendClass")


def register_backend(name: str, backend_id: int):
    """Class decorator registering a :py:class:`TrieBackend` under ``name``.

    Parameters
    ----------
    name : str
        Name used to select the backend (e.g., on the command line).
    backend_id : int
        One-byte identifier written in the container header.

    """

    def decorator(backend_cls: T_BackendClass) -> T_BackendClass:
        BackendRegistry.register(name, backend_id, backend_cls)
        return backend_cls

    return decorator


def available_backends() -> Frozen[str, type[TrieBackend]]:
    """Return an immutable mapping of backend names to backend classes."""
    _load_builtin_backends()
    return FrozenDict(BackendRegistry._backends)


def create_backend(name: str, **options: Any) -> TrieBackend:
    """Create a registered backend by name.

    Options not accepted by the backend's constructor (e.g., ``seed`` for a
    deterministic trie) are ignored, so one set of run options can be used
    for every backend.
    """
    _load_builtin_backends()
    return BackendRegistry.get(name).from_options(**options)


def _load_builtin_backends() -> None:
    # registration happens at import time of the backend modules
    import lztrie.binary  # noqa: F401
    import lztrie.compact  # noqa: F401
    import lztrie.hash_trie  # noqa: F401
    import lztrie.rolling  # noqa: F401
    import lztrie.ternary  # noqa: F401
