from __future__ import annotations

from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from lztrie.accounting import AllocAccount
from lztrie.backend import DEFAULT_SEED, TrieBackend, create_backend

BackendName = Literal["binary", "ternary", "hash", "hash+", "cht", "rolling", "rolling+"]
FormatName = Literal["lz78", "lzw"]
Mode = Literal["compress", "decompress", "verify", "bench"]

ROLLING_BACKENDS = ("rolling", "rolling+")


class RunConfig(BaseModel):
    """Options of one compressor run.

    Backend-specific options are only accepted together with a backend that
    uses them: ``rolling_fn``, ``scramble`` and ``width`` with the rolling
    backends, ``hash_family`` with ``cht``.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    mode: Mode = "compress"
    format: FormatName = "lz78"
    backend: BackendName = "binary"
    rolling_fn: Literal["fermat", "id37"] | None = None
    scramble: bool = False
    width: int | None = Field(default=None, ge=1, le=64)
    hash_family: Literal["lcg", "xorshift"] | None = None
    seed: int = Field(default=DEFAULT_SEED, ge=0, lt=1 << 64)
    length: int | None = Field(default=None, ge=0)
    stats: Path | None = None
    verify: bool = False

    @model_validator(mode="after")
    def _check_backend_options(self) -> RunConfig:
        if self.backend not in ROLLING_BACKENDS:
            used = [
                name
                for name, value in (
                    ("rolling_fn", self.rolling_fn),
                    ("scramble", self.scramble or None),
                    ("width", self.width),
                )
                if value is not None
            ]
            if used:
                raise ValueError(
                    f"options {used} are only valid with the backends {list(ROLLING_BACKENDS)}, "
                    f"not {self.backend!r}"
                )
        if self.hash_family is not None and self.backend != "cht":
            raise ValueError(f"option 'hash_family' is only valid with 'cht', not {self.backend!r}")
        return self

    @property
    def is_monte_carlo(self) -> bool:
        """True if the backend may compute a wrong factorization."""
        return self.backend in ROLLING_BACKENDS

    def backend_options(self) -> dict[str, Any]:
        options = {
            "seed": self.seed,
            "rolling_fn": self.rolling_fn,
            "scramble": self.scramble,
            "width": self.width,
            "hash_family": self.hash_family,
        }
        return {k: v for k, v in options.items() if v is not None}

    def create_backend(self, account: AllocAccount | None = None) -> TrieBackend:
        return create_backend(self.backend, account=account, **self.backend_options())
