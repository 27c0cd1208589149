from __future__ import annotations

from collections.abc import Iterator

from bitarray import bitarray
from bitarray.util import ba2int, int2ba


class IntVector:
    """Fixed-length vector of unsigned integers of ``width`` bits each,
    packed back to back in a :class:`bitarray.bitarray`.

    Parameters
    ----------
    length : int
        Number of entries.
    width : int
        Bits per entry. Values must satisfy ``value < 2**width``.

    """

    __slots__ = ("_bits", "_length", "_width")

    def __init__(self, length: int, width: int):
        if length < 0 or width < 0:
            raise ValueError(f"invalid IntVector shape: length={length}, width={width}")
        self._length = length
        self._width = width
        self._bits = bitarray(length * width, endian="big")
        self._bits.setall(0)

    @property
    def width(self) -> int:
        return self._width

    @property
    def nbytes(self) -> int:
        """Size of the underlying bit buffer in bytes."""
        return (len(self._bits) + 7) // 8

    def __len__(self) -> int:
        return self._length

    def _check_index(self, index: int) -> int:
        if not 0 <= index < self._length:
            raise IndexError(f"index {index} out of range for IntVector of length {self._length}")
        return index * self._width

    def __getitem__(self, index: int) -> int:
        start = self._check_index(index)
        if self._width == 0:
            return 0
        return ba2int(self._bits[start : start + self._width])

    def __setitem__(self, index: int, value: int) -> None:
        start = self._check_index(index)
        if value < 0 or value >> self._width:
            raise ValueError(f"value {value} does not fit in {self._width} bits")
        if self._width:
            self._bits[start : start + self._width] = int2ba(
                value, length=self._width, endian="big"
            )

    def is_zero(self, index: int) -> bool:
        """True if all bits of entry ``index`` are unset."""
        start = self._check_index(index)
        return not self._bits[start : start + self._width].any()

    def __iter__(self) -> Iterator[int]:
        for index in range(self._length):
            yield self[index]

    def __repr__(self) -> str:
        return f"{type(self).__name__}(length={self._length}, width={self._width})"
