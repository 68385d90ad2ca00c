"""Dense bit-packed 0-1 matrices.

Rows are packed little-endian into 64-bit words: column ``h`` of a row lives
in word ``h // 64`` at bit ``h % 64``. Padding bits past the last column are
always zero, so a plain popcount over a row's words is exact.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

WORD_BITS = 64

# Upper bound on the uint64 temporary built per block in naive_multiply.
_BLOCK_WORDS = 1 << 22


class DimensionError(ValueError):
    """Operand shapes are incompatible."""


class ParameterError(ValueError):
    """A numeric parameter is outside its allowed range."""


def words_for(cols: int) -> int:
    return (cols + WORD_BITS - 1) // WORD_BITS


def _pack(dense: np.ndarray) -> np.ndarray:
    rows, cols = dense.shape
    nbytes = words_for(cols) * 8
    packed = np.packbits(dense.astype(bool, copy=False), axis=1, bitorder="little")
    if packed.shape[1] < nbytes:
        packed = np.pad(packed, ((0, 0), (0, nbytes - packed.shape[1])))
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64, copy=False)


def _unpack(words: np.ndarray, cols: int) -> np.ndarray:
    as_bytes = np.ascontiguousarray(words, dtype="<u8").view(np.uint8)
    return np.unpackbits(as_bytes, axis=-1, bitorder="little", count=cols)


@dataclass(frozen=True, eq=False)
class BitRow:
    """A single packed bit vector of ``length`` coordinates."""

    length: int
    words: np.ndarray

    @classmethod
    def from_bits(cls, bits: Iterable[int] | str) -> "BitRow":
        dense = _parse_bits(bits)
        return cls(len(dense), _pack(dense[None, :])[0])

    def to_dense(self) -> np.ndarray:
        return _unpack(self.words[None, :], self.length)[0]

    def __len__(self) -> int:
        return self.length

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitRow):
            return NotImplemented
        return self.length == other.length and np.array_equal(self.words, other.words)

    def __repr__(self) -> str:
        return f"BitRow({''.join(map(str, self.to_dense()))!r})"


def _parse_bits(bits: Iterable[int] | str) -> np.ndarray:
    if isinstance(bits, str):
        if set(bits) - {"0", "1"}:
            raise ValueError(f"bit string may only contain 0 and 1: {bits!r}")
        return np.frombuffer(bits.encode("ascii"), dtype=np.uint8) - ord("0")
    arr = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits)
    if arr.ndim != 1 or not np.isin(arr, (0, 1)).all():
        raise ValueError("bit vector entries must be 0 or 1")
    return arr.astype(np.uint8)


class BitMatrix:
    """Immutable p x q 0-1 matrix stored as ``(p, ceil(q/64))`` uint64 words."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: np.ndarray):
        if rows <= 0 or cols <= 0:
            raise DimensionError(f"matrix must be non-empty, got {rows}x{cols}")
        data = np.ascontiguousarray(data, dtype=np.uint64)
        if data.shape != (rows, words_for(cols)):
            raise DimensionError(f"word array shape {data.shape} does not fit {rows}x{cols}")
        tail = cols % WORD_BITS
        if tail and np.any(data[:, -1] >> np.uint64(tail)):
            raise ValueError("padding bits beyond the last column must be zero")
        data.flags.writeable = False
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "data", data)

    def __setattr__(self, name, value):
        raise AttributeError("BitMatrix is immutable")

    @classmethod
    def from_dense(cls, dense: np.ndarray | Sequence[Sequence[int]]) -> "BitMatrix":
        arr = np.asarray(dense)
        if arr.ndim != 2:
            raise DimensionError("expected a 2-D array")
        if not np.isin(arr, (0, 1)).all():
            raise ValueError("matrix entries must be 0 or 1")
        return cls(arr.shape[0], arr.shape[1], _pack(arr))

    @classmethod
    def from_strings(cls, lines: Sequence[str]) -> "BitMatrix":
        builder = BitMatrixBuilder(len(lines[0]) if lines else 0)
        for line in lines:
            builder.add_row(line)
        return builder.build()

    @classmethod
    def stack(cls, rows: Sequence[BitRow]) -> "BitMatrix":
        if not rows:
            raise DimensionError("cannot stack zero rows")
        length = rows[0].length
        if any(r.length != length for r in rows):
            raise DimensionError("all rows must have the same length")
        return cls(len(rows), length, np.stack([r.words for r in rows]))

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def n_words(self) -> int:
        return self.data.shape[1]

    def row(self, i: int) -> BitRow:
        return BitRow(self.cols, self.data[i])

    def __iter__(self):
        return (self.row(i) for i in range(self.rows))

    def __len__(self) -> int:
        return self.rows

    def take_rows(self, indices: Sequence[int] | np.ndarray) -> "BitMatrix":
        idx = np.asarray(indices, dtype=np.intp)
        return BitMatrix(len(idx), self.cols, self.data[idx])

    def to_dense(self) -> np.ndarray:
        """Unpacked ``uint8`` array of shape ``(rows, cols)``."""
        return _unpack(self.data, self.cols)

    def to_strings(self) -> list[str]:
        return ["".join("01"[b] for b in row) for row in self.to_dense()]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.data, other.data)

    __hash__ = None

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols})"


class BitMatrixBuilder:
    """Accumulates rows of a fixed width, then freezes them into a BitMatrix."""

    def __init__(self, cols: int):
        if cols <= 0:
            raise DimensionError("row width must be positive")
        self.cols = cols
        self._rows: list[np.ndarray] = []

    def add_row(self, bits: Iterable[int] | str) -> "BitMatrixBuilder":
        dense = _parse_bits(bits)
        if len(dense) != self.cols:
            raise DimensionError(f"row has {len(dense)} bits, expected {self.cols}")
        self._rows.append(dense)
        return self

    def build(self) -> BitMatrix:
        if not self._rows:
            raise DimensionError("no rows added")
        return BitMatrix.from_dense(np.stack(self._rows))


def _check_same_length(a: BitRow, b: BitRow) -> None:
    if a.length != b.length:
        raise DimensionError(f"vector lengths differ: {a.length} vs {b.length}")


def ham(a: BitRow, b: BitRow) -> int:
    """Hamming distance: popcount of the word-wise XOR."""
    _check_same_length(a, b)
    return int(np.bitwise_count(a.words ^ b.words).sum())


def inner_product(a: BitRow, b: BitRow) -> int:
    """Integer inner product of two 0-1 vectors: popcount of the word-wise AND."""
    _check_same_length(a, b)
    return int(np.bitwise_count(a.words & b.words).sum())


def hamming_to_row(points: BitMatrix, words: np.ndarray) -> np.ndarray:
    """Hamming distance from every row of ``points`` to one packed row."""
    return np.bitwise_count(points.data ^ words).sum(axis=1, dtype=np.int64)


def pairwise_hamming(points: BitMatrix) -> np.ndarray:
    x = points.data
    return np.bitwise_count(x[:, None, :] ^ x[None, :, :]).sum(axis=-1, dtype=np.int64)


def transpose(m: BitMatrix) -> BitMatrix:
    dense = m.to_dense()
    return BitMatrix(m.cols, m.rows, _pack(np.ascontiguousarray(dense.T)))


def naive_multiply(a: BitMatrix, b: BitMatrix, threads: int = 1) -> np.ndarray:
    """Arithmetic product ``a @ b`` as an int32 array.

    Every entry is an AND-popcount between a row of ``a`` and a row of the
    materialized transpose of ``b``. Row blocks are independent and are
    spread over ``threads`` workers.
    """
    if a.cols != b.rows:
        raise DimensionError(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    bt = transpose(b).data
    out = np.empty((a.rows, b.cols), dtype=np.int32)
    block = max(1, _BLOCK_WORDS // (b.cols * a.n_words))

    def run(start: int) -> None:
        chunk = a.data[start:start + block, None, :] & bt[None, :, :]
        out[start:start + block] = np.bitwise_count(chunk).sum(axis=-1, dtype=np.int32)

    starts = range(0, a.rows, block)
    if threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(threads) as pool:
            list(pool.map(run, starts))
    else:
        for s in starts:
            run(s)
    return out
