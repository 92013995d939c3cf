"""Bit-packed GF(2) linear algebra.

Rows are stored as little-endian 64-bit words: column ``c`` lives in word
``c // 64`` at bit ``c % 64``. Padding bits past ``cols`` are kept at zero.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import ContractViolation

WORD = 64


def _n_words(cols: int) -> int:
    return max(1, (cols + WORD - 1) // WORD)


class BitMatrix:
    """Dense GF(2) matrix with bit-packed rows."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: Optional[np.ndarray] = None):
        if rows < 0 or cols < 0:
            raise ContractViolation("BitMatrix dimensions must be nonnegative")
        self.rows = int(rows)
        self.cols = int(cols)
        words = _n_words(self.cols)
        if data is None:
            data = np.zeros((self.rows, words), dtype=np.uint64)
        else:
            data = np.ascontiguousarray(data, dtype=np.uint64)
            if data.shape != (self.rows, words):
                raise ContractViolation(
                    f"packed data shape {data.shape} != {(self.rows, words)}"
                )
            data = data.copy()
            _clear_padding(data, self.cols)
        self.data = data

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    @classmethod
    def from_dense(cls, a) -> "BitMatrix":
        arr = np.asarray(a)
        if arr.ndim != 2:
            raise ContractViolation("from_dense expects a 2-D array")
        arr = (arr.astype(np.int64) & 1).astype(np.uint8)
        rows, cols = arr.shape
        words = _n_words(cols)
        padded = np.zeros((rows, words * WORD), dtype=np.uint8)
        padded[:, :cols] = arr
        packed = np.packbits(padded.reshape(rows, words, WORD), axis=2, bitorder="little")
        data = packed.view(np.uint64).reshape(rows, words)
        if data.dtype.byteorder == ">":  # pragma: no cover - big-endian hosts
            data = data.byteswap()
        return cls(rows, cols, data)

    @classmethod
    def random(cls, rows: int, cols: int, rng: np.random.Generator) -> "BitMatrix":
        return cls.from_dense(rng.integers(0, 2, size=(rows, cols), dtype=np.uint8))

    def to_dense(self) -> np.ndarray:
        words = self.data.shape[1]
        raw = self.data.astype("<u8").view(np.uint8).reshape(self.rows, words * 8)
        bits = np.unpackbits(raw, axis=1, bitorder="little")
        return bits[:, : self.cols].astype(np.uint8)

    def copy(self) -> "BitMatrix":
        return BitMatrix(self.rows, self.cols, self.data)

    def transpose(self) -> "BitMatrix":
        return BitMatrix.from_dense(self.to_dense().T)

    @property
    def T(self) -> "BitMatrix":
        return self.transpose()

    def get(self, r: int, c: int) -> int:
        return int((int(self.data[r, c // WORD]) >> (c % WORD)) & 1)

    def hstack(self, other: "BitMatrix") -> "BitMatrix":
        if other.rows != self.rows:
            raise ContractViolation("hstack needs equal row counts")
        return BitMatrix.from_dense(np.hstack([self.to_dense(), other.to_dense()]))

    def matvec(self, x: Sequence[int]) -> np.ndarray:
        xv = np.asarray(x, dtype=np.int64) & 1
        if xv.shape != (self.cols,):
            raise ContractViolation("matvec length mismatch")
        return ((self.to_dense().astype(np.int64) @ xv) & 1).astype(np.uint8)

    def matmul(self, other: "BitMatrix") -> "BitMatrix":
        if self.cols != other.rows:
            raise ContractViolation("matmul inner dimensions differ")
        prod = self.to_dense().astype(np.int64) @ other.to_dense().astype(np.int64)
        return BitMatrix.from_dense(prod & 1)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return (
            self.rows == other.rows
            and self.cols == other.cols
            and bool(np.array_equal(self.data, other.data))
        )

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols})"


def _clear_padding(data: np.ndarray, cols: int) -> None:
    rem = cols % WORD
    if data.shape[0] == 0:
        return
    if cols == 0:
        data[:, :] = 0
        return
    if rem:
        mask = np.uint64((1 << rem) - 1)
        data[:, -1] &= mask


def _column_bits(data: np.ndarray, c: int) -> np.ndarray:
    word = data[:, c // WORD]
    return ((word >> np.uint64(c % WORD)) & np.uint64(1)).astype(bool)


def _eliminate(data: np.ndarray, cols: int) -> list[tuple[int, int]]:
    """Gauss-Jordan elimination in place; returns (row, col) pivot pairs."""
    pivots: list[tuple[int, int]] = []
    n_rows = data.shape[0]
    r = 0
    for c in range(cols):
        if r == n_rows:
            break
        bits = _column_bits(data, c)
        cand = np.flatnonzero(bits[r:])
        if cand.size == 0:
            continue
        p = r + int(cand[0])
        if p != r:
            data[[r, p]] = data[[p, r]]
            bits[[r, p]] = bits[[p, r]]
        bits[r] = False
        if bits.any():
            data[bits] ^= data[r]
        pivots.append((r, c))
        r += 1
    return pivots


def rank(m: BitMatrix) -> int:
    """GF(2) row rank; ``m`` is left untouched."""
    if m.rows == 0 or m.cols == 0:
        return 0
    work = m.data.copy()
    return len(_eliminate(work, m.cols))


def rank_inplace(m: BitMatrix) -> int:
    """Like :func:`rank` but leaves ``m`` in reduced row echelon form."""
    if m.rows == 0 or m.cols == 0:
        return 0
    return len(_eliminate(m.data, m.cols))


def solve(m: BitMatrix, b: Sequence[int]) -> Optional[np.ndarray]:
    """Return some ``x`` with ``m @ x == b`` over GF(2), or ``None``."""
    bv = np.asarray(b, dtype=np.int64)
    if bv.shape != (m.rows,):
        raise ContractViolation(f"rhs length {bv.shape} != rows {m.rows}")
    aug = np.hstack([m.to_dense(), (bv & 1).astype(np.uint8)[:, None]])
    work = BitMatrix.from_dense(aug)
    pivots = _eliminate(work.data, m.cols)
    reduced = work.to_dense()
    pivot_rows = {r for r, _ in pivots}
    for r in range(m.rows):
        if r not in pivot_rows and reduced[r, m.cols]:
            return None
    x = np.zeros(m.cols, dtype=np.uint8)
    for r, c in pivots:
        x[c] = reduced[r, m.cols]
    return x


def rank_of_ints(vectors: Iterable[int]) -> int:
    """Rank of bit-vectors given as Python ints (bit i = coordinate i)."""
    basis: dict[int, int] = {}
    r = 0
    for v in vectors:
        while v:
            h = v.bit_length() - 1
            b = basis.get(h)
            if b is None:
                basis[h] = v
                r += 1
                break
            v ^= b
    return r


__all__ = [
    "BitMatrix",
    "rank",
    "rank_inplace",
    "solve",
    "rank_of_ints",
]
