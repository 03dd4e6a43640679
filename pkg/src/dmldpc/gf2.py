"""Dense GF(2) linear algebra on word-packed bit matrices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .pcm import ParityCheckMatrix

WORD = 64


def _n_words(cols: int) -> int:
    return max(1, -(-cols // WORD))


def pack_bits(dense: np.ndarray) -> np.ndarray:
    """Pack a 2-D 0/1 array into little-endian uint64 words (bit j -> word j//64, bit j%64)."""
    dense = np.atleast_2d(np.asarray(dense, dtype=np.uint8) & 1)
    rows, cols = dense.shape
    n_words = _n_words(cols)
    padded = np.zeros((rows, n_words * WORD), dtype=np.uint8)
    padded[:, :cols] = dense
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64).reshape(rows, n_words)


def unpack_bits(words: np.ndarray, cols: int) -> np.ndarray:
    words = np.ascontiguousarray(words, dtype="<u8")
    as_bytes = words.view(np.uint8).reshape(words.shape[0], words.shape[1] * 8)
    return np.unpackbits(as_bytes, axis=1, bitorder="little")[:, :cols]


@dataclass(frozen=True, eq=False)
class BitMatrix:
    """Row-major packed GF(2) matrix. Padding bits past ``cols`` are always zero."""

    rows: int
    cols: int
    words: np.ndarray

    @classmethod
    def from_dense(cls, dense) -> "BitMatrix":
        dense = np.asarray(dense)
        if dense.ndim != 2:
            raise PreconditionError("expected a 2-D array")
        return cls(dense.shape[0], dense.shape[1], pack_bits(dense))

    @classmethod
    def from_pcm(cls, h: ParityCheckMatrix) -> "BitMatrix":
        return cls.from_dense(h.to_dense())

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, np.zeros((rows, _n_words(cols)), dtype=np.uint64))

    def to_dense(self) -> np.ndarray:
        if self.rows == 0:
            return np.zeros((0, self.cols), dtype=np.uint8)
        return unpack_bits(self.words, self.cols)

    def __eq__(self, other):
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and np.array_equal(
            self.words, other.words
        )

    __hash__ = None


def _as_bitmatrix(mat) -> BitMatrix:
    if isinstance(mat, BitMatrix):
        return mat
    if isinstance(mat, ParityCheckMatrix):
        return BitMatrix.from_pcm(mat)
    return BitMatrix.from_dense(mat)


def _rref(mat: BitMatrix) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of a private copy; returns (words, pivot columns).

    Pivots are taken in column order, choosing the first remaining row with
    the bit set.
    """
    work = mat.words.copy()
    pivots: list[int] = []
    r = 0
    one = np.uint64(1)
    for c in range(mat.cols):
        if r == mat.rows:
            break
        w, bit = divmod(c, WORD)
        col_bits = (work[r:, w] >> np.uint64(bit)) & one
        hits = np.flatnonzero(col_bits)
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            work[[r, p]] = work[[p, r]]
        mask = ((work[:, w] >> np.uint64(bit)) & one).astype(bool)
        mask[r] = False
        work[mask] ^= work[r]
        pivots.append(c)
        r += 1
    return work[:r], pivots


def rank(mat) -> int:
    """GF(2) rank by Gaussian elimination."""
    mat = _as_bitmatrix(mat)
    if mat.rows == 0 or mat.cols == 0:
        return 0
    return len(_rref(mat)[1])


def nullspace_basis(mat) -> BitMatrix:
    """Basis of ``{v : mat v = 0}``, one row per free column, in systematic form."""
    return _nullspace(_as_bitmatrix(mat))[0]


def _nullspace(mat: BitMatrix) -> tuple[BitMatrix, list[int]]:
    if mat.rows == 0:
        dense = np.eye(mat.cols, dtype=np.uint8)
        return BitMatrix.from_dense(dense), list(range(mat.cols))
    reduced, pivots = _rref(mat)
    pivot_set = set(pivots)
    free = [c for c in range(mat.cols) if c not in pivot_set]
    if not free:
        return BitMatrix.zeros(0, mat.cols), []
    rref = unpack_bits(reduced, mat.cols)
    basis = np.zeros((len(free), mat.cols), dtype=np.uint8)
    basis[np.arange(len(free)), free] = 1
    # pivot variable i equals the sum of the free variables present in its RREF row
    basis[:, pivots] = rref[:, free].T
    return BitMatrix.from_dense(basis), free


@dataclass(frozen=True)
class LinearEncoder:
    """Systematic encoder: message bits appear verbatim at ``info_positions``."""

    m: int
    dim: int
    generator: BitMatrix
    info_positions: tuple[int, ...]

    @property
    def rate(self) -> float:
        return self.dim / self.m if self.m else 0.0


def systematic_encoder(h) -> LinearEncoder:
    mat = _as_bitmatrix(h)
    gen, free = _nullspace(mat)
    return LinearEncoder(mat.cols, gen.rows, gen, tuple(free))


def encode(e: LinearEncoder, msg) -> np.ndarray:
    """Codeword ``msg . G`` over GF(2)."""
    msg = np.asarray(msg, dtype=np.uint8).ravel() & 1
    if msg.size != e.dim:
        raise PreconditionError(f"message length {msg.size} != dimension {e.dim}")
    acc = np.bitwise_xor.reduce(e.generator.words[msg.astype(bool)], axis=0)
    return unpack_bits(acc[None, :], e.m)[0]


def syndrome(h: ParityCheckMatrix, v) -> np.ndarray:
    """``H v mod 2``; accepts one word or a 2-D batch with one word per row."""
    v = np.asarray(v, dtype=np.uint8)
    if v.shape[-1] != h.n_cols:
        raise PreconditionError(f"vector length {v.shape[-1]} != {h.n_cols} columns")
    batch = np.atleast_2d(v)
    gathered = batch[:, h.row_idx].astype(np.int64)
    csum = np.zeros((batch.shape[0], gathered.shape[1] + 1), dtype=np.int64)
    np.cumsum(gathered, axis=1, out=csum[:, 1:])
    sums = csum[:, h.row_ptr[1:]] - csum[:, h.row_ptr[:-1]]
    out = (sums & 1).astype(np.uint8)
    return out[0] if v.ndim == 1 else out
