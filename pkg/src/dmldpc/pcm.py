"""Sparse parity-check matrices built from difference arrays.

Construction 1 (odd ``a``, DM) yields a ``4a x a^2`` matrix made of an
all-ones row band ``R_v`` above three bands of circulant permutation
matrices with shifts ``0``, ``D(v,1)`` and ``D(v,2)``. Construction 2 (even
``a``, DCA) drops block column ``r0`` and the then-empty row ``r0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .arrays import DifferenceArray, Kind, build_dca, build_dm, find_r0, select_alpha, validate
from .errors import PreconditionError


class Circulant(NamedTuple):
    """``P^shift``: row ``r`` has its single 1 at column ``(r - shift) mod z``."""

    shift: int


class RowBlock(NamedTuple):
    """``R_v``: row ``v`` all ones, every other row zero."""

    v: int


@dataclass(frozen=True)
class BlockGrid:
    """``K x L`` arrangement of ``z x z`` blocks; ``None`` marks a zero block."""

    z: int
    cells: tuple[tuple[Circulant | RowBlock | None, ...], ...]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.cells), len(self.cells[0]) if self.cells else 0

    def exponents(self, band: int) -> tuple[int, ...]:
        return tuple(c.shift for c in self.cells[band])

    def is_circulant(self) -> bool:
        return all(c is None or isinstance(c, Circulant) for row in self.cells for c in row)


@dataclass(frozen=True)
class Origin:
    a: int | None = None
    kind: str = "external"  # dm | dca | qc | external
    alpha: int | None = None
    r0: int | None = None


def expand_cpm(a: int, shift: int) -> np.ndarray:
    """Dense ``a x a`` circulant permutation matrix ``P^shift``."""
    if not 0 <= shift < a:
        raise PreconditionError(f"shift {shift} outside [0, {a - 1}]")
    block = np.zeros((a, a), dtype=np.uint8)
    r = np.arange(a)
    block[r, (r - shift) % a] = 1
    return block


def _csr_from_lists(n_major: int, supports: Sequence[Sequence[int]]):
    lengths = np.fromiter((len(s) for s in supports), dtype=np.int64, count=n_major)
    ptr = np.zeros(n_major + 1, dtype=np.int64)
    np.cumsum(lengths, out=ptr[1:])
    idx = np.fromiter((int(i) for s in supports for i in sorted(s)), dtype=np.int64, count=ptr[-1])
    return ptr, idx


def _transpose(n_major: int, n_minor: int, ptr: np.ndarray, idx: np.ndarray):
    major = np.repeat(np.arange(n_major), np.diff(ptr))
    order = np.lexsort((major, idx))
    counts = np.bincount(idx, minlength=n_minor)
    tptr = np.zeros(n_minor + 1, dtype=np.int64)
    np.cumsum(counts, out=tptr[1:])
    return tptr, major[order]


@dataclass(frozen=True, eq=False)
class ParityCheckMatrix:
    """Binary ``n_rows x n_cols`` matrix held as both row and column supports.

    ``sections`` partitions the rows into the bands V_-1, V_0, V_1, V_2 for
    constructed matrices; it is ``None`` for imported ones.
    """

    n_rows: int
    n_cols: int
    col_ptr: np.ndarray
    col_idx: np.ndarray
    row_ptr: np.ndarray
    row_idx: np.ndarray
    sections: tuple[range, range, range, range] | None = None
    blocks: BlockGrid | None = None
    origin: Origin = field(default_factory=Origin)

    def __post_init__(self):
        for name in ("col_ptr", "col_idx", "row_ptr", "row_idx"):
            arr = np.asarray(getattr(self, name), dtype=np.int64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_col_supports(cls, n_rows: int, supports: Sequence[Sequence[int]], **meta):
        n_cols = len(supports)
        col_ptr, col_idx = _csr_from_lists(n_cols, supports)
        if col_idx.size and (col_idx.min() < 0 or col_idx.max() >= n_rows):
            raise PreconditionError("row index out of range")
        row_ptr, row_idx = _transpose(n_cols, n_rows, col_ptr, col_idx)
        return cls(n_rows, n_cols, col_ptr, col_idx, row_ptr, row_idx, **meta)

    @classmethod
    def from_dense(cls, dense, **meta):
        dense = np.asarray(dense) % 2
        n_rows, n_cols = dense.shape
        supports = [np.flatnonzero(dense[:, b]) for b in range(n_cols)]
        return cls.from_col_supports(n_rows, supports, **meta)

    @property
    def shape(self) -> tuple[int, int]:
        return self.n_rows, self.n_cols

    @property
    def n_edges(self) -> int:
        return int(self.col_idx.size)

    def rows_of(self, b: int) -> np.ndarray:
        """Rows holding a 1 in column ``b``."""
        return self.col_idx[self.col_ptr[b] : self.col_ptr[b + 1]]

    def cols_of(self, r: int) -> np.ndarray:
        """Columns holding a 1 in row ``r``."""
        return self.row_idx[self.row_ptr[r] : self.row_ptr[r + 1]]

    @property
    def col_weights(self) -> np.ndarray:
        return np.diff(self.col_ptr)

    @property
    def row_weights(self) -> np.ndarray:
        return np.diff(self.row_ptr)

    def col_supports(self) -> list[list[int]]:
        return [self.rows_of(b).tolist() for b in range(self.n_cols)]

    def row_supports(self) -> list[list[int]]:
        return [self.cols_of(r).tolist() for r in range(self.n_rows)]

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.shape, dtype=np.uint8)
        cols = np.repeat(np.arange(self.n_cols), self.col_weights)
        dense[self.col_idx, cols] = 1
        return dense

    def is_consistent(self) -> bool:
        """Row and column supports describe the same set of ones."""
        tptr, tidx = _transpose(self.n_cols, self.n_rows, self.col_ptr, self.col_idx)
        return np.array_equal(tptr, self.row_ptr) and np.array_equal(tidx, self.row_idx)

    def permuted(self, row_map: np.ndarray, col_map: np.ndarray, **meta) -> "ParityCheckMatrix":
        """Move entry ``(r, b)`` to ``(row_map[r], col_map[b])``."""
        row_map = np.asarray(row_map)
        supports: list[list[int]] = [[] for _ in range(self.n_cols)]
        for b in range(self.n_cols):
            supports[int(col_map[b])] = row_map[self.rows_of(b)].tolist()
        return ParityCheckMatrix.from_col_supports(self.n_rows, supports, **meta)

    def __eq__(self, other):
        if not isinstance(other, ParityCheckMatrix):
            return NotImplemented
        return (
            self.shape == other.shape
            and np.array_equal(self.col_ptr, other.col_ptr)
            and np.array_equal(self.col_idx, other.col_idx)
        )

    __hash__ = None


class ColumnSupport(NamedTuple):
    b: int
    x: int
    y: int
    z: int
    t: int


def _require_valid(d: DifferenceArray, kind: Kind):
    if d.kind is not kind:
        raise PreconditionError(f"expected a {kind.value.upper()}, got {d.kind.value.upper()}")
    report = validate(d)
    if not report.ok:
        raise PreconditionError("invalid difference array: " + "; ".join(report.violations))


def _construction_grid(d: DifferenceArray, keep: Sequence[int]) -> BlockGrid:
    cells = [
        tuple(RowBlock(v) for v in keep),
        tuple(Circulant(0) for _ in keep),
        tuple(Circulant(int(d.entries[v, 1])) for v in keep),
        tuple(Circulant(int(d.entries[v, 2])) for v in keep),
    ]
    return BlockGrid(d.a, tuple(cells))


def build_h(d: DifferenceArray) -> ParityCheckMatrix:
    """Construction 1: the ``4a x a^2`` regular matrix of a DM(3;a)."""
    _require_valid(d, Kind.DM)
    a = d.a
    v, q = np.divmod(np.arange(a * a), a)
    supports = np.stack(
        [
            v,
            a + q,
            2 * a + (q + d.entries[v, 1]) % a,
            3 * a + (q + d.entries[v, 2]) % a,
        ],
        axis=1,
    )
    sections = (range(0, a), range(a, 2 * a), range(2 * a, 3 * a), range(3 * a, 4 * a))
    return ParityCheckMatrix.from_col_supports(
        4 * a,
        supports,
        sections=sections,
        blocks=_construction_grid(d, range(a)),
        origin=Origin(a, "dm", d.alpha),
    )


def build_h_bar(d: DifferenceArray, r0: int | None = None) -> ParityCheckMatrix:
    """Construction 2: delete block column ``r0`` and the empty row ``r0``.

    Rows are renumbered contiguously, so the result is ``(4a-1) x (a^2-a)``.
    The block grid keeps the ``RowBlock`` markers of the surviving columns;
    the R band itself is ``a - 1`` rows tall.
    """
    _require_valid(d, Kind.DCA)
    r0 = find_r0(d, override=r0)
    a = d.a
    keep = [v for v in range(a) if v != r0]
    supports = []
    for v in keep:
        x = v if v < r0 else v - 1
        for q in range(a):
            supports.append(
                (
                    x,
                    a - 1 + q,
                    2 * a - 1 + (q + int(d.entries[v, 1])) % a,
                    3 * a - 1 + (q + int(d.entries[v, 2])) % a,
                )
            )
    sections = (
        range(0, a - 1),
        range(a - 1, 2 * a - 1),
        range(2 * a - 1, 3 * a - 1),
        range(3 * a - 1, 4 * a - 1),
    )
    return ParityCheckMatrix.from_col_supports(
        4 * a - 1,
        supports,
        sections=sections,
        blocks=_construction_grid(d, keep),
        origin=Origin(a, "dca", None, r0),
    )


def column_support(h: ParityCheckMatrix, b: int) -> ColumnSupport:
    """The four rows of column ``b``, one from each band."""
    if not 0 <= b < h.n_cols:
        raise PreconditionError(f"column {b} outside [0, {h.n_cols - 1}]")
    if h.sections is None:
        raise PreconditionError("matrix has no band sections")
    rows = h.rows_of(b).tolist()
    tagged = []
    for sec in h.sections:
        hits = [r for r in rows if r in sec]
        if len(hits) != 1:
            raise PreconditionError(f"column {b} has {len(hits)} ones in band {sec}")
        tagged.append(hits[0])
    return ColumnSupport(b, *tagged)


def _inverse(value: int, a: int, what: str) -> int:
    if math.gcd(value, a) != 1:
        raise PreconditionError(f"{what}={value % a} has no inverse mod {a}")
    return pow(value, -1, a)


def qc_grid(a: int, alpha: int) -> BlockGrid:
    """Exponent grid of the quasi-cyclic form: bands I, P^j, P^(j/2), P^(j/(alpha+1))."""
    inv2 = _inverse(2, a, "2")
    inv_a1 = _inverse(alpha + 1, a, "alpha+1")
    cells = [
        tuple(Circulant(0) for _ in range(a)),
        tuple(Circulant(j) for j in range(a)),
        tuple(Circulant(j * inv2 % a) for j in range(a)),
        tuple(Circulant(j * inv_a1 % a) for j in range(a)),
    ]
    return BlockGrid(a, tuple(cells))


def from_block_grid(grid: BlockGrid, **meta) -> ParityCheckMatrix:
    """Expand a grid of circulant / row blocks into a sparse matrix."""
    z = grid.z
    k_bands, l_cols = grid.shape
    supports: list[list[int]] = [[] for _ in range(l_cols * z)]
    for i, band in enumerate(grid.cells):
        for j, cell in enumerate(band):
            if cell is None:
                continue
            for q in range(z):
                if isinstance(cell, Circulant):
                    row = (q + cell.shift) % z
                else:
                    row = cell.v
                supports[j * z + q].append(i * z + row)
    meta.setdefault("blocks", grid)
    meta.setdefault(
        "sections", tuple(range(i * z, (i + 1) * z) for i in range(k_bands)) if k_bands == 4 else None
    )
    return ParityCheckMatrix.from_col_supports(k_bands * z, supports, **meta)


def qc_permutations(a: int, alpha: int) -> tuple[np.ndarray, np.ndarray]:
    """Row map ``g`` and column map ``f`` taking Construction 1 to the QC form."""
    inv2 = _inverse(2, a, "2")
    inv_a1 = _inverse(alpha + 1, a, "alpha+1")
    p, q = np.divmod(np.arange(a * a), a)
    col_map = ((q - p) % a) * a + p
    r = np.arange(4 * a)
    row_map = r.copy()
    band2 = (r >= 2 * a) & (r < 3 * a)
    band3 = r >= 3 * a
    row_map[band2] = ((r[band2] - 2 * a) * inv2) % a + 2 * a
    row_map[band3] = ((r[band3] - 3 * a) * inv_a1) % a + 3 * a
    return row_map, col_map


def qc_transform(h: ParityCheckMatrix, alpha: int) -> ParityCheckMatrix:
    """Permute rows and columns of a Construction-1 matrix into quasi-cyclic form."""
    o = h.origin
    if o.kind != "dm" or o.a is None or o.a % 2 == 0:
        raise PreconditionError("qc_transform needs a Construction-1 matrix with odd a")
    a = o.a
    if o.alpha is None or o.alpha != alpha % a:
        raise PreconditionError(
            f"matrix was not built from the alpha*j family with alpha={alpha}"
        )
    row_map, col_map = qc_permutations(a, alpha)
    grid = qc_grid(a, alpha)
    sections = tuple(range(i * a, (i + 1) * a) for i in range(4))
    return h.permuted(
        row_map, col_map, sections=sections, blocks=grid, origin=Origin(a, "qc", alpha % a)
    )


def build_h_star(a: int, alpha: int) -> ParityCheckMatrix:
    """Quasi-cyclic form constructed directly from its exponent grid."""
    if a < 3 or a % 2 == 0:
        raise PreconditionError(f"a must be odd and >= 3, got a={a}")
    # rejects generators that do not give a difference matrix
    build_dm(a, alpha)
    return from_block_grid(qc_grid(a, alpha), origin=Origin(a, "qc", alpha % a))


def construct(a: int, kind: Kind | str, alpha: int | None = None, r0: int | None = None):
    """Build Construction 1 or 2 from the built-in array families."""
    kind = Kind(kind)
    if kind is Kind.DM:
        if a % 2 == 0:
            raise PreconditionError("a must be odd for kind=dm")
        if alpha is None:
            alpha = select_alpha(a)
        return build_h(build_dm(a, alpha))
    if a % 2:
        raise PreconditionError("a must be even for kind=dca")
    return build_h_bar(build_dca(a), r0)
