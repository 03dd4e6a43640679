"""Text formats: MacKay alist and the compact exponent grid for block matrices."""

from __future__ import annotations

import math
from pathlib import Path

from .arrays import build_dm
from .errors import FormatError, PreconditionError
from .pcm import (
    BlockGrid,
    Circulant,
    Origin,
    ParityCheckMatrix,
    RowBlock,
    build_h,
    build_h_star,
    from_block_grid,
)


def _join(values) -> str:
    return " ".join(str(int(v)) for v in values)


def dumps_alist(h: ParityCheckMatrix) -> str:
    """alist text: "m x", max weights, weight lists, then 1-based supports zero-padded."""
    cols = h.col_supports()
    rows = h.row_supports()
    col_w = [len(c) for c in cols]
    row_w = [len(r) for r in rows]
    max_c = max(col_w, default=0)
    max_r = max(row_w, default=0)
    lines = [f"{h.n_cols} {h.n_rows}", f"{max_c} {max_r}", _join(col_w), _join(row_w)]
    for c in cols:
        lines.append(_join([i + 1 for i in c] + [0] * (max_c - len(c))))
    for r in rows:
        lines.append(_join([i + 1 for i in r] + [0] * (max_r - len(r))))
    return "\n".join(lines) + "\n"


class _Lines:
    def __init__(self, text: str):
        self.lines = [ln for ln in text.splitlines()]
        self.pos = 0

    def next(self, what: str) -> tuple[int, list[str]]:
        while self.pos < len(self.lines):
            self.pos += 1
            toks = self.lines[self.pos - 1].split()
            if toks:
                return self.pos, toks
        raise FormatError(f"alist: {what}: unexpected end of file")

    def rest(self) -> list[tuple[int, list[str]]]:
        out = []
        while self.pos < len(self.lines):
            self.pos += 1
            toks = self.lines[self.pos - 1].split()
            if toks:
                out.append((self.pos, toks))
        return out


def _ints(lineno: int, toks: list[str], what: str) -> list[int]:
    try:
        return [int(t) for t in toks]
    except ValueError:
        raise FormatError(f"alist: line {lineno}: {what}: non-integer token") from None


def _support(lines: _Lines, label: str, weight: int, bound: int) -> list[int]:
    try:
        lineno, toks = lines.next(label)
    except FormatError:
        raise FormatError(f"alist: {label}: expected {weight} indices, found end of file") from None
    vals = _ints(lineno, toks, label)
    nz = [v for v in vals if v != 0]
    if any(v == 0 for v in vals[: len(nz)]):
        raise FormatError(f"alist: {label}: index 0 is only allowed as trailing padding (line {lineno})")
    if len(nz) != weight:
        raise FormatError(f"alist: {label}: expected {weight} indices, got {len(nz)} (line {lineno})")
    bad = [v for v in nz if not 1 <= v <= bound]
    if bad:
        raise FormatError(f"alist: {label}: index {bad[0]} outside 1..{bound} (line {lineno})")
    if len(set(nz)) != len(nz):
        raise FormatError(f"alist: {label}: repeated index (line {lineno})")
    return [v - 1 for v in nz]


def loads_alist(text: str) -> ParityCheckMatrix:
    lines = _Lines(text)
    lineno, toks = lines.next("header")
    dims = _ints(lineno, toks, "header")
    if len(dims) != 2 or min(dims) < 0:
        raise FormatError(f"alist: line {lineno}: header must be 'n_cols n_rows'")
    m, x = dims
    lineno, toks = lines.next("max weights")
    maxes = _ints(lineno, toks, "max weights")
    if len(maxes) != 2:
        raise FormatError(f"alist: line {lineno}: expected 'max_col_weight max_row_weight'")
    lineno, toks = lines.next("column weights")
    col_w = _ints(lineno, toks, "column weights")
    if len(col_w) != m:
        raise FormatError(f"alist: line {lineno}: expected {m} column weights, got {len(col_w)}")
    lineno, toks = lines.next("row weights")
    row_w = _ints(lineno, toks, "row weights")
    if len(row_w) != x:
        raise FormatError(f"alist: line {lineno}: expected {x} row weights, got {len(row_w)}")
    if max(col_w, default=0) != maxes[0] or max(row_w, default=0) != maxes[1]:
        raise FormatError("alist: max weights disagree with the weight lists")
    if sum(col_w) != sum(row_w):
        raise FormatError(f"alist: column weights sum to {sum(col_w)} but row weights to {sum(row_w)}")
    cols = [_support(lines, f"column {j + 1}", col_w[j], x) for j in range(m)]
    rows = [_support(lines, f"row {i + 1}", row_w[i], m) for i in range(x)]
    trailing = lines.rest()
    if trailing:
        raise FormatError(f"alist: line {trailing[0][0]}: unexpected trailing data")
    h = ParityCheckMatrix.from_col_supports(x, cols)
    for i, r in enumerate(rows):
        if sorted(r) != h.cols_of(i).tolist():
            raise FormatError(f"alist: row {i + 1}: row list disagrees with the column lists")
    return h


def write_alist(h: ParityCheckMatrix, path) -> None:
    Path(path).write_text(dumps_alist(h))


def read_alist(path) -> ParityCheckMatrix:
    return loads_alist(Path(path).read_text())


# ---- exponent grid ------------------------------------------------------


def _cell_token(cell) -> str:
    if cell is None:
        return "-"
    if isinstance(cell, RowBlock):
        return f"R:{cell.v}"
    return str(cell.shift)


def dumps_grid(h: ParityCheckMatrix) -> str:
    """Compact "a K L" block description; needs a matrix that kept its block grid."""
    grid = h.blocks
    if grid is None:
        raise PreconditionError("matrix has no block structure to export as an exponent grid")
    k, l = grid.shape
    if h.shape != (k * grid.z, l * grid.z):
        raise PreconditionError(
            "exponent grid needs a full block matrix; row-deleted matrices are only exportable as alist"
        )
    lines = [f"{grid.z} {k} {l}"]
    lines += [" ".join(_cell_token(c) for c in band) for band in grid.cells]
    return "\n".join(lines) + "\n"


def _parse_cell(tok: str, z: int, where: str):
    if tok == "-":
        return None
    try:
        if tok.startswith("R:"):
            v = int(tok[2:])
            cell = RowBlock(v)
        else:
            v = int(tok)
            cell = Circulant(v)
    except ValueError:
        raise FormatError(f"grid: {where}: bad entry {tok!r}") from None
    if not 0 <= v < z:
        raise FormatError(f"grid: {where}: value {v} outside 0..{z - 1}")
    return cell


def _infer_origin(grid: BlockGrid) -> Origin:
    """Recognise the two constructed layouts so analysis keeps its provenance."""
    z = grid.z
    k, l = grid.shape
    if (k, l) != (4, z) or z < 3 or z % 2 == 0:
        return Origin()
    try:
        if isinstance(grid.cells[0][0], RowBlock):
            alpha = grid.cells[3][1].shift
            if build_h(build_dm(z, alpha)).blocks == grid:
                return Origin(z, "dm", alpha)
        else:
            s = grid.cells[3][1].shift
            if math.gcd(s, z) == 1:
                alpha = (pow(s, -1, z) - 1) % z
                if build_h_star(z, alpha).blocks == grid:
                    return Origin(z, "qc", alpha)
    except (PreconditionError, AttributeError):
        pass
    return Origin()


def loads_grid(text: str) -> ParityCheckMatrix:
    rows = [(i + 1, ln.split()) for i, ln in enumerate(text.splitlines()) if ln.strip()]
    if not rows:
        raise FormatError("grid: empty file")
    lineno, head = rows[0]
    try:
        z, k, l = (int(t) for t in head)
    except ValueError:
        raise FormatError(f"grid: line {lineno}: header must be 'a K L'") from None
    if z < 1 or k < 1 or l < 1:
        raise FormatError(f"grid: line {lineno}: sizes must be positive")
    body = rows[1:]
    if len(body) != k:
        raise FormatError(f"grid: expected {k} block rows, got {len(body)}")
    cells = []
    for i, (lineno, toks) in enumerate(body):
        if len(toks) != l:
            raise FormatError(f"grid: line {lineno}: expected {l} entries, got {len(toks)}")
        cells.append(tuple(_parse_cell(t, z, f"line {lineno}") for t in toks))
    grid = BlockGrid(z, tuple(cells))
    return from_block_grid(grid, origin=_infer_origin(grid))


def grid_integer_count(text: str) -> int:
    """Integers stored in the body of a grid file (the header is not counted)."""
    body = text.splitlines()[1:]
    return sum(1 for ln in body for t in ln.split() if t != "-")


def write_grid(h: ParityCheckMatrix, path) -> None:
    Path(path).write_text(dumps_grid(h))


def read_grid(path) -> ParityCheckMatrix:
    return loads_grid(Path(path).read_text())


def read_matrix(path) -> ParityCheckMatrix:
    """Load an alist, or an exponent grid when the name ends in ``.grid``."""
    path = Path(path)
    if path.suffix == ".grid":
        return read_grid(path)
    return read_alist(path)
