"""Difference matrices DM(3;a) and difference covering arrays DCA(3;a).

Arrays are stored in standard form (second column equal to the row index)
as an ``a x 3`` grid of residues mod ``a``.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import FormatError, PreconditionError


class Kind(str, enum.Enum):
    DM = "dm"
    DCA = "dca"


@dataclass(frozen=True, eq=False)
class DifferenceArray:
    """An ``a x k`` grid over Z_a.

    ``entries[i, j]`` is D(i, j). ``alpha`` records the generator when the
    array came from the ``alpha * j`` family, otherwise it is None.
    """

    a: int
    entries: np.ndarray
    kind: Kind
    alpha: int | None = None

    def __post_init__(self):
        grid = np.array(self.entries, dtype=np.int64, copy=True)
        if grid.ndim != 2:
            raise PreconditionError("difference array must be two-dimensional")
        grid.setflags(write=False)
        object.__setattr__(self, "entries", grid)
        object.__setattr__(self, "kind", Kind(self.kind))

    @property
    def k(self) -> int:
        return self.entries.shape[1]

    @property
    def n(self) -> int | None:
        """The repeated difference a/2 of a DCA; None for a DM."""
        return self.a // 2 if self.kind is Kind.DCA else None

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(int(v) for v in self.entries[:, j])

    def __eq__(self, other):
        if not isinstance(other, DifferenceArray):
            return NotImplemented
        return (
            self.a == other.a
            and self.kind is other.kind
            and np.array_equal(self.entries, other.entries)
        )

    __hash__ = None


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def __iter__(self):
        return iter(self.violations)

    def __len__(self):
        return len(self.violations)


def build_dm(a: int, alpha: int) -> DifferenceArray:
    """DM(3;a) with columns ``0``, ``j`` and ``alpha * j mod a``."""
    if a < 3 or a % 2 == 0:
        raise PreconditionError(f"a must be odd and >= 3 for kind=dm, got a={a}")
    if math.gcd(alpha, a) != 1 or math.gcd(alpha - 1, a) != 1:
        raise PreconditionError(
            f"invalid generator alpha={alpha} for a={a}: "
            "need gcd(alpha, a) = gcd(alpha - 1, a) = 1"
        )
    j = np.arange(a)
    grid = np.stack([np.zeros(a, dtype=np.int64), j, (alpha * j) % a], axis=1)
    return DifferenceArray(a, grid, Kind.DM, alpha=alpha % a)


def select_alpha(a: int) -> int:
    """Generator for :func:`build_dm`.

    Returns ``(a - 1) / 2`` when neither 3 nor 5 divides ``a``; otherwise
    falls back to 2 and warns that the distance-10 guarantee is lost.
    """
    if a < 3 or a % 2 == 0:
        raise PreconditionError(f"a must be odd and >= 3, got a={a}")
    if math.gcd(a, 3) == 1 and math.gcd(a, 5) == 1:
        return (a - 1) // 2
    warnings.warn(
        f"a={a} is divisible by 3 or 5; using alpha=2, "
        "the minimum-distance-10 guarantee does not apply",
        stacklevel=2,
    )
    return 2


def build_dca(a: int) -> DifferenceArray:
    """DCA(3;a) with third column 1, 3, ..., a-1, 0, 2, ..., a-2."""
    if a < 4 or a % 2:
        raise PreconditionError(f"a must be even and >= 4 for kind=dca, got a={a}")
    half = a // 2
    j = np.arange(a)
    third = np.where(j < half, 2 * j + 1, 2 * (j - half))
    grid = np.stack([np.zeros(a, dtype=np.int64), j, third], axis=1)
    return DifferenceArray(a, grid, Kind.DCA)


def from_rows(a: int, rows: Iterable[Sequence[int]], kind: Kind | str) -> DifferenceArray:
    """Wrap an externally supplied grid. Nothing is checked; call :func:`validate`."""
    return DifferenceArray(a, np.array(list(rows), dtype=np.int64).reshape(a, -1), Kind(kind))


def _differences(d: DifferenceArray, j: int, jp: int) -> np.ndarray:
    return (d.entries[:, j] - d.entries[:, jp]) % d.a


def validate(d: DifferenceArray) -> ValidationReport:
    """List every violated clause; an empty report means the array is valid."""
    report = ValidationReport()
    bad = report.violations
    a, grid = d.a, d.entries
    if grid.shape != (a, 3):
        bad.append(f"shape {grid.shape} is not ({a}, 3)")
        return report
    if np.any(grid < 0) or np.any(grid >= a):
        bad.append(f"entries outside [0, {a - 1}]")
        return report
    if np.any(grid[:, 0] != 0):
        bad.append("column 0 is not all zeros")
    for j in (1, 2):
        if sorted(grid[:, j].tolist()) != list(range(a)):
            bad.append(f"column {j} is not a permutation of 0..{a - 1}")
    if np.any(grid[:, 1] != np.arange(a)):
        bad.append("not standard form: column 1 differs from the row index")

    if d.kind is Kind.DM:
        if a % 2 == 0:
            bad.append(f"kind=dm requires odd a, got a={a}")
        for j, jp in ((0, 1), (0, 2), (1, 2)):
            if sorted(_differences(d, j, jp).tolist()) != list(range(a)):
                bad.append(f"columns {j},{jp}: differences do not cover 0..{a - 1} exactly once")
    else:
        if a % 2:
            bad.append(f"kind=dca requires even a, got a={a}")
        n = a // 2
        diffs = _differences(d, 2, 1)
        if np.any(diffs == 0):
            bad.append("columns 1,2: zero difference present")
        if sorted(diffs.tolist()) != sorted(list(range(1, a)) + [n]):
            bad.append(f"columns 1,2: differences are not 1..{a - 1} with n={n} twice")
        rows = _r0_candidates(d)
        if len(rows) != 2:
            bad.append(
                f"difference n={n} appears with wrong multiplicity {len(rows)} "
                "between columns 2 and 1"
            )
    return report


def _r0_candidates(d: DifferenceArray) -> list[int]:
    return [int(r) for r in np.flatnonzero(_differences(d, 2, 1) == d.a // 2)]


def find_r0(d: DifferenceArray, override: int | None = None) -> int:
    """Row r0 with D(r0, 2) - D(r0, 1) = a/2 (mod a).

    Of the two candidate rows, row a/2 is preferred; if it is not a
    candidate (external arrays) the smaller candidate is used. ``override``
    selects a specific candidate.
    """
    if d.kind is not Kind.DCA:
        raise PreconditionError("find_r0 requires a DCA")
    rows = _r0_candidates(d)
    if len(rows) != 2:
        raise PreconditionError(
            f"DCA invariant broken: {len(rows)} rows with difference a/2, expected 2"
        )
    if override is not None:
        if override not in rows:
            raise PreconditionError(
                f"r0={override} does not satisfy D(r0,2)-D(r0,1) = a/2; candidates {rows}"
            )
        return override
    half = d.a // 2
    return half if half in rows else rows[0]


def dumps(d: DifferenceArray) -> str:
    lines = [f"{d.a} {d.k} {d.kind.value}"]
    lines += [" ".join(str(int(v)) for v in row) for row in d.entries]
    return "\n".join(lines) + "\n"


def loads(text: str) -> DifferenceArray:
    """Parse the plain-text array format: ``a k kind`` then ``a`` rows of ``k`` integers."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("difference array: empty file")
    head = lines[0].split()
    if len(head) != 3:
        raise FormatError("difference array: line 1: expected 'a k kind'")
    try:
        a, k = int(head[0]), int(head[1])
        kind = Kind(head[2].lower())
    except ValueError as exc:
        raise FormatError(f"difference array: line 1: {exc}") from None
    if len(lines) - 1 != a:
        raise FormatError(f"difference array: expected {a} rows, found {len(lines) - 1}")
    rows = []
    for lineno, ln in enumerate(lines[1:], start=2):
        try:
            row = [int(tok) for tok in ln.split()]
        except ValueError:
            raise FormatError(f"difference array: line {lineno}: non-integer entry") from None
        if len(row) != k:
            raise FormatError(f"difference array: line {lineno}: expected {k} entries")
        rows.append(row)
    return DifferenceArray(a, np.array(rows, dtype=np.int64).reshape(a, k), kind)
