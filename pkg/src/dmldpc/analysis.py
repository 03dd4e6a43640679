"""Structural checks on parity-check matrices: RC-constraint, girth, rank and
rate, stopping distance, minimum distance, and explicit low-weight codewords."""

from __future__ import annotations

import math
from collections import Counter, deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from . import gf2
from .errors import DimensionCapExceeded, LdpcError, PreconditionError, SearchBudgetExceeded
from .pcm import ParityCheckMatrix, qc_permutations


class RcViolation(NamedTuple):
    kind: str  # "rows" or "cols"
    i: int
    j: int
    overlap: int


def _pair_overlaps(n_items: int, groups) -> list[tuple[int, int, int]]:
    keys = []
    for g in groups:
        g = np.asarray(g, dtype=np.int64)
        if g.size < 2:
            continue
        i, j = np.triu_indices(g.size, k=1)
        keys.append(g[i] * n_items + g[j])
    if not keys:
        return []
    uniq, counts = np.unique(np.concatenate(keys), return_counts=True)
    hits = counts > 1
    return [(int(k // n_items), int(k % n_items), int(c)) for k, c in zip(uniq[hits], counts[hits])]


def check_rc(h: ParityCheckMatrix) -> list[RcViolation]:
    """Pairs of rows or columns whose inner product exceeds one."""
    out = [RcViolation("cols", i, j, c) for i, j, c in _pair_overlaps(h.n_cols, h.row_supports())]
    out += [RcViolation("rows", i, j, c) for i, j, c in _pair_overlaps(h.n_rows, h.col_supports())]
    return out


def girth(h: ParityCheckMatrix, cap: int = 12) -> int | None:
    """Length of the shortest Tanner-graph cycle, or None if it exceeds ``cap``.

    Breadth-first search from every variable node; a non-tree edge between
    nodes at depths du and dw closes a walk of length du + dw + 1.
    """
    if cap < 4 or cap % 2:
        raise PreconditionError("cap must be even and >= 4")
    m = h.n_cols
    var_adj = [[m + r for r in rows] for rows in h.col_supports()]
    chk_adj = h.row_supports()

    def neighbours(node):
        return var_adj[node] if node < m else chk_adj[node - m]

    best = cap + 2
    for root in range(m):
        dist = {root: 0}
        parent = {root: -1}
        queue = deque([root])
        while queue:
            u = queue.popleft()
            du = dist[u]
            if 2 * du >= best:
                break
            for w in neighbours(u):
                if w == parent[u]:
                    continue
                dw = dist.get(w)
                if dw is None:
                    dist[w] = du + 1
                    parent[w] = u
                    queue.append(w)
                elif du + dw + 1 < best:
                    best = du + dw + 1
        if best == 4:
            break
    return best if best <= cap else None


@dataclass
class StoppingResult:
    """Outcome of :func:`stopping_distance`; ``size`` is None when nothing was found."""

    max_size: int
    size: int | None = None
    columns: tuple[int, ...] | None = None
    nodes: int = 0

    @property
    def found(self) -> bool:
        return self.size is not None


def is_stopping_set(h: ParityCheckMatrix, columns) -> bool:
    counts = Counter(r for b in columns for r in h.rows_of(int(b)).tolist())
    return len(set(columns)) > 0 and all(c != 1 for c in counts.values())


def stopping_distance(
    h: ParityCheckMatrix, max_size: int, node_budget: int = 50_000_000
) -> StoppingResult:
    """Smallest non-empty stopping set of size <= ``max_size``, by exhaustive search.

    Each branch fixes the smallest member of the set and then repeatedly
    picks a check touched exactly once; some other neighbour of that check
    must join the set. A branch is cut when the deficient checks outnumber
    what the remaining budget of columns could repair.
    """
    if max_size < 1:
        raise PreconditionError("max_size must be >= 1")
    m = h.n_cols
    col_rows = [tuple(r) for r in h.col_supports()]
    chk_cols = h.row_supports()
    reach = max((len(r) for r in col_rows), default=0)
    count = [0] * h.n_rows
    deficient: set[int] = set()
    chosen: list[int] = []
    in_set = [False] * m
    banned = [False] * m
    result = StoppingResult(max_size)
    limit = max_size
    nodes = 0

    def add(b):
        in_set[b] = True
        chosen.append(b)
        for r in col_rows[b]:
            count[r] += 1
            if count[r] == 1:
                deficient.add(r)
            elif count[r] == 2:
                deficient.discard(r)

    def remove(b):
        in_set[b] = False
        chosen.pop()
        for r in col_rows[b]:
            count[r] -= 1
            if count[r] == 1:
                deficient.add(r)
            elif count[r] == 0:
                deficient.discard(r)

    def search():
        nonlocal nodes, limit
        nodes += 1
        if nodes > node_budget:
            raise SearchBudgetExceeded(
                f"stopping-set search exceeded {node_budget} nodes; result inconclusive"
            )
        if not deficient:
            result.size = len(chosen)
            result.columns = tuple(sorted(chosen))
            limit = len(chosen) - 1
            return
        room = limit - len(chosen)
        if room <= 0 or len(deficient) > reach * room:
            return
        best_cands = None
        for r in deficient:
            cands = [b for b in chk_cols[r] if not in_set[b] and not banned[b]]
            if best_cands is None or len(cands) < len(best_cands):
                best_cands = cands
                if not cands:
                    return
        newly = []
        for b in best_cands:
            add(b)
            search()
            remove(b)
            if len(chosen) >= limit:
                break
            banned[b] = True
            newly.append(b)
        for b in newly:
            banned[b] = False

    for root in range(m):
        if limit < 1:
            break
        add(root)
        search()
        remove(root)
        banned[root] = True
    result.nodes = nodes
    return result


def popcount_rows(words: np.ndarray) -> np.ndarray:
    return np.bitwise_count(words).sum(axis=-1, dtype=np.int64)


def min_distance_bruteforce(e: gf2.LinearEncoder, dim_cap: int = 26) -> int | None:
    """Minimum Hamming weight over all non-zero codewords.

    The low half of the generator rows is expanded into a table of all
    partial sums; the high half is walked in Gray-code order so each step
    XORs a single generator row into the running offset. Returns None for
    the zero-dimensional code.
    """
    k = e.dim
    if k > dim_cap:
        raise DimensionCapExceeded(f"dimension {k} exceeds brute-force cap {dim_cap}")
    if k == 0:
        return None
    g = e.generator.words
    k_low = k // 2
    table = np.zeros((1, g.shape[1]), dtype=np.uint64)
    for i in range(k_low):
        table = np.concatenate([table, table ^ g[i]])
    table_weights = popcount_rows(table)
    best = int(table_weights[1:].min()) if table.shape[0] > 1 else e.m + 1
    offset = np.zeros(g.shape[1], dtype=np.uint64)
    for step in range(1, 1 << (k - k_low)):
        flip = (step & -step).bit_length() - 1
        offset ^= g[k_low + flip]
        w = int(popcount_rows(table ^ offset).min())
        if w < best:
            best = w
    return best


def check_alpha_conditions(a: int, alpha: int) -> bool:
    """gcd(a, alpha-2+i) = 1 for i = 0..3 and gcd(a, 2 alpha - 1) = 1."""
    if a % 2 == 0:
        raise PreconditionError("a must be odd")
    values = [alpha - 2 + i for i in range(4)] + [2 * alpha - 1]
    return all(math.gcd(a, v) == 1 for v in values)


def _dca_support(a: int, b: int) -> tuple[int, int, int, int]:
    """Rows of column ``b`` in the undeleted DCA family matrix."""
    v, q = divmod(b, a)
    third = 2 * v + 1 if v < a // 2 else 2 * (v - a // 2)
    return (v, a + q, 2 * a + (q + v) % a, 3 * a + (q + third) % a)


def witness_weight8(a: int) -> tuple[int, ...]:
    """Eight columns of the DCA-family near-regular matrix (r0 = a/2) summing to zero.

    Indices are in the numbering of the matrix after block column a/2 has
    been deleted.
    """
    if a % 2 or a < 8:
        raise PreconditionError("weight-8 witness needs even a >= 8")
    h2 = a // 2
    cols = [
        1,
        h2 - 2,
        3 * h2 - 2,
        2 * a - 1,
        a * (h2 - 2) + 1,
        a * (h2 - 2) + h2 + 2,
        a * (h2 - 1) + h2 + 2,
        a * (h2 - 1) + a - 1,
    ]
    listed = [
        (0, a + 1, 2 * a + 1, 3 * a + 2),
        (0, 3 * h2 - 2, 5 * h2 - 2, 7 * h2 - 1),
        (1, 3 * h2 - 2, 5 * h2 - 1, 7 * h2 + 1),
        (1, 2 * a - 1, 2 * a, 3 * a + 2),
        (h2 - 2, a + 1, 5 * h2 - 1, 4 * a - 2),
        (h2 - 2, 3 * h2 + 2, 2 * a, 7 * h2 - 1),
        (h2 - 1, 3 * h2 + 2, 2 * a + 1, 7 * h2 + 1),
        (h2 - 1, 2 * a - 1, 5 * h2 - 2, 4 * a - 2),
    ]
    for b, rows in zip(cols, listed):
        if _dca_support(a, b) != rows:
            raise LdpcError(f"witness column {b} does not have the expected support {rows}")
    r0 = h2
    out = []
    for b in cols:
        v, q = divmod(b, a)
        if v == r0:
            raise LdpcError("witness column falls in the deleted block")
        out.append((v if v < r0 else v - 1) * a + q)
    return tuple(sorted(out))


def witness_weight10(a: int) -> tuple[int, ...]:
    """Ten columns of the Construction-1 matrix with alpha = (a-1)/2 summing to zero."""
    if a % 2 == 0 or a <= 3:
        raise PreconditionError("weight-10 witness needs odd a > 3")
    if math.gcd(a, 3) != 1 or math.gcd(a, 5) != 1:
        raise PreconditionError(f"weight-10 witness needs gcd(a,3) = gcd(a,5) = 1, got a={a}")
    al = (a - 1) // 2
    inv = pow(al, -1, a)
    cols = [
        2,
        al + 1,
        a + 2,
        a + al,
        2 * a,
        2 * a + 1,
        inv * a + 1,
        inv * a + al + 1,
        (inv + 1) * a,
        (inv + 1) * a + al,
    ]
    # (band, offset) per listed support; offsets are reduced mod a
    listed = [
        ((0, 0), (1, 2), (2, 2), (3, 2)),
        ((0, 0), (1, al + 1), (2, al + 1), (3, al + 1)),
        ((0, 1), (1, 2), (2, 3), (3, al + 2)),
        ((0, 1), (1, al), (2, al + 1), (3, a - 1)),
        ((0, 2), (1, 0), (2, 2), (3, a - 1)),
        ((0, 2), (1, 1), (2, 3), (3, 0)),
        ((0, inv), (1, 1), (2, inv + 1), (3, 2)),
        ((0, inv), (1, al + 1), (2, inv + al + 1), (3, al + 2)),
        ((0, inv + 1), (1, 0), (2, inv + 1), (3, al + 1)),
        ((0, inv + 1), (1, al), (2, inv + al + 1), (3, 0)),
    ]
    for b, rows in zip(cols, listed):
        v, q = divmod(b, a)
        actual = (v, a + q, 2 * a + (q + v) % a, 3 * a + (q + al * v) % a)
        expected = tuple(band * a + off % a for band, off in rows)
        if actual != expected:
            raise LdpcError(f"witness column {b} does not have the expected support {expected}")
    return tuple(sorted(cols))


def _rate_2dp(rate: Fraction) -> str:
    hundredths = math.floor(rate * 100 + Fraction(1, 2))
    return f"{hundredths / 100:.2f}"


@dataclass
class CodeProfile:
    m: int
    x: int
    rank: int
    dim: int
    rate: Fraction
    col_weights: dict[int, int]
    row_weights: dict[int, int]
    rc_ok: bool
    girth: int | None
    girth_cap: int
    stopping_lb: int
    stopping_lb_source: str
    min_dist_lb: int | None
    min_dist_ub: int | None
    min_dist_source: str
    notes: list[str] = field(default_factory=list)

    @property
    def rate_2dp(self) -> str:
        return _rate_2dp(self.rate)

    @property
    def col_weight(self) -> int | None:
        return next(iter(self.col_weights)) if len(self.col_weights) == 1 else None

    def as_dict(self) -> dict[str, str]:
        def weights(d):
            return ",".join(f"{w}x{n}" for w, n in sorted(d.items()))

        out = {
            "m": str(self.m),
            "x": str(self.x),
            "rank": str(self.rank),
            "dim": str(self.dim),
            "rate": self.rate_2dp,
            "rate_exact": f"{self.rate.numerator}/{self.rate.denominator}",
            "col_weights": weights(self.col_weights),
            "row_weights": weights(self.row_weights),
            "rc_ok": str(self.rc_ok).lower(),
            "girth": str(self.girth) if self.girth is not None else f">{self.girth_cap}",
            "stopping_lb": str(self.stopping_lb),
            "stopping_lb_source": self.stopping_lb_source,
            "min_dist_lb": "" if self.min_dist_lb is None else str(self.min_dist_lb),
            "min_dist_ub": "" if self.min_dist_ub is None else str(self.min_dist_ub),
            "min_dist_source": self.min_dist_source,
        }
        if self.min_dist_lb is not None and self.min_dist_lb == self.min_dist_ub:
            out["min_dist"] = str(self.min_dist_lb)
        if self.notes:
            out["notes"] = ";".join(self.notes)
        return out

    def to_text(self) -> str:
        return "".join(f"{k}={v}\n" for k, v in sorted(self.as_dict().items()))

    def summary(self) -> str:
        d = self.as_dict()
        keys = ["m", "x", "rank", "dim", "rate", "girth", "rc_ok"]
        return " ".join(f"{k}={d[k]}" for k in keys)


def _witness_for(h: ParityCheckMatrix) -> tuple[int, ...] | None:
    o = h.origin
    try:
        if o.kind in ("dm", "qc") and o.a and o.alpha == (o.a - 1) // 2:
            cols = witness_weight10(o.a)
            if o.kind == "qc":
                cols = tuple(sorted(int(c) for c in qc_permutations(o.a, o.alpha)[1][list(cols)]))
        elif o.kind == "dca" and o.a and o.a >= 8 and o.r0 == o.a // 2:
            cols = witness_weight8(o.a)
        else:
            return None
    except PreconditionError:
        return None
    word = np.zeros(h.n_cols, dtype=np.uint8)
    word[list(cols)] = 1
    return cols if not gf2.syndrome(h, word).any() else None


def profile(
    h: ParityCheckMatrix,
    *,
    girth_cap: int = 12,
    stopping_search: int | None = None,
    exact_min_dist: bool = False,
    dim_cap: int = 26,
    node_budget: int = 50_000_000,
) -> CodeProfile:
    """Collect the code parameters of ``h``.

    For constructed matrices the rank is checked against 4a - 3 (odd a)
    or the bound 4a - 6 (even a); a violation raises ``LdpcError``.
    """
    m, x = h.n_cols, h.n_rows
    bm = gf2.BitMatrix.from_pcm(h)
    rk = gf2.rank(bm)
    dim = m - rk
    rate = Fraction(dim, m) if m else Fraction(0)
    violations = check_rc(h)
    rc_ok = not violations
    g = girth(h, girth_cap)
    notes: list[str] = []
    o = h.origin
    constructed = o.kind in ("dm", "dca", "qc") and o.a is not None

    if constructed and o.kind in ("dm", "qc"):
        if rk != 4 * o.a - 3:
            raise LdpcError(f"rank {rk} != 4a-3 = {4 * o.a - 3}")
        notes.append("rank=4a-3")
    elif constructed:
        if rk > 4 * o.a - 6:
            raise LdpcError(f"rank {rk} exceeds bound 4a-6 = {4 * o.a - 6}")
        notes.append("rank=4a-6" if rk == 4 * o.a - 6 else "rank<4a-6")

    col_w = h.col_weights
    min_cw = int(col_w.min()) if m else 0
    if constructed and o.a % 3:
        s_lb, s_src = 8, "family:3-does-not-divide-a"
    elif rc_ok and min_cw > 0:
        s_lb, s_src = min_cw + 1, "girth-6-bound"
    else:
        s_lb, s_src = 1, "trivial"

    if stopping_search is not None:
        res = stopping_distance(h, stopping_search, node_budget)
        if res.found:
            s_lb, s_src = res.size, "exhaustive:exact"
            notes.append("stopping_set=" + ",".join(map(str, res.columns)))
        elif stopping_search + 1 > s_lb:
            s_lb, s_src = stopping_search + 1, f"exhaustive:none<={stopping_search}"

    d_lb: int | None = s_lb
    d_src = s_src
    if constructed:
        if o.kind in ("dm", "qc") and o.alpha is not None and o.a > 3 and check_alpha_conditions(o.a, o.alpha):
            cand, src = 10, "family:alpha-conditions"
        else:
            cand, src = 8, "family:distance-8"
        if cand > d_lb:
            d_lb, d_src = cand, src
    d_ub: int | None = None
    if dim == 0:
        d_lb = d_ub = None
        d_src = "no-codewords"
    else:
        witness = _witness_for(h)
        if witness is not None:
            d_ub = len(witness)
            d_src += "+witness"
        else:
            enc_words = gf2.nullspace_basis(bm).words
            d_ub = int(popcount_rows(enc_words).min())
            d_src += "+basis"
        if exact_min_dist:
            exact = min_distance_bruteforce(gf2.systematic_encoder(bm), dim_cap)
            d_lb = d_ub = exact
            d_src = "bruteforce"
    return CodeProfile(
        m=m,
        x=x,
        rank=rk,
        dim=dim,
        rate=rate,
        col_weights=dict(Counter(col_w.tolist())),
        row_weights=dict(Counter(h.row_weights.tolist())),
        rc_ok=rc_ok,
        girth=g,
        girth_cap=girth_cap,
        stopping_lb=s_lb,
        stopping_lb_source=s_src,
        min_dist_lb=d_lb,
        min_dist_ub=d_ub,
        min_dist_source=d_src,
        notes=notes,
    )
