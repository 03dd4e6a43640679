import itertools
from collections import deque
from fractions import Fraction

import numpy as np
import pytest

from dmldpc import analysis, gf2
from dmldpc.analysis import (
    check_alpha_conditions,
    check_rc,
    girth,
    is_stopping_set,
    min_distance_bruteforce,
    profile,
    stopping_distance,
    witness_weight8,
    witness_weight10,
)
from dmldpc.arrays import build_dca, build_dm
from dmldpc.errors import DimensionCapExceeded, PreconditionError, SearchBudgetExceeded
from dmldpc.pcm import ParityCheckMatrix, build_h, build_h_bar, build_h_star, construct

from golden import H_BAR_12

TABLE_ODD = {
    13: (169, 120, "0.71"), 15: (225, 168, "0.75"), 17: (289, 224, "0.78"),
    19: (361, 288, "0.80"), 21: (441, 360, "0.82"), 23: (529, 440, "0.83"),
    25: (625, 528, "0.84"), 27: (729, 624, "0.86"), 29: (841, 728, "0.87"),
    39: (1521, 1368, "0.90"),
}
TABLE_EVEN = {
    # 132/182 = 0.7253; the published two-digit rate for a=14 reads 0.72
    12: (132, 90, "0.68"), 14: (182, 132, "0.73"), 16: (240, 182, "0.76"),
    18: (306, 240, "0.78"), 20: (380, 306, "0.81"), 22: (462, 380, "0.82"),
    24: (552, 462, "0.84"), 26: (650, 552, "0.85"), 28: (756, 650, "0.86"),
    30: (870, 756, "0.87"),
}


def random_pcm(seed, rows=None, cols=None, density=0.3):
    rng = np.random.default_rng(seed)
    rows = rows or int(rng.integers(3, 9))
    cols = cols or int(rng.integers(4, 13))
    dense = (rng.random((rows, cols)) < density).astype(np.uint8)
    return ParityCheckMatrix.from_dense(dense), dense


def girth_oracle(dense):
    """Shortest cycle: for each edge, shortest path between its ends avoiding it."""
    rows, cols = dense.shape
    adj = {("v", b): set() for b in range(cols)} | {("c", r): set() for r in range(rows)}
    for r, b in zip(*np.nonzero(dense)):
        adj[("v", b)].add(("c", r))
        adj[("c", r)].add(("v", b))
    best = None
    for r, b in zip(*np.nonzero(dense)):
        s, t = ("v", b), ("c", r)
        dist = {s: 0}
        q = deque([s])
        while q:
            u = q.popleft()
            for w in adj[u]:
                if {u, w} == {s, t} or w in dist:
                    continue
                dist[w] = dist[u] + 1
                q.append(w)
        if t in dist and (best is None or dist[t] + 1 < best):
            best = dist[t] + 1
    return best


def stopping_oracle(dense, max_size):
    rows, cols = dense.shape
    for size in range(1, max_size + 1):
        for subset in itertools.combinations(range(cols), size):
            counts = dense[:, subset].sum(axis=1)
            if not np.any(counts == 1):
                return size
    return None


def min_distance_oracle(dense):
    basis = gf2.nullspace_basis(dense).to_dense()
    best = None
    for coeffs in itertools.product([0, 1], repeat=basis.shape[0]):
        if not any(coeffs):
            continue
        w = int((np.array(coeffs) @ basis % 2).sum())
        best = w if best is None else min(best, w)
    return best


# ---- RC constraint -------------------------------------------------------


@pytest.mark.parametrize("seed", range(15))
def test_check_rc_matches_gram_oracle(seed):
    h, dense = random_pcm(seed, density=0.5)
    d = dense.astype(int)
    col_gram = d.T @ d
    row_gram = d @ d.T
    expected = {("cols", i, j, int(col_gram[i, j])) for i in range(d.shape[1]) for j in range(i + 1, d.shape[1]) if col_gram[i, j] > 1}
    expected |= {("rows", i, j, int(row_gram[i, j])) for i in range(d.shape[0]) for j in range(i + 1, d.shape[0]) if row_gram[i, j] > 1}
    assert {tuple(v) for v in check_rc(h)} == expected


@pytest.mark.parametrize("a", [3, 5, 7, 9, 11, 13])
def test_construction1_satisfies_rc(a):
    assert check_rc(construct(a, "dm")) == []


@pytest.mark.parametrize("a", [4, 6, 8, 10, 12])
def test_construction2_satisfies_rc(a):
    assert check_rc(construct(a, "dca")) == []


def test_rc_detects_four_cycle():
    h = ParityCheckMatrix.from_dense(np.array([[1, 1, 0], [1, 1, 1]]))
    assert check_rc(h)[0] == ("cols", 0, 1, 2)


# ---- girth ---------------------------------------------------------------


@pytest.mark.parametrize("seed", range(30))
def test_girth_matches_edge_removal_oracle(seed):
    h, dense = random_pcm(seed, density=0.35)
    expected = girth_oracle(dense)
    got = girth(h, cap=20)
    assert got == expected


def test_girth_examples():
    assert girth(ParityCheckMatrix.from_dense(H_BAR_12)) == 6
    assert girth(construct(7, "dm")) == 6
    assert girth(ParityCheckMatrix.from_dense(np.eye(3, dtype=np.uint8))) is None
    # a single 8-cycle, reported only when the cap allows it
    ring = np.array([[1, 1, 0, 0], [0, 1, 1, 0], [0, 0, 1, 1], [1, 0, 0, 1]], dtype=np.uint8)
    assert girth(ParityCheckMatrix.from_dense(ring)) == 8
    assert girth(ParityCheckMatrix.from_dense(ring), cap=6) is None
    with pytest.raises(PreconditionError):
        girth(ParityCheckMatrix.from_dense(ring), cap=5)


# ---- profile against the published tables ---------------------------------


@pytest.mark.parametrize("a", sorted(TABLE_ODD))
def test_profile_construction1_table(a):
    m, dim, rate = TABLE_ODD[a]
    p = profile(construct(a, "dm"))
    assert (p.m, p.dim, p.rate_2dp) == (m, dim, rate)
    assert p.rank == 4 * a - 3
    assert p.x == 4 * a and p.col_weight == 4 and p.row_weights == {a: 4 * a}
    assert p.rc_ok and p.girth == 6


@pytest.mark.parametrize("a", sorted(TABLE_EVEN))
def test_profile_construction2_table(a):
    m, dim, rate = TABLE_EVEN[a]
    p = profile(construct(a, "dca"))
    assert (p.m, p.dim, p.rate_2dp) == (m, dim, rate)
    assert p.rank == 4 * a - 6
    assert p.x == 4 * a - 1 and p.col_weight == 4
    assert p.rc_ok and p.girth == 6


def test_profile_rank_a44():
    p = profile(build_h_bar(build_dca(44), 22))
    assert (p.m, p.rank, p.dim) == (1892, 170, 1722)


def test_profile_rate_is_exact_and_rounds_half_up():
    p = profile(construct(13, "dm"))
    assert p.rate == Fraction(120, 169)
    assert analysis._rate_2dp(Fraction(1, 8)) == "0.13"
    assert analysis._rate_2dp(Fraction(3, 8)) == "0.38"


def test_profile_bounds_and_provenance():
    p13 = profile(construct(13, "dm"))
    assert (p13.min_dist_lb, p13.min_dist_ub) == (10, 10)
    assert p13.stopping_lb == 8
    p12 = profile(construct(12, "dca"))
    assert (p12.stopping_lb, p12.stopping_lb_source) == (5, "girth-6-bound")
    assert (p12.min_dist_lb, p12.min_dist_ub) == (8, 8)
    assert "witness" in p12.min_dist_source
    p9 = profile(construct(9, "dm", 2))
    assert p9.min_dist_lb == 8 and p9.min_dist_ub >= 8


def test_profile_exact_min_distance_small():
    p = profile(build_h_bar(build_dca(4)), exact_min_dist=True)
    assert p.min_dist_lb == p.min_dist_ub == 8
    assert p.min_dist_source == "bruteforce"


def test_profile_stopping_search_tightens():
    p = profile(construct(5, "dm"), stopping_search=7)
    assert p.stopping_lb == 8
    p = profile(build_h_bar(build_dca(4)), stopping_search=10)
    assert p.stopping_lb == 8 and p.stopping_lb_source == "exhaustive:exact"


def test_profile_external_matrix():
    h = ParityCheckMatrix.from_dense(np.eye(3, dtype=np.uint8))
    p = profile(h)
    assert p.dim == 0 and p.min_dist_ub is None
    text = p.to_text()
    lines = text.splitlines()
    assert lines == sorted(lines)
    assert "rank=3" in lines


def test_profile_qc_form_same_parameters():
    base = profile(construct(11, "dm", 5))
    qc = profile(build_h_star(11, 5))
    assert (qc.rank, qc.dim, qc.girth, qc.min_dist_ub) == (base.rank, base.dim, base.girth, base.min_dist_ub)


# ---- stopping sets ---------------------------------------------------------


@pytest.mark.parametrize("seed", range(40))
def test_stopping_distance_matches_enumeration(seed):
    h, dense = random_pcm(seed, density=0.4)
    limit = min(6, dense.shape[1])
    expected = stopping_oracle(dense, limit)
    res = stopping_distance(h, limit)
    assert res.size == expected
    if res.found:
        assert is_stopping_set(h, res.columns)
        assert len(res.columns) == res.size


def test_stopping_distance_a4_all_subsets():
    h = build_h_bar(build_dca(4))
    assert stopping_oracle(H_BAR_12, 12) == 8
    res = stopping_distance(h, 12)
    assert res.size == 8 and is_stopping_set(h, res.columns)


@pytest.mark.parametrize("a", [5, 7, 8])
def test_no_small_stopping_sets(a):
    h = construct(a, "dm" if a % 2 else "dca")
    assert not stopping_distance(h, 7).found


def test_stopping_distance_budget():
    with pytest.raises(SearchBudgetExceeded):
        stopping_distance(construct(7, "dm"), 7, node_budget=100)


# ---- minimum distance ------------------------------------------------------


@pytest.mark.parametrize("seed", range(20))
def test_min_distance_matches_enumeration(seed):
    h, dense = random_pcm(seed, rows=int(np.random.default_rng(seed).integers(2, 6)), cols=14, density=0.3)
    e = gf2.systematic_encoder(dense)
    assert min_distance_bruteforce(e) == min_distance_oracle(dense)


def test_min_distance_wide_codewords():
    # more than 64 coordinates exercises multi-word popcounts
    rng = np.random.default_rng(5)
    dense = (rng.random((125, 140)) < 0.05).astype(np.uint8)
    e = gf2.systematic_encoder(dense)
    assert e.dim <= 26
    assert min_distance_bruteforce(e) == min_distance_oracle(dense)


def test_min_distance_examples():
    assert min_distance_bruteforce(gf2.systematic_encoder(H_BAR_12)) == 8
    assert min_distance_bruteforce(gf2.systematic_encoder(np.eye(3, dtype=np.uint8))) is None
    e = gf2.systematic_encoder(build_h(build_dm(13, 6)))
    with pytest.raises(DimensionCapExceeded):
        min_distance_bruteforce(e)


# ---- witnesses ------------------------------------------------------------


def _dense_sum(h, cols):
    return h.to_dense()[:, list(cols)].sum(axis=1) % 2


@pytest.mark.parametrize("a", range(8, 41, 2))
def test_weight8_witness(a):
    cols = witness_weight8(a)
    h = build_h_bar(build_dca(a), a // 2)
    assert len(set(cols)) == 8 and max(cols) < h.n_cols
    assert not _dense_sum(h, cols).any()


def test_weight8_witness_rejects_small():
    for a in (4, 6, 7):
        with pytest.raises(PreconditionError):
            witness_weight8(a)


def test_weight10_witness_a7():
    assert witness_weight10(7) == (2, 4, 9, 10, 14, 15, 36, 39, 42, 45)


@pytest.mark.parametrize("a", [a for a in range(5, 60, 2) if a % 3 and a % 5])
def test_weight10_witness(a):
    cols = witness_weight10(a)
    h = build_h(build_dm(a, (a - 1) // 2))
    assert len(set(cols)) == 10
    assert not _dense_sum(h, cols).any()


def test_weight10_witness_preconditions():
    for a in (9, 15, 25, 8, 3):
        with pytest.raises(PreconditionError):
            witness_weight10(a)


def test_alpha_conditions():
    assert check_alpha_conditions(7, 3)
    assert check_alpha_conditions(13, 6)
    assert not check_alpha_conditions(9, 4)
    assert not check_alpha_conditions(7, 2)  # 2*2-1 = 3, alpha-2 = 0
    with pytest.raises(PreconditionError):
        check_alpha_conditions(8, 3)
