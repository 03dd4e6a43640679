import numpy as np
import pytest

from dmldpc import gf2
from dmldpc.decoder import (
    ERASED,
    LLR_MAX,
    BPDecoder,
    decode_nms,
    decode_spa,
    llr_awgn,
    llr_bec,
    nms_check_update,
    spa_check_update,
)
from dmldpc.errors import PreconditionError
from dmldpc.pcm import build_h_bar, construct
from dmldpc.arrays import build_dca

from golden import H_BAR_12


def stopping_set_masks(dense):
    """Every non-empty column subset (as a bitmask) that is a stopping set."""
    rows, cols = dense.shape
    col_masks = [int("".join(map(str, dense[:, b][::-1])), 2) for b in range(cols)]
    out = []
    for s in range(1, 1 << cols):
        once, twice = 0, 0
        for b in range(cols):
            if s >> b & 1:
                twice |= once & col_masks[b]
                once |= col_masks[b]
        if once == twice:
            out.append(s)
    return out


def test_check_update_by_hand():
    assert nms_check_update([2.0, -3.0], factor=1.0).tolist() == [-3.0, 2.0]
    assert np.allclose(nms_check_update([2.0, -3.0, 5.0], factor=0.5), [-1.5, 1.0, -1.0])
    out = spa_check_update([2.0, -3.0])
    assert np.allclose(out, [-3.0, 2.0])
    # three inputs: tanh rule by hand
    vals = np.array([1.0, 2.0, -0.5])
    expect = [2 * np.arctanh(np.prod(np.tanh(np.delete(vals, i) / 2))) for i in range(3)]
    assert np.allclose(spa_check_update(vals), expect)


def test_check_update_zero_input_blocks_others():
    assert spa_check_update([0.0, 4.0, 5.0]).tolist()[1:] == [0.0, 0.0]
    assert nms_check_update([0.0, 4.0, 5.0]).tolist()[1:] == [0.0, 0.0]


@pytest.mark.parametrize("decode", [decode_spa, decode_nms])
def test_noiseless_succeeds_in_one_iteration(decode):
    h = construct(7, "dm")
    r = decode(h, np.full(h.n_cols, 4.0))
    assert r.success and r.iterations == 1 and not r.bits.any()
    assert r.final_syndrome_weight == 0


@pytest.mark.parametrize("decode", [decode_spa, decode_nms])
def test_all_zero_llr_fails(decode):
    h = construct(7, "dm")
    r = decode(h, np.zeros(h.n_cols), max_iter=20)
    assert not r.success and r.iterations == 20
    assert r.final_syndrome_weight > 0
    assert r.bits.all()


@pytest.mark.parametrize("decode", [decode_spa, decode_nms])
def test_every_single_flip_corrected_a7(decode):
    h = construct(7, "dm", 3)
    for b in range(h.n_cols):
        llr = np.full(h.n_cols, 2.0)
        llr[b] = -2.0
        r = decode(h, llr)
        assert r.success and not r.bits.any(), b


def test_success_matches_independent_syndrome():
    h = construct(13, "dm")
    rng = np.random.default_rng(11)
    y = 1 + 0.8 * rng.standard_normal((300, h.n_cols))
    for algo in ("spa", "nms"):
        res = BPDecoder(h, algo, max_iter=30).decode_batch(llr_awgn(y, 0.8))
        synd = gf2.syndrome(h, res.bits)
        assert np.array_equal(res.success, ~synd.any(axis=1))
        assert np.array_equal(res.syndrome_weight, synd.sum(axis=1))
        assert res.iterations.max() <= 30
        assert (~res.success).any() and res.success.any()


def test_batch_equals_single_decodes():
    h = construct(7, "dm")
    rng = np.random.default_rng(2)
    llr = llr_awgn(1 + 0.9 * rng.standard_normal((40, h.n_cols)), 0.9)
    dec = BPDecoder(h, "nms")
    batch = dec.decode_batch(llr)
    for i in range(40):
        single = dec.decode(llr[i])
        assert np.array_equal(single.bits, batch.bits[i])
        assert single.iterations == batch.iterations[i]


@pytest.mark.parametrize("algo", ["spa", "nms"])
def test_row_permutation_invariance(algo):
    h = construct(13, "dm")
    perm = np.random.default_rng(4).permutation(h.n_rows)
    hp = h.permuted(perm, np.arange(h.n_cols))
    rng = np.random.default_rng(5)
    llr = llr_awgn(1 + 0.75 * rng.standard_normal((200, h.n_cols)), 0.75)
    a = BPDecoder(h, algo).decode_batch(llr)
    b = BPDecoder(hp, algo).decode_batch(llr)
    assert np.array_equal(a.bits, b.bits)
    assert np.array_equal(a.iterations, b.iterations)
    assert np.array_equal(a.success, b.success)


def test_bec_small_erasure_sets_resolved_a8():
    h = construct(8, "dca")
    rng = np.random.default_rng(8)
    symbols = np.zeros((400, h.n_cols), dtype=int)
    for row in symbols:
        row[rng.choice(h.n_cols, size=rng.integers(1, 8), replace=False)] = ERASED
    for algo in ("spa", "nms"):
        res = BPDecoder(h, algo).decode_batch(llr_bec(symbols))
        assert res.success.all() and not res.bits.any()


def test_bec_failure_iff_stopping_set_a4():
    h = build_h_bar(build_dca(4))
    stops = stopping_set_masks(H_BAR_12)
    patterns = np.arange(1 << h.n_cols)
    erased = (patterns[:, None] >> np.arange(h.n_cols)) & 1
    expected_fail = np.array([any(s & p == s for s in stops) for p in patterns.tolist()])
    symbols = np.where(erased == 1, ERASED, 0)
    for algo in ("spa", "nms"):
        res = BPDecoder(h, algo).decode_batch(llr_bec(symbols))
        failed = res.bits.any(axis=1)
        assert np.array_equal(failed, expected_fail)
        # a stalled erasure set that covers a codeword converges to that wrong codeword
        assert np.array_equal(res.success, ~gf2.syndrome(h, res.bits).any(axis=1))
        assert not (~res.success & ~failed).any()


def test_llr_awgn():
    assert llr_awgn([1.0], 1.0).tolist() == [2.0]
    assert llr_awgn([0.0], 0.3).tolist() == [0.0]
    assert llr_awgn([-0.5], 0.5).tolist() == [-4.0]
    with pytest.raises(PreconditionError):
        llr_awgn([1.0], 0.0)


def test_llr_bec():
    assert llr_bec([0, 0]).tolist() == [LLR_MAX, LLR_MAX]
    assert llr_bec([ERASED, ERASED]).tolist() == [0.0, 0.0]
    assert llr_bec([0, 1, ERASED]).tolist() == [LLR_MAX, -LLR_MAX, 0.0]
    with pytest.raises(PreconditionError):
        llr_bec([2])


def test_decoder_argument_checks():
    h = construct(5, "dm")
    with pytest.raises(PreconditionError):
        BPDecoder(h, "bp")
    with pytest.raises(PreconditionError):
        BPDecoder(h, max_iter=0)
    with pytest.raises(PreconditionError):
        BPDecoder(h, "nms", factor=1.5)
    with pytest.raises(PreconditionError):
        decode_spa(h, np.zeros(3))
