"""Belief-propagation decoding (sum-product and normalized min-sum), flooding schedule.

LLRs are natural-log ratios log P(0)/P(1), so positive means bit 0. Frames
are decoded in batches: every array carries a leading frame axis, and frames
leave the batch as soon as their syndrome is zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .pcm import ParityCheckMatrix

LLR_MAX = 30.0
TANH_CLIP = 1.0 - 1e-12
ERASED = -1
NMS_FACTOR = 0.75


@dataclass
class DecodeResult:
    bits: np.ndarray
    success: bool
    iterations: int
    final_syndrome_weight: int


@dataclass
class BatchResult:
    """Per-frame outcome of :meth:`BPDecoder.decode_batch`."""

    bits: np.ndarray  # (frames, m) uint8
    success: np.ndarray  # (frames,) bool
    iterations: np.ndarray  # (frames,) int
    syndrome_weight: np.ndarray  # (frames,) int

    def __len__(self):
        return len(self.success)

    def __getitem__(self, i) -> DecodeResult:
        return DecodeResult(
            self.bits[i], bool(self.success[i]), int(self.iterations[i]), int(self.syndrome_weight[i])
        )


def _exclusive(values: np.ndarray, op, identity: float) -> np.ndarray:
    """For each slot along the last axis, ``op`` over all other slots."""
    prefix = op.accumulate(values, axis=-1)
    suffix = op.accumulate(values[..., ::-1], axis=-1)[..., ::-1]
    out = np.full_like(values, identity)
    out[..., 1:] = prefix[..., :-1]
    out[..., :-1] = op(out[..., :-1], suffix[..., 1:])
    return out


def _spa_rows(v2c: np.ndarray, pad: np.ndarray) -> np.ndarray:
    t = np.where(pad, 1.0, np.tanh(0.5 * v2c))
    prod = np.clip(_exclusive(t, np.multiply, 1.0), -TANH_CLIP, TANH_CLIP)
    return 2.0 * np.arctanh(prod)


def _nms_rows(v2c: np.ndarray, pad: np.ndarray, factor: float) -> np.ndarray:
    mag = np.where(pad, np.inf, np.abs(v2c))
    sign = np.where(pad | (v2c >= 0), 1.0, -1.0)
    min_other = _exclusive(mag, np.minimum, np.inf)
    sign_other = _exclusive(sign, np.multiply, 1.0)
    return factor * sign_other * min_other


def spa_check_update(incoming) -> np.ndarray:
    """Messages leaving one check node, given the messages arriving on its edges."""
    incoming = np.asarray(incoming, dtype=float)
    return _spa_rows(incoming, np.zeros(incoming.shape, dtype=bool))


def nms_check_update(incoming, factor: float = NMS_FACTOR) -> np.ndarray:
    incoming = np.asarray(incoming, dtype=float)
    return _nms_rows(incoming, np.zeros(incoming.shape, dtype=bool), factor)


def _padded_table(ptr: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Edge-index table (groups x max degree) with padding marked by ``n_edges``."""
    deg = np.diff(ptr)
    width = max(int(deg.max(initial=0)), 1)
    slots = np.arange(width)
    pad = slots[None, :] >= deg[:, None]
    table = np.where(pad, ptr[-1], ptr[:-1, None] + slots[None, :])
    return table, pad


class BPDecoder:
    """Reusable flooding-schedule decoder bound to one parity-check matrix.

    Holds only read-only tables derived from ``h``; scratch arrays are
    allocated per call, so one instance may serve several threads.
    """

    def __init__(self, h: ParityCheckMatrix, algorithm: str = "spa", max_iter: int = 100, factor: float = NMS_FACTOR):
        if algorithm not in ("spa", "nms"):
            raise PreconditionError(f"unknown decoder {algorithm!r}; expected spa or nms")
        if max_iter < 1:
            raise PreconditionError("max_iter must be >= 1")
        if not 0 < factor <= 1:
            raise PreconditionError("NMS factor must lie in (0, 1]")
        self.h = h
        self.algorithm = algorithm
        self.max_iter = int(max_iter)
        self.factor = float(factor)
        # edges are numbered in check-major order
        self.edge_var = np.asarray(h.row_idx, dtype=np.int64)
        n_edges = self.edge_var.size
        self.chk_table, self.chk_pad = _padded_table(np.asarray(h.row_ptr, dtype=np.int64))
        order = np.argsort(self.edge_var, kind="stable")
        var_ptr = np.zeros(h.n_cols + 1, dtype=np.int64)
        np.cumsum(np.bincount(self.edge_var, minlength=h.n_cols), out=var_ptr[1:])
        slot_table, self.var_pad = _padded_table(var_ptr)
        ext_order = np.append(order, n_edges)
        self.var_table = ext_order[slot_table]
        self.n_edges = n_edges

    def _check_update(self, v2c: np.ndarray) -> np.ndarray:
        frames = v2c.shape[0]
        ext = np.concatenate([v2c, np.zeros((frames, 1))], axis=1)
        rows = ext[:, self.chk_table]
        if self.algorithm == "spa":
            msg = _spa_rows(rows, self.chk_pad)
        else:
            msg = _nms_rows(rows, self.chk_pad, self.factor)
        return msg[:, ~self.chk_pad]

    def _syndrome_weight(self, bits: np.ndarray) -> np.ndarray:
        ext = np.concatenate([bits[:, self.edge_var], np.zeros((bits.shape[0], 1), dtype=np.uint8)], axis=1)
        parity = ext[:, self.chk_table].sum(axis=-1, dtype=np.int64) & 1
        return parity.sum(axis=1)

    def decode_batch(self, llr) -> BatchResult:
        llr = np.atleast_2d(np.asarray(llr, dtype=float))
        if llr.shape[1] != self.h.n_cols:
            raise PreconditionError(f"llr length {llr.shape[1]} != {self.h.n_cols} columns")
        llr = np.clip(llr, -LLR_MAX, LLR_MAX)
        frames, m = llr.shape
        out_bits = np.zeros((frames, m), dtype=np.uint8)
        out_success = np.zeros(frames, dtype=bool)
        out_iter = np.full(frames, self.max_iter, dtype=np.int64)
        out_sw = np.zeros(frames, dtype=np.int64)

        active = np.arange(frames)
        chan = llr
        v2c = chan[:, self.edge_var]
        for it in range(1, self.max_iter + 1):
            c2v = self._check_update(v2c)
            c2v_ext = np.concatenate([c2v, np.zeros((c2v.shape[0], 1))], axis=1)
            total = chan + c2v_ext[:, self.var_table].sum(axis=-1)
            # exact zeros (unresolved erasures) decide to 1 so they never pass as correct
            bits = (total <= 0).astype(np.uint8)
            sw = self._syndrome_weight(bits)
            done = sw == 0
            if it == self.max_iter:
                done[:] = True
            if done.any():
                idx = active[done]
                out_bits[idx] = bits[done]
                out_success[idx] = sw[done] == 0
                out_iter[idx] = it
                out_sw[idx] = sw[done]
                keep = ~done
                active, chan, total, c2v = active[keep], chan[keep], total[keep], c2v[keep]
                if active.size == 0:
                    break
            v2c = np.clip(total[:, self.edge_var] - c2v, -LLR_MAX, LLR_MAX)
        return BatchResult(out_bits, out_success, out_iter, out_sw)

    def decode(self, llr) -> DecodeResult:
        llr = np.asarray(llr, dtype=float)
        if llr.ndim != 1:
            raise PreconditionError("decode expects a single LLR vector; use decode_batch")
        return self.decode_batch(llr[None, :])[0]


def decode_spa(h: ParityCheckMatrix, llr, max_iter: int = 100) -> DecodeResult:
    return BPDecoder(h, "spa", max_iter).decode(llr)


def decode_nms(h: ParityCheckMatrix, llr, max_iter: int = 100, factor: float = NMS_FACTOR) -> DecodeResult:
    return BPDecoder(h, "nms", max_iter, factor).decode(llr)


def llr_awgn(received, sigma: float) -> np.ndarray:
    """Channel LLRs for BPSK (bit 0 -> +1) over AWGN with noise std ``sigma``."""
    if not sigma > 0:
        raise PreconditionError("sigma must be > 0")
    return 2.0 * np.asarray(received, dtype=float) / sigma**2


def llr_bec(symbols) -> np.ndarray:
    """0 -> +LLR_MAX, 1 -> -LLR_MAX, ERASED (-1) -> 0."""
    s = np.asarray(symbols)
    if np.any((s != 0) & (s != 1) & (s != ERASED)):
        raise PreconditionError("BEC symbols must be 0, 1 or ERASED")
    out = np.where(s == 0, LLR_MAX, -LLR_MAX)
    return np.where(s == ERASED, 0.0, out)
