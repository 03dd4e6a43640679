"""Monte-Carlo BER/FER measurement with the all-zero codeword.

Every frame draws its noise from its own generator seeded with
``(seed, point index, frame index)``, so tallies do not depend on how frames
are split across worker threads.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import gf2
from .decoder import ERASED, NMS_FACTOR, BPDecoder, llr_awgn, llr_bec
from .errors import LdpcError, PreconditionError
from .pcm import ParityCheckMatrix

CSV_HEADER = ["param", "frames", "bit_errors", "frame_errors", "ber", "fer"]


def ebno_to_sigma(ebno_db: float, rate: float) -> float:
    """Noise standard deviation for unit-energy BPSK at the given Eb/No (dB) and code rate."""
    if not 0 < rate <= 1:
        raise PreconditionError(f"rate must lie in (0, 1], got {rate}")
    return math.sqrt(1.0 / (2.0 * rate * 10.0 ** (ebno_db / 10.0)))


@dataclass(frozen=True)
class SimConfig:
    channel: str = "awgn"  # awgn | bec
    params: tuple[float, ...] = (3.0,)  # Eb/No in dB, or erasure probabilities
    decoder: str = "spa"  # spa | nms
    nms_factor: float = NMS_FACTOR
    max_iterations: int = 100
    target_frame_errors: int = 50
    max_frames: int = 10_000_000
    seed: int = 0
    workers: int = 1
    block_size: int = 256

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if self.channel not in ("awgn", "bec"):
            raise PreconditionError(f"channel must be awgn or bec, got {self.channel!r}")
        if self.decoder not in ("spa", "nms"):
            raise PreconditionError(f"decoder must be spa or nms, got {self.decoder!r}")
        if not self.params:
            raise PreconditionError("parameter grid is empty")
        if any(b <= a for a, b in zip(self.params, self.params[1:])):
            raise PreconditionError("parameter grid must be strictly increasing")
        if self.channel == "bec" and not all(0 <= p <= 1 for p in self.params):
            raise PreconditionError("erasure probabilities must lie in [0, 1]")
        if self.target_frame_errors < 1:
            raise PreconditionError("target_frame_errors must be >= 1")
        if self.max_frames < 1 or self.block_size < 1 or self.workers < 1:
            raise PreconditionError("max_frames, block_size and workers must be >= 1")
        if self.seed < 0:
            raise PreconditionError("seed must be non-negative")


@dataclass(frozen=True)
class SimPoint:
    param: float
    frames: int
    bit_errors: int
    frame_errors: int
    ber: float
    fer: float
    low_confidence: bool = False

    @classmethod
    def from_counts(cls, param, frames, bit_errors, frame_errors, m, low_confidence=False):
        return cls(
            float(param),
            int(frames),
            int(bit_errors),
            int(frame_errors),
            bit_errors / (frames * m) if frames else 0.0,
            frame_errors / frames if frames else 0.0,
            low_confidence,
        )


class _FrameRunner:
    """Decodes a contiguous range of frames for one grid point."""

    def __init__(self, h: ParityCheckMatrix, cfg: SimConfig, rate: float):
        self.h = h
        self.cfg = cfg
        self.rate = rate
        self.decoder = BPDecoder(h, cfg.decoder, cfg.max_iterations, cfg.nms_factor)

    def channel_llr(self, point: int, start: int, count: int) -> np.ndarray:
        m = self.h.n_cols
        param = self.cfg.params[point]
        rngs = [np.random.default_rng([self.cfg.seed, point, f]) for f in range(start, start + count)]
        if self.cfg.channel == "awgn":
            sigma = ebno_to_sigma(param, self.rate)
            noise = np.stack([g.standard_normal(m) for g in rngs])
            return llr_awgn(1.0 + sigma * noise, sigma)
        erased = np.stack([g.random(m) < param for g in rngs])
        return llr_bec(np.where(erased, ERASED, 0))

    def __call__(self, point: int, start: int, count: int):
        res = self.decoder.decode_batch(self.channel_llr(point, start, count))
        ok = res.success
        if ok.any() and gf2.syndrome(self.h, res.bits[ok]).any():
            raise LdpcError("decoder reported success for a word with non-zero syndrome")
        bit_errors = res.bits.sum(axis=1, dtype=np.int64)
        return bit_errors > 0, bit_errors


def _run_point(runner: _FrameRunner, pool, point: int, m: int) -> SimPoint:
    cfg = runner.cfg
    frames = bit_errors = frame_errors = 0
    window = max(1, 2 * cfg.workers)
    next_start = 0
    pending = []

    def submit():
        nonlocal next_start
        if next_start >= cfg.max_frames:
            return
        count = min(cfg.block_size, cfg.max_frames - next_start)
        pending.append(pool.submit(runner, point, next_start, count))
        next_start += count

    for _ in range(window):
        submit()
    while pending:
        fe, be = pending.pop(0).result()
        hits = np.flatnonzero(fe)
        need = cfg.target_frame_errors - frame_errors
        if hits.size >= need:
            cut = int(hits[need - 1]) + 1
            frames += cut
            bit_errors += int(be[:cut].sum())
            frame_errors += need
            for f in pending:
                f.cancel()
            return SimPoint.from_counts(cfg.params[point], frames, bit_errors, frame_errors, m)
        frames += fe.size
        bit_errors += int(be.sum())
        frame_errors += int(hits.size)
        submit()
    return SimPoint.from_counts(cfg.params[point], frames, bit_errors, frame_errors, m, low_confidence=True)


def simulate(h: ParityCheckMatrix, cfg: SimConfig, rate: float | None = None) -> list[SimPoint]:
    """Run every grid point until ``target_frame_errors`` or ``max_frames``.

    ``rate`` defaults to the exact code rate (m - rank)/m.
    """
    m = h.n_cols
    if rate is None:
        rate = (m - gf2.rank(h)) / m
    if cfg.channel == "awgn" and not 0 < rate <= 1:
        raise PreconditionError("code has rate 0; Eb/No is undefined")
    runner = _FrameRunner(h, cfg, rate)
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        return [_run_point(runner, pool, i, m) for i in range(len(cfg.params))]


def _fmt(v) -> str:
    return f"{v:.6g}" if isinstance(v, float) else str(v)


def format_csv(points: Sequence[SimPoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for p in points:
        w.writerow([_fmt(p.param), p.frames, p.bit_errors, p.frame_errors, _fmt(p.ber), _fmt(p.fer)])
    return buf.getvalue()


def emit_csv(points: Sequence[SimPoint], dest) -> None:
    """Write the points to a path or an open text stream."""
    text = format_csv(points)
    if hasattr(dest, "write"):
        dest.write(text)
    else:
        Path(dest).write_text(text)


def read_csv(src) -> list[SimPoint]:
    text = src.read() if hasattr(src, "read") else Path(src).read_text()
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != CSV_HEADER:
        raise PreconditionError(f"unexpected CSV header {header}")
    return [
        SimPoint(float(r[0]), int(r[1]), int(r[2]), int(r[3]), float(r[4]), float(r[5]))
        for r in reader
        if r
    ]
