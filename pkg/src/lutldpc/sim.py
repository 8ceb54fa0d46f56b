"""Monte Carlo FER/BER estimation on the BI-AWGN channel.

Only the all-zero codeword is sent; the decoders are symmetric under
channel negation, so this is equivalent to sending random codewords.

Every frame draws its noise from its own counter-based stream keyed by
(seed, snr index, frame index), and frames are grouped into fixed blocks
that are merged in order.  A run therefore gives the same numbers for any
number of workers.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .channel import llr_channel
from .decoder import Decoder, DecoderConfig
from .ldpc import ParityCheckMatrix, build_tanner_graph

log = logging.getLogger(__name__)

WILSON_Z = 1.959963984540054  # two-sided 95 %
WORKERS_ENV = "LUTLDPC_WORKERS"

BASIC_COLUMNS = ("ebn0_db", "fer")
EXTENDED_COLUMNS = ("ebn0_db", "frames", "frame_errors", "bit_errors", "fer", "ber",
                    "fer_ci_low", "fer_ci_high")


def wilson_interval(errors: int, trials: int, z: float = WILSON_Z) -> tuple[float, float]:
    if trials <= 0:
        return 0.0, 1.0
    p = errors / trials
    den = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / den
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / den
    return max(0.0, center - half), min(1.0, center + half)


@dataclass(frozen=True)
class SimConfig:
    snr_points: tuple[float, ...]
    decoder: DecoderConfig
    code: ParityCheckMatrix
    max_frames: int = 100_000
    target_frame_errors: int = 100
    seed: int = 0
    block_frames: int = 64
    rate: Fraction | None = None   # defaults to the code's designed rate

    def __post_init__(self):
        object.__setattr__(self, "snr_points", tuple(float(s) for s in self.snr_points))
        if not all(math.isfinite(s) for s in self.snr_points):
            raise ValueError("SNR points must be finite")
        if self.target_frame_errors < 1:
            raise ValueError("target_frame_errors must be >= 1")
        if self.max_frames < 1 or self.block_frames < 1:
            raise ValueError("max_frames and block_frames must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def code_rate(self) -> Fraction:
        return self.rate if self.rate is not None else self.code.rate

    def describe(self) -> dict:
        return {"snr_points": list(self.snr_points), "max_frames": self.max_frames,
                "target_frame_errors": self.target_frame_errors, "seed": self.seed,
                "block_frames": self.block_frames, "rate": str(self.code_rate),
                "n": self.code.n_cols, "m": self.code.n_rows,
                "decoder": self.decoder.describe()}


@dataclass
class SimPoint:
    ebn0_db: float
    frames: int
    frame_errors: int
    bit_errors: int
    block_length: int = 1
    wall_time: float = field(default=0.0, compare=False)

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames if self.frames else 0.0

    @property
    def ber(self) -> float:
        return self.bit_errors / (self.frames * self.block_length) if self.frames else 0.0

    @property
    def interval(self) -> tuple[float, float]:
        return wilson_interval(self.frame_errors, self.frames)


@dataclass
class SimResult:
    points: list[SimPoint] = field(default_factory=list)

    def rows(self, extended: bool = False) -> list[dict]:
        out = []
        for p in self.points:
            row = {"ebn0_db": p.ebn0_db, "fer": p.fer}
            if extended:
                lo, hi = p.interval
                row = {"ebn0_db": p.ebn0_db, "frames": p.frames, "frame_errors": p.frame_errors,
                       "bit_errors": p.bit_errors, "fer": p.fer, "ber": p.ber,
                       "fer_ci_low": lo, "fer_ci_high": hi}
            out.append(row)
        return out


# -- per-frame streams ---------------------------------------------------------------

def frame_noise(seed: int, snr_index: int, frame: int, n: int) -> np.ndarray:
    gen = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, snr_index, frame])))
    return gen.standard_normal(n)


_worker: dict = {}


def _init_worker(cfg: SimConfig, backend):
    _worker["cfg"] = cfg
    _worker["decoder"] = Decoder(cfg.decoder, build_tanner_graph(cfg.code), backend)


def _run_block(snr_index: int, start: int, stop: int):
    """Per-frame (frame error, bit errors) for frames [start, stop)."""
    cfg: SimConfig = _worker["cfg"]
    dec: Decoder = _worker["decoder"]
    n = cfg.code.n_cols
    snr = cfg.snr_points[snr_index]
    noise = np.stack([frame_noise(cfg.seed, snr_index, f, n) for f in range(start, stop)])
    llr = llr_channel(snr, cfg.code_rate, 0, noise)
    bits, _ = dec.decode_batch(dec.channel_input(llr))
    errs = bits.sum(axis=1, dtype=np.int64)
    return (errs > 0), errs


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def run_fer(cfg: SimConfig, workers: int | None = None, backend: str | None = None,
            progress=None) -> SimResult:
    """Simulate every SNR point until ``target_frame_errors`` or ``max_frames``.

    A point stops at exactly the frame that produced the target-th error,
    so the counts do not depend on how blocks were scheduled.
    """
    workers = default_workers() if workers is None else max(1, int(workers))
    result = SimResult()
    pool = None
    if workers > 1:
        pool = ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(cfg, backend))
    else:
        _init_worker(cfg, backend)
    try:
        for si, snr in enumerate(cfg.snr_points):
            t0 = time.perf_counter()
            point = _run_point(cfg, si, pool, workers)
            point.wall_time = time.perf_counter() - t0
            result.points.append(point)
            log.info("Eb/N0 %.3f dB: %d/%d frame errors, FER %.3e (%.1f s)", snr,
                     point.frame_errors, point.frames, point.fer, point.wall_time)
            if progress:
                progress(point)
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)
    return result


def _run_point(cfg: SimConfig, si: int, pool, workers: int) -> SimPoint:
    b = cfg.block_frames
    starts = range(0, cfg.max_frames, b)
    frames = fe = be = 0

    def consume(fe_flags, errs, start):
        nonlocal frames, fe, be
        for k in range(len(fe_flags)):
            frames = start + k + 1
            if fe_flags[k]:
                fe += 1
                be += int(errs[k])
                if fe >= cfg.target_frame_errors:
                    return True
        return False

    if pool is None:
        for s in starts:
            flags, errs = _run_block(si, s, min(s + b, cfg.max_frames))
            if consume(flags, errs, s):
                break
        return SimPoint(cfg.snr_points[si], frames, fe, be, cfg.code.n_cols)

    pending = []
    it = iter(starts)
    window = 2 * workers
    for s in it:
        pending.append((s, pool.submit(_run_block, si, s, min(s + b, cfg.max_frames))))
        if len(pending) >= window:
            break
    while pending:
        s, fut = pending.pop(0)
        flags, errs = fut.result()
        if consume(flags, errs, s):
            for _, f in pending:
                f.cancel()
            break
        nxt = next(it, None)
        if nxt is not None:
            pending.append((nxt, pool.submit(_run_block, si, nxt, min(nxt + b, cfg.max_frames))))
    return SimPoint(cfg.snr_points[si], frames, fe, be, cfg.code.n_cols)


# -- CSV and manifest ---------------------------------------------------------------

def _fmt(v) -> str:
    return repr(float(v)) if isinstance(v, float) else str(v)


def dumps_csv(result: SimResult, extended: bool = False) -> str:
    cols = EXTENDED_COLUMNS if extended else BASIC_COLUMNS
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for row in result.rows(extended):
        w.writerow([_fmt(row[c]) for c in cols])
    return buf.getvalue()


def write_csv(result: SimResult, path, extended: bool = False) -> None:
    Path(path).write_text(dumps_csv(result, extended))


def read_csv(path) -> list[dict]:
    """Rows as dicts of floats/ints; works for both column sets."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    out = []
    for r in rows:
        out.append({k: (int(v) if k in ("frames", "frame_errors", "bit_errors") else float(v))
                    for k, v in r.items()})
    return out


def write_manifest(path, record: dict) -> None:
    Path(path).write_text(json.dumps(record, indent=1, sort_keys=True) + "\n")


def point_timings(result: SimResult) -> list[dict]:
    return [{"ebn0_db": p.ebn0_db, "wall_time": p.wall_time} for p in result.points]
