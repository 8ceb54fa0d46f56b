"""Compare the compiled and pure-Python decoder kernels.

    python benchmarks/bench_kernels.py --frames 64 --repeat 3

Decodes the same noisy frames on the shipped N=2048 code with every
available backend, checks that the decisions agree bit for bit and prints
the time per frame.
"""
import argparse
import time

import numpy as np

from lutldpc.channel import llr_channel
from lutldpc.decoder import Decoder, DecoderConfig, default_fixed_scale
from lutldpc.kernels import available_backends
from lutldpc.ldpc import build_tanner_graph
from lutldpc.resources import shipped_artifact, shipped_code


def configs(h):
    art = shipped_artifact()
    scale = default_fixed_scale(4.5, h.rate, 4)
    return {"float_ms": DecoderConfig("float_ms", 5),
            "fixed_ms 4/4": DecoderConfig("fixed_ms", 5, 4, 4, fixed_scale=scale),
            "lut 4/3": DecoderConfig.lut(art)}


def bench(dec, ch, repeat):
    best = np.inf
    bits = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        bits, _ = dec.decode_batch(ch)
        best = min(best, time.perf_counter() - t0)
    return best, bits


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--frames", type=int, default=64)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--snr-db", type=float, default=4.5)
    args = ap.parse_args()

    h = shipped_code()
    graph = build_tanner_graph(h)
    gen = np.random.default_rng(0)
    llr = llr_channel(args.snr_db, h.rate, 0, gen.standard_normal((args.frames, h.n_cols)))
    backends = available_backends()
    print(f"N={h.n_cols}, {args.frames} frames, best of {args.repeat}; backends: {backends}")
    print(f"{'decoder':<14}" + "".join(f"{b + ' ms/frame':>20}" for b in backends) + "   speedup")
    for name, cfg in configs(h).items():
        times, outs = [], []
        for b in backends:
            dec = Decoder(cfg, graph, b)
            t, bits = bench(dec, dec.channel_input(llr), args.repeat)
            times.append(1e3 * t / args.frames)
            outs.append(bits)
        same = all(np.array_equal(outs[0], o) for o in outs[1:])
        speed = f"{max(times) / min(times):9.1f}x" if len(times) > 1 else ""
        print(f"{name:<14}" + "".join(f"{t:20.3f}" for t in times) + speed
              + ("" if same else "   OUTPUTS DIFFER"))


if __name__ == "__main__":
    main()
