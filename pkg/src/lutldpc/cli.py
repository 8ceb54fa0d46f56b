"""Command-line entry point: design, simulate, decode, pipeline-report.

Exit codes: 0 success, 1 usage error, 2 invalid data or configuration,
3 internal error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .density import DesignArtifact, DesignError, DesignSchedule, design
from .decoder import Decoder, DecoderConfig, DecoderConfigError, default_fixed_scale
from .ldpc import NAMED_CODES, AlistError, build_tanner_graph
from .prob import mutual_information
from .pipeline import VARIANT_WIDTHS, build_report, format_table
from .quantize import TreeShape
from .resources import SHIPPED_ARTIFACT, SHIPPED_CODE, data_path, load_code
from .sim import SimConfig, default_workers, dumps_csv, point_timings, run_fer, write_manifest

log = logging.getLogger("lutldpc")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _manifest(args, subcommand: str, config: dict, inputs: dict, outputs: list, **extra) -> dict:
    rec = {
        "tool": "lutldpc",
        "version": __version__,
        "subcommand": subcommand,
        "config": config,
        "inputs": {k: _sha256_file(v) for k, v in inputs.items() if v is not None},
        "outputs": {str(p): _sha256_file(p) for p in outputs},
    }
    rec.update(extra)
    return rec


def _manifest_path(out) -> Path:
    return Path(str(out) + ".manifest.json")


def _code_args(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--code", "--generated-code", dest="code", default=SHIPPED_CODE,
                   choices=sorted(NAMED_CODES), help="built-in code (default: %(default)s)")
    g.add_argument("--alist", help="parity-check matrix in alist format")
    p.add_argument("--code-seed", type=int, default=0, help="seed of the generated code")


def _load_code(args):
    return load_code(args.code, args.alist, args.code_seed)


def _code_inputs(args) -> dict:
    if args.alist:
        return {"alist": args.alist}
    if args.code == SHIPPED_CODE and args.code_seed == 0:
        return {"alist": data_path("ieee8023an_like.alist")}
    return {}


# -- design --------------------------------------------------------------------------

def cmd_design(args) -> int:
    if args.q_msg < 2:
        raise UsageError("--q-msg must be >= 2")
    if args.q_ch < 1 or args.iters < 1:
        raise UsageError("--q-ch and --iters must be >= 1")
    for s in [args.tree_shape, args.decision_shape]:
        if s is not None:
            TreeShape.parse(s)
    h = _load_code(args)
    profile = h.profile()
    schedule = DesignSchedule(iterations=args.iters, q_ch=args.q_ch, q_msg=args.q_msg,
                              snr_db=args.snr_db,
                              vn_shapes=[args.tree_shape] if args.tree_shape else None,
                              decision_shape=args.decision_shape, fine_bins=args.fine_bins)
    t0 = time.perf_counter()
    art = design(profile, schedule)
    elapsed = time.perf_counter() - t0
    digest = art.save(args.out)
    for it, mi in art.mi_trace:
        print(f"iteration {it}: I(x; message) = {mi:.10f}")
    print(f"channel quantizer MI: {mutual_information(art.channel.quantized_dist):.10f}")
    print(f"wrote {args.out} (sha256 {digest})")
    config = {"code": args.alist or args.code, "code_seed": args.code_seed,
              "snr_db": args.snr_db, "iterations": args.iters, "q_ch": args.q_ch,
              "q_msg": args.q_msg, "tree_shape": args.tree_shape,
              "decision_shape": args.decision_shape, "fine_bins": args.fine_bins,
              "profile": {"d_v": profile.d_v, "d_c": profile.d_c, "rate": str(profile.rate)}}
    write_manifest(_manifest_path(args.out),
                   _manifest(args, "design", config, _code_inputs(args), [args.out],
                             artifact_sha256=digest, wall_time=elapsed))
    return EXIT_OK


# -- decoder config shared by simulate / decode ------------------------------------------

def _decoder_config(args, h) -> tuple[DecoderConfig, str | None]:
    art_path = None
    if args.decoder == "float":
        return DecoderConfig("float_ms", args.iters), None
    if args.decoder == "fixed":
        q_ch = args.q_ch if args.q_ch is not None else VARIANT_WIDTHS["adder_ms"][1]
        q_msg = args.q_msg if args.q_msg is not None else VARIANT_WIDTHS["adder_ms"][0]
        if q_msg < 2 or q_ch < 1:
            raise UsageError("fixed decoder needs --q-msg >= 2 and --q-ch >= 1")
        scale = args.fixed_scale
        if scale is None:
            scale = default_fixed_scale(args.design_snr_db, h.rate, q_ch)
        return DecoderConfig("fixed_ms", args.iters, q_ch, q_msg, fixed_scale=scale), None
    art_path = args.artifact
    if art_path is None:
        if args.alist or args.code != SHIPPED_CODE or args.code_seed != 0:
            raise UsageError("--artifact is required for the lut decoder on this code")
        art_path = data_path(SHIPPED_ARTIFACT)
    art = DesignArtifact.load(art_path)
    for flag, have in (("q_ch", art.q_ch), ("q_msg", art.q_msg)):
        want = getattr(args, flag)
        if want is not None and want != have:
            raise DecoderConfigError(f"--{flag.replace('_', '-')} {want} does not match the "
                                     f"artifact ({have})")
    if args.iters_given and args.iters != art.iterations:
        raise DecoderConfigError(f"--iters {args.iters} does not match the artifact "
                                 f"({art.iterations} iterations)")
    return DecoderConfig.lut(art), str(art_path)


def _decoder_args(p):
    p.add_argument("--decoder", choices=["float", "fixed", "lut"], default="lut")
    p.add_argument("--artifact", help="design artifact (lut decoder)")
    p.add_argument("--iters", type=int, default=None,
                   help="decoding iterations (default 5; lut: from the artifact)")
    p.add_argument("--q-ch", type=int, default=None, help="channel bits (fixed default 5)")
    p.add_argument("--q-msg", type=int, default=None, help="message bits (fixed default 5)")
    p.add_argument("--fixed-scale", type=float, default=None,
                   help="LLR units per LSB (fixed; default: best channel MI at --design-snr-db)")
    p.add_argument("--design-snr-db", type=float, default=4.5,
                   help="SNR used to pick the default fixed-point scale")
    p.add_argument("--backend", choices=["cython", "python"], default=None,
                   help="kernel implementation (default: compiled if available)")


def _resolve_iters(args):
    args.iters_given = args.iters is not None
    if args.iters is None:
        args.iters = 5
    if args.iters < 1:
        raise UsageError("--iters must be >= 1")


# -- simulate ------------------------------------------------------------------------

def _parse_snr_list(text: str) -> list[float]:
    try:
        vals = [float(s) for s in text.replace(" ", "").split(",") if s]
    except ValueError:
        raise UsageError(f"bad --snr-list {text!r}") from None
    if not vals or not all(np.isfinite(vals)):
        raise UsageError("--snr-list needs finite values")
    return vals


def cmd_simulate(args) -> int:
    _resolve_iters(args)
    snrs = _parse_snr_list(args.snr_list)
    if args.target_errors < 1 or args.max_frames < 1:
        raise UsageError("--target-errors and --max-frames must be >= 1")
    workers = default_workers() if args.workers is None else args.workers
    if workers < 1:
        raise UsageError("--workers must be >= 1")
    h = _load_code(args)
    cfg, art_path = _decoder_config(args, h)
    Decoder(cfg, build_tanner_graph(h))  # validates graph against the config
    sim = SimConfig(tuple(snrs), cfg, h, args.max_frames, args.target_errors, args.seed)

    def report(p):
        lo, hi = p.interval
        print(f"{p.ebn0_db:g} dB: {p.frame_errors}/{p.frames} frame errors, FER {p.fer:.4g} "
              f"[{lo:.3g}, {hi:.3g}], BER {p.ber:.3g}", file=sys.stderr)

    result = run_fer(sim, workers=workers, backend=args.backend, progress=report)
    Path(args.out).write_text(dumps_csv(result, args.extended))
    print(dumps_csv(result, True), end="")
    inputs = _code_inputs(args)
    if art_path:
        inputs["artifact"] = art_path
    write_manifest(_manifest_path(args.out),
                   _manifest(args, "simulate", sim.describe() | {"extended_csv": args.extended},
                             inputs, [args.out], seed=args.seed, workers=workers,
                             timings=point_timings(result)))
    return EXIT_OK


# -- decode --------------------------------------------------------------------------

def cmd_decode(args) -> int:
    _resolve_iters(args)
    h = _load_code(args)
    cfg, art_path = _decoder_config(args, h)
    graph = build_tanner_graph(h)
    dec = Decoder(cfg, graph, args.backend)
    text = Path(args.llr_file).read_text().split()
    if len(text) != h.n_cols:
        raise ValueError(f"{args.llr_file}: {len(text)} values for a code of length {h.n_cols}")
    if args.input == "llr":
        values = dec.channel_input(np.array([float(t) for t in text]))
    else:
        try:
            values = np.array([int(t) for t in text])
        except ValueError:
            raise ValueError("--input channel expects integers (labels or fixed-point values)") \
                from None
        if cfg.variant == "float_ms":
            values = values.astype(float)
    bits, diag = dec.decode_batch(values[None, :])
    bits = bits[0]
    Path(args.out).write_text("".join(f"{b}\n" for b in bits))
    print(f"syndrome {'satisfied' if diag.syndrome_ok[0] else 'NOT satisfied'}; "
          f"{int(bits.sum())} ones; {diag.saturations} saturations", file=sys.stderr)
    inputs = _code_inputs(args) | {"llr_file": args.llr_file}
    if art_path:
        inputs["artifact"] = art_path
    write_manifest(_manifest_path(args.out),
                   _manifest(args, "decode", {"decoder": cfg.describe(), "input": args.input},
                             inputs, [args.out], syndrome_ok=bool(diag.syndrome_ok[0]),
                             saturations=diag.saturations))
    return EXIT_OK


# -- pipeline-report -----------------------------------------------------------------

def cmd_pipeline_report(args) -> int:
    for name in ("n", "dv", "iters"):
        if getattr(args, name) <= 0:
            raise UsageError(f"--{name} must be positive")
    for name in ("q_msg", "q_ch", "freq_ghz"):
        v = getattr(args, name)
        if v is not None and not v > 0:
            raise UsageError(f"--{name.replace('_', '-')} must be positive")
    variants = ["lut", "adder_ms"] if args.variant == "both" else [args.variant]
    reports = [build_report(v, args.n, args.dv, args.iters, args.q_msg, args.q_ch, args.freq_ghz)
               for v in variants]
    print(format_table(reports))
    if args.json:
        Path(args.json).write_text(json.dumps([r.to_dict() for r in reports], indent=1) + "\n")
    return EXIT_OK


# -- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lutldpc", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    d = sub.add_parser("design", help="design LUT trees by discrete density evolution")
    _code_args(d)
    d.add_argument("--snr-db", type=float, default=4.5, help="design Eb/N0 (default 4.5)")
    d.add_argument("--iters", type=int, default=5)
    d.add_argument("--q-ch", type=int, default=4)
    d.add_argument("--q-msg", type=int, default=3)
    d.add_argument("--tree-shape", help="VN tree shape for iterations >= 2, e.g. "
                                        "'((((c c) (c c)) [[c]]) [[[L]]])'")
    d.add_argument("--decision-shape", help="decision tree shape")
    d.add_argument("--fine-bins", type=int, default=2000)
    d.add_argument("--out", default="design.json")
    d.set_defaults(func=cmd_design)

    s = sub.add_parser("simulate", help="Monte Carlo FER simulation")
    _code_args(s)
    _decoder_args(s)
    s.add_argument("--snr-list", default="4.5", help="comma-separated Eb/N0 points in dB")
    s.add_argument("--target-errors", type=int, default=100)
    s.add_argument("--max-frames", type=int, default=100_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=None,
                   help="worker processes (default $LUTLDPC_WORKERS or 1); results do not "
                        "depend on it")
    s.add_argument("--extended", action="store_true", help="write all columns to the CSV")
    s.add_argument("--out", default="fer.csv")
    s.set_defaults(func=cmd_simulate)

    c = sub.add_parser("decode", help="decode one frame")
    _code_args(c)
    _decoder_args(c)
    c.add_argument("--llr-file", required=True, help="one value per line")
    c.add_argument("--input", choices=["llr", "channel"], default="llr",
                   help="llr: real LLRs; channel: the decoder's own channel values "
                        "(quantizer labels or odd fixed-point integers)")
    c.add_argument("--out", default="bits.txt")
    c.set_defaults(func=cmd_decode)

    r = sub.add_parser("pipeline-report", help="register/latency/throughput/wire model")
    r.add_argument("--n", type=int, default=2048)
    r.add_argument("--dv", type=int, default=6)
    r.add_argument("--iters", type=int, default=5)
    r.add_argument("--q-msg", type=int, default=None, help="default per variant (lut 3, adder 5)")
    r.add_argument("--q-ch", type=int, default=None, help="default per variant (lut 4, adder 5)")
    r.add_argument("--freq-ghz", type=float, default=None,
                   help="clock frequency (default per variant: lut 0.813, adder 0.495)")
    r.add_argument("--variant", choices=["lut", "adder_ms", "both"], default="both")
    r.add_argument("--json", help="also write the machine-readable report here")
    r.set_defaults(func=cmd_pipeline_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"lutldpc {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, AlistError, DesignError, DecoderConfigError, IndexError, OSError) as exc:
        print(f"lutldpc {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001
        log.exception("internal error")
        print(f"lutldpc {args.command}: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
