"""Flooding min-sum decoders (float, fixed point) and the LUT decoder.

Every variant runs exactly ``iterations`` rounds of VN stage then CN stage,
followed by a decision stage; there is no early exit, so the decoders match
an unrolled pipeline cycle for cycle.  Iteration 1's VN stage sees only the
channel value.

Fixed-point values are carried as odd integers in half-LSB units: the
integer v stands for v/2 * fixed_scale, so the q-bit sign-magnitude
alphabet {±(k + 1/2)} becomes {±1, ±3, ..., ±(2^q - 1)} and has no zero.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import interval_prob, llr_moments
from .density import DesignArtifact
from ._kernels_py import _requant
from .kernels import CompiledTree, compile_tree, get_backend, label_cn_tables
from .ldpc import TannerGraph
from .prob import mi_from_masses
from .quantize import LutTree

VARIANTS = ("float_ms", "fixed_ms", "lut")


class DecoderConfigError(ValueError):
    pass


@dataclass(frozen=True)
class DecoderConfig:
    variant: str
    iterations: int = 5
    q_ch: int | None = None
    q_msg: int | None = None
    artifact: DesignArtifact | None = None
    fixed_scale: float | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise DecoderConfigError(f"unknown decoder variant '{self.variant}'")
        if self.iterations < 1:
            raise DecoderConfigError("iterations must be >= 1")
        if self.variant == "float_ms":
            return
        if self.q_ch is None or self.q_msg is None:
            raise DecoderConfigError(f"{self.variant} needs q_ch and q_msg")
        if self.q_msg < 2 or self.q_ch < 1:
            raise DecoderConfigError("need q_msg >= 2 and q_ch >= 1")
        if self.variant == "fixed_ms":
            if self.fixed_scale is None or not self.fixed_scale > 0:
                raise DecoderConfigError("fixed_ms needs a positive fixed_scale")
            if self.q_msg > 30 or self.q_ch > 30:
                raise DecoderConfigError("bit widths above 30 are not supported")
        else:
            a = self.artifact
            if a is None:
                raise DecoderConfigError("lut decoder needs a design artifact")
            if (a.iterations, a.q_ch, a.q_msg) != (self.iterations, self.q_ch, self.q_msg):
                raise DecoderConfigError(
                    f"artifact has I={a.iterations}, q_ch={a.q_ch}, q_msg={a.q_msg}; "
                    f"decoder asks for I={self.iterations}, q_ch={self.q_ch}, q_msg={self.q_msg}")

    @classmethod
    def lut(cls, artifact: DesignArtifact) -> "DecoderConfig":
        return cls("lut", artifact.iterations, artifact.q_ch, artifact.q_msg, artifact)

    @property
    def msg_max(self) -> int:
        """Largest odd message value in half-LSB units (fixed point)."""
        return 2 ** self.q_msg - 1

    def describe(self) -> dict:
        d = {"variant": self.variant, "iterations": self.iterations}
        if self.variant != "float_ms":
            d.update(q_ch=self.q_ch, q_msg=self.q_msg)
        if self.variant == "fixed_ms":
            d["fixed_scale"] = self.fixed_scale
        if self.variant == "lut":
            d["artifact_sha256"] = self.artifact.sha256()
        return d


@dataclass
class DecodeDiagnostics:
    syndrome_ok: np.ndarray   # per frame
    saturations: int = 0      # fixed point: requantizations that clipped


# -- fixed-point channel -----------------------------------------------------------

def fixed_channel(llr, q_ch: int, scale: float) -> np.ndarray:
    """Mid-rise uniform quantizer; returns odd integers in half-LSB units."""
    llr = np.asarray(llr, dtype=float)
    kmax = 2 ** (q_ch - 1) - 1
    k = np.minimum(np.floor(np.abs(llr) / scale), kmax).astype(np.int32)
    v = 2 * k + 1
    return np.where(llr < 0, -v, v).astype(np.int32)


def fixed_channel_mi(snr_db: float, rate, q_ch: int, scale: float) -> float:
    """Exact I(x; quantized L) of :func:`fixed_channel` on the BI-AWGN channel."""
    mu, sd = llr_moments(snr_db, rate)
    half = 2 ** (q_ch - 1)
    inner = np.arange(1, half) * scale
    edges = np.concatenate([[-np.inf], -inner[::-1], [0.0], inner, [np.inf]])
    p0 = interval_prob(edges[:-1], edges[1:], mu, sd)
    return float(mi_from_masses(p0, p0[::-1]))


def default_fixed_scale(snr_db: float, rate, q_ch: int, points: int = 4000) -> float:
    """Step size minimizing the channel MI loss at ``snr_db`` over a log grid
    of clipping ranges from 0.05 to 5 times the mean LLR."""
    mu, _ = llr_moments(snr_db, rate)
    half = 2 ** (q_ch - 1)
    grid = np.geomspace(0.05 * mu, 5.0 * mu, points) / half
    mi = np.array([fixed_channel_mi(snr_db, rate, q_ch, s) for s in grid])
    return float(grid[int(np.argmax(mi))])


# -- single-node reference operations --------------------------------------------

def cn_update_minsum(values) -> np.ndarray:
    """Leave-one-out min-sum by the two-minimum method (values or integers)."""
    v = np.asarray(values)
    if v.ndim != 1 or v.size < 2:
        raise ValueError("need at least two check inputs")
    mag = np.abs(v)
    i1 = int(np.argmin(mag))
    m1 = mag[i1]
    m2 = np.min(np.delete(mag, i1))
    neg = v < 0
    parity = np.logical_xor.reduce(neg)
    out = np.full(mag.shape, m1)
    out[i1] = m2
    return np.where(parity ^ neg, -out, out)


def cn_update_naive(values) -> np.ndarray:
    v = np.asarray(values)
    out = np.empty_like(v)
    for j in range(v.size):
        rest = np.delete(v, j)
        s = -1 if np.count_nonzero(rest < 0) % 2 else 1
        out[j] = s * np.min(np.abs(rest))
    return out


def vn_update_ms(channel, inputs, msg_max: int | None = None):
    """Float: channel + sum(inputs).  With ``msg_max`` the arguments are odd
    half-LSB integers and the sum is requantized to the odd grid, saturating
    at ±msg_max; a zero sum takes the channel's sign."""
    total = channel + sum(inputs)
    if msg_max is None:
        return total
    out, _ = _requant(np.array([total], dtype=np.int64), np.array([channel < 0]), msg_max)
    return int(out[0])


def vn_update_lut(channel_label: int, inputs, tree: LutTree) -> int:
    sizes = tree.leaf_sizes
    if not 0 <= channel_label < sizes["L"]:
        raise IndexError(f"channel label {channel_label} out of range")
    if len(inputs) != tree.n_cn_leaves:
        raise ValueError(f"tree takes {tree.n_cn_leaves} messages, got {len(inputs)}")
    for lab in inputs:
        if not 0 <= lab < sizes.get("c", 0):
            raise IndexError(f"message label {lab} out of range")
    return int(tree.evaluate(np.intp(channel_label), [np.intp(x) for x in inputs]))


def decide(channel, inputs, cfg: DecoderConfig) -> int:
    if cfg.variant == "lut":
        return int(vn_update_lut(channel, inputs, cfg.artifact.decision_tree))
    total = channel + sum(inputs)
    if total < 0:
        return 1
    if total == 0 and cfg.variant == "fixed_ms":
        return int(channel < 0)
    return 0


# -- batch decoder ------------------------------------------------------------------

class Decoder:
    """A decoder bound to one graph and config; reusable across calls."""

    def __init__(self, cfg: DecoderConfig, graph: TannerGraph, backend: str | None = None):
        if not graph.is_regular:
            raise DecoderConfigError("decoders support regular Tanner graphs only")
        if cfg.variant == "lut":
            prof = cfg.artifact.profile
            if (prof.d_v, prof.d_c) != (graph.d_v, graph.d_c):
                raise DecoderConfigError(
                    f"artifact designed for ({prof.d_v},{prof.d_c}) but graph is "
                    f"({graph.d_v},{graph.d_c})")
        self.cfg = cfg
        self.graph = graph
        self.kernels = get_backend(backend)
        self.d_v = graph.d_v
        self.cn_edges = np.ascontiguousarray(graph.cn_edge_ids.reshape(graph.n_cn, graph.d_c),
                                             dtype=np.int64)
        self._check_vn = np.ascontiguousarray(graph.edge_vn[self.cn_edges])
        if cfg.variant == "lut":
            art = cfg.artifact
            self.n_ch_labels = art.channel.levels
            first = compile_tree(art.vn_trees[0])
            if first.n_nodes != 1 or first.nin[0] != 1:
                raise DecoderConfigError("first-iteration tree must map the channel alone")
            self.first_table = np.ascontiguousarray(first.tab)
            self.trees: list[CompiledTree] = [compile_tree(t) for t in art.vn_trees[1:]]
            self.dtree = compile_tree(art.decision_tree)
            self.cn_tables = label_cn_tables(2 ** art.q_msg)

    # channel representation for this variant
    def channel_input(self, llr) -> np.ndarray:
        llr = np.asarray(llr, dtype=float)
        if self.cfg.variant == "float_ms":
            return llr
        if self.cfg.variant == "fixed_ms":
            return fixed_channel(llr, self.cfg.q_ch, self.cfg.fixed_scale)
        return self.cfg.artifact.channel.quantize(llr)

    def syndrome_ok(self, bits) -> np.ndarray:
        bits = np.atleast_2d(bits)
        return ~np.bitwise_xor.reduce(bits[:, self._check_vn], axis=2).any(axis=1)

    def decode_batch(self, channel) -> tuple[np.ndarray, DecodeDiagnostics]:
        """Decode F frames given as [F, N] channel values in this variant's
        representation (reals, odd integers or quantizer labels)."""
        channel = np.atleast_2d(np.asarray(channel))
        f, n = channel.shape
        if n != self.graph.n_vn:
            raise ValueError(f"expected {self.graph.n_vn} channel values per frame, got {n}")
        k = self.kernels
        e = self.graph.edge_count
        cfg = self.cfg
        sat = 0
        if cfg.variant == "float_ms":
            ch = np.ascontiguousarray(channel, dtype=np.float64)
            v2c = np.empty((f, e))
            c2v = np.empty((f, e))
            k.vn_init_float(ch, v2c, self.d_v)
            for it in range(cfg.iterations):
                if it:
                    k.vn_stage_float(ch, c2v, v2c, self.d_v)
                k.cn_stage_float(v2c, c2v, self.cn_edges)
            bits = k.decide_float(ch, c2v, self.d_v)
        elif cfg.variant == "fixed_ms":
            ch = np.ascontiguousarray(channel, dtype=np.int32)
            if np.any(ch % 2 == 0) or np.any(np.abs(ch) > 2 ** cfg.q_ch - 1):
                raise ValueError("fixed-point channel values must be odd and within q_ch bits")
            v2c = np.empty((f, e), dtype=np.int32)
            c2v = np.empty((f, e), dtype=np.int32)
            sat += k.vn_init_fixed(ch, v2c, self.d_v, cfg.msg_max)
            for it in range(cfg.iterations):
                if it:
                    sat += k.vn_stage_fixed(ch, c2v, v2c, self.d_v, cfg.msg_max)
                k.cn_stage_int(v2c, c2v, self.cn_edges)
            bits = k.decide_fixed(ch, c2v, self.d_v)
        else:
            if channel.size and (channel.min() < 0 or channel.max() >= self.n_ch_labels):
                raise IndexError("channel label out of range")
            ch = np.ascontiguousarray(channel, dtype=np.uint8)
            v2c = np.empty((f, e), dtype=np.uint8)
            c2v = np.empty((f, e), dtype=np.uint8)
            k.vn_init_lut(ch, v2c, self.d_v, self.first_table)
            for it in range(cfg.iterations):
                if it:
                    k.vn_stage_lut(ch, c2v, v2c, self.d_v, self.trees[it - 1])
                k.cn_stage_label(v2c, c2v, self.cn_edges, *self.cn_tables)
            bits = k.decide_lut(ch, c2v, self.d_v, self.dtree)
        bits = np.asarray(bits, dtype=np.uint8)
        return bits, DecodeDiagnostics(self.syndrome_ok(bits), int(sat))


def decode(cfg: DecoderConfig, graph: TannerGraph, channel_values, backend: str | None = None):
    """Decode one frame; returns (bits, DecodeDiagnostics)."""
    values = np.asarray(channel_values)
    if values.ndim != 1:
        raise ValueError("decode takes one frame; use Decoder.decode_batch for many")
    bits, diag = Decoder(cfg, graph, backend).decode_batch(values[None, :])
    return bits[0], diag
