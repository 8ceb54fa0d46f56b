"""Register, timing and wire arithmetic of a fully unrolled decoder.

The pipeline is CN1, VN2, CN2, ..., VN_I, CN_I, DN: iteration 1's variable
nodes only map the channel value and need no register stage.  Every one of
the 2I - 1 non-decision stages latches N * d_v messages and forwards the N
channel values; the decision stage keeps one bit per code bit.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

# (q_msg, q_ch) of the two reference configurations
VARIANT_WIDTHS = {"lut": (3, 4), "adder_ms": (5, 5)}
# measured clock frequencies (GHz) used when none is given
VARIANT_FREQ_GHZ = {"lut": 0.813, "adder_ms": 0.495}


def _positive(**kw):
    for k, v in kw.items():
        if not v > 0:
            raise ValueError(f"{k} must be positive, got {v}")


@dataclass(frozen=True)
class StageRegisters:
    name: str
    kind: str            # "cn", "vn" or "dn"
    message_bits: int
    channel_bits: int

    @property
    def total(self) -> int:
        return self.message_bits + self.channel_bits


def register_breakdown(n: int, d_v: int, i: int, q_msg: int, q_ch: int) -> list[StageRegisters]:
    _positive(n=n, d_v=d_v, i=i, q_msg=q_msg, q_ch=q_ch)
    msg, ch = n * d_v * q_msg, n * q_ch
    stages = [StageRegisters("CN1", "cn", msg, ch)]
    for it in range(2, i + 1):
        stages.append(StageRegisters(f"VN{it}", "vn", msg, ch))
        stages.append(StageRegisters(f"CN{it}", "cn", msg, ch))
    stages.append(StageRegisters("DN", "dn", n, 0))
    return stages


def register_budget(n: int, d_v: int, i: int, q_msg: int, q_ch: int) -> int:
    """Total register bits (2I - 1) * N * (d_v q_msg + q_ch) + N."""
    _positive(n=n, d_v=d_v, i=i, q_msg=q_msg, q_ch=q_ch)
    return (2 * i - 1) * n * (d_v * q_msg + q_ch) + n


def timing(n: int, i: int, f_ghz: float) -> tuple[float, float]:
    """(latency in ns, throughput in Gbit/s) for one codeword per clock."""
    _positive(n=n, i=i, f_ghz=f_ghz)
    return 2 * i / f_ghz, n * f_ghz


@dataclass(frozen=True)
class WireBudget:
    message_bits: int   # messages crossing one stage boundary
    channel_bits: int   # forwarded channel values

    @property
    def total(self) -> int:
        return self.message_bits + self.channel_bits


def wire_budget(n: int, d_v: int, q_msg: int, q_ch: int) -> WireBudget:
    _positive(n=n, d_v=d_v, q_msg=q_msg, q_ch=q_ch)
    return WireBudget(n * d_v * q_msg, n * q_ch)


def wire_ratio(lut: WireBudget, ref: WireBudget) -> dict:
    """LUT/reference wire ratios, counting messages only and with channel forwarding."""
    return {"messages_only": lut.message_bits / ref.message_bits,
            "with_channel": lut.total / ref.total}


@dataclass
class PipelineReport:
    variant: str
    n: int
    d_v: int
    iterations: int
    q_msg: int
    q_ch: int
    freq_ghz: float
    total_register_bits: int
    latency_cycles: int
    latency_ns: float
    throughput_gbps: float
    wire_bits_per_stage_boundary: int
    message_wire_bits: int
    per_stage_registers: list[StageRegisters] = field(default_factory=list)

    def category_totals(self) -> dict:
        out = {"cn_messages": 0, "vn_messages": 0, "dn": 0, "channel_forwarding": 0}
        for s in self.per_stage_registers:
            if s.kind == "dn":
                out["dn"] += s.message_bits
            else:
                out[f"{s.kind}_messages"] += s.message_bits
            out["channel_forwarding"] += s.channel_bits
        return out

    def to_dict(self) -> dict:
        d = asdict(self)
        d["per_stage_registers"] = [asdict(s) | {"total": s.total}
                                    for s in self.per_stage_registers]
        d["register_categories"] = self.category_totals()
        return d


def build_report(variant: str, n: int = 2048, d_v: int = 6, iterations: int = 5,
                 q_msg: int | None = None, q_ch: int | None = None,
                 freq_ghz: float | None = None) -> PipelineReport:
    dq_msg, dq_ch = VARIANT_WIDTHS.get(variant, (None, None))
    q_msg = dq_msg if q_msg is None else q_msg
    q_ch = dq_ch if q_ch is None else q_ch
    if q_msg is None or q_ch is None:
        raise ValueError(f"variant '{variant}' needs explicit q_msg and q_ch")
    f = VARIANT_FREQ_GHZ.get(variant) if freq_ghz is None else freq_ghz
    if f is None:
        raise ValueError(f"variant '{variant}' needs an explicit clock frequency")
    stages = register_breakdown(n, d_v, iterations, q_msg, q_ch)
    total = register_budget(n, d_v, iterations, q_msg, q_ch)
    assert total == sum(s.total for s in stages)
    lat, thr = timing(n, iterations, f)
    wires = wire_budget(n, d_v, q_msg, q_ch)
    return PipelineReport(variant, n, d_v, iterations, q_msg, q_ch, f, total, 2 * iterations,
                          lat, thr, wires.total, wires.message_bits, stages)


def format_table(reports: list[PipelineReport]) -> str:
    rows = [
        ("bit widths (q_msg/q_ch)", lambda r: f"{r.q_msg}/{r.q_ch}"),
        ("clock frequency [MHz]", lambda r: f"{r.freq_ghz * 1e3:.0f}"),
        ("register bits", lambda r: f"{r.total_register_bits:,}"),
        ("  CN stage messages", lambda r: f"{r.category_totals()['cn_messages']:,}"),
        ("  VN stage messages", lambda r: f"{r.category_totals()['vn_messages']:,}"),
        ("  channel forwarding", lambda r: f"{r.category_totals()['channel_forwarding']:,}"),
        ("  decision bits", lambda r: f"{r.category_totals()['dn']:,}"),
        ("latency [cycles]", lambda r: str(r.latency_cycles)),
        ("latency [ns]", lambda r: f"{r.latency_ns:.2f}"),
        ("throughput [Gbps]", lambda r: f"{r.throughput_gbps:.0f}"),
        ("wires per boundary", lambda r: f"{r.wire_bits_per_stage_boundary:,}"),
        ("  message wires", lambda r: f"{r.message_wire_bits:,}"),
    ]
    head = ["", *[r.variant for r in reports]]
    body = [[label, *[fn(r) for r in reports]] for label, fn in rows]
    widths = [max(len(row[c]) for row in [head, *body]) for c in range(len(head))]
    lines = []
    for row in [head, *body]:
        lines.append("  ".join([row[0].ljust(widths[0])]
                               + [cell.rjust(w) for cell, w in zip(row[1:], widths[1:])]))
    if len(reports) == 2:
        a, b = reports
        ratio = wire_ratio(wire_budget(a.n, a.d_v, a.q_msg, a.q_ch),
                           wire_budget(b.n, b.d_v, b.q_msg, b.q_ch))
        lines.append("")
        lines.append(f"wire ratio {a.variant}/{b.variant}: {ratio['with_channel']:.3f} with channel "
                     f"forwarding, {ratio['messages_only']:.3f} messages only")
    return "\n".join(lines)
