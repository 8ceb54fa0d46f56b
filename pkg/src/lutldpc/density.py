"""Discrete density evolution for the min-sum / LUT hybrid decoder, and
the design flow that turns it into per-iteration LUT trees."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .ldpc import CodeProfile
from .prob import (ConditionalPmf, check_symmetry, mutual_information, product,
                   push_forward, symmetrize)
from .quantize import (CHANNEL_ONLY_SHAPE, ChannelQuantizer, DecisionTree, LutTable,
                       LutTree, TreeNode, TreeShape, default_decision_shape,
                       default_vn_shape, design_channel_quantizer, design_decision_tree,
                       design_vn_tree)

FORMAT_NAME = "lutldpc-design"
FORMAT_VERSION = 1


class DesignError(RuntimeError):
    pass


def cn_evolve(in_dist: ConditionalPmf, d_c: int) -> ConditionalPmf:
    """Distribution of the min-sum check output over d_c - 1 i.i.d. inputs.

    Works on survival functions: P(min rank >= r, sign product = s)
    factorizes over the inputs, so each pairwise combination is O(|M|).
    Symmetry lets the x = 1 half be read off as the mirror of x = 0.
    """
    if d_c < 2:
        raise ValueError("d_c must be >= 2")
    if not check_symmetry(in_dist, 1e-12):
        raise ValueError("cn_evolve needs a symmetric input distribution (sign from label)")
    half = in_dist.size // 2
    p = in_dist.p0
    pos = p[half:]            # magnitude rank r -> label half + r
    neg = p[:half][::-1]      # magnitude rank r -> label half - 1 - r
    sp = np.cumsum(pos[::-1])[::-1]
    sn = np.cumsum(neg[::-1])[::-1]
    ap, an = sp.copy(), sn.copy()
    for _ in range(d_c - 2):
        ap, an = ap * sp + an * sn, ap * sn + an * sp
    out_pos = ap - np.append(ap[1:], 0.0)
    out_neg = an - np.append(an[1:], 0.0)
    p0 = np.maximum(np.concatenate([out_neg[::-1], out_pos]), 0.0)
    p0 = p0 / p0.sum()
    return ConditionalPmf(p0, p0[::-1].copy())


def vn_joint_push(channel_dist: ConditionalPmf, cn_dist: ConditionalPmf | None,
                  tree: LutTree) -> ConditionalPmf:
    """Push the product distribution of the tree's leaves through its tables."""
    leaf = {"L": channel_dist}
    if cn_dist is not None:
        leaf["c"] = cn_dist
    for kind, size in tree.leaf_sizes.items():
        if kind not in leaf:
            raise ValueError(f"tree needs a distribution for leaf '{kind}'")
        if leaf[kind].size != size:
            raise ValueError(f"leaf '{kind}' alphabet size {leaf[kind].size} != tree's {size}")
    outs: list[ConditionalPmf] = []
    for node in tree.nodes:
        kids = [leaf[k] if k != "n" else outs[r] for k, r in node.children]
        if node.passthrough:
            outs.append(kids[0])
            continue
        joint = product(*kids)
        out = push_forward(joint, node.table.table, node.table.output_size)
        outs.append(symmetrize(out) if out.size % 2 == 0 else out)
    return outs[-1]


@dataclass
class DesignSchedule:
    """Design-flow parameters; shapes default to the figures' trees."""

    iterations: int = 5
    q_ch: int = 4
    q_msg: int = 3
    snr_db: float = 4.5
    vn_shapes: list[str] | None = None   # one per iteration >= 2; None = default
    decision_shape: str | None = None
    fine_bins: int = 2000

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.q_msg < 2 or self.q_ch < 1:
            raise ValueError("need q_msg >= 2 and q_ch >= 1")

    @property
    def msg_levels(self) -> int:
        return 2 ** self.q_msg

    @property
    def ch_levels(self) -> int:
        return 2 ** self.q_ch

    def vn_shape(self, iteration: int, d_v: int) -> TreeShape:
        if iteration == 1:
            return TreeShape.parse(CHANNEL_ONLY_SHAPE)
        if self.vn_shapes:
            text = self.vn_shapes[min(iteration - 2, len(self.vn_shapes) - 1)]
            return TreeShape.parse(text)
        return default_vn_shape(d_v)

    def dn_shape(self, d_v: int) -> TreeShape:
        if self.decision_shape:
            return TreeShape.parse(self.decision_shape)
        return default_decision_shape(d_v)


@dataclass(eq=False)
class DesignArtifact:
    profile: CodeProfile
    snr_db: float
    q_ch: int
    q_msg: int
    channel: ChannelQuantizer
    vn_trees: list[LutTree]
    decision_tree: DecisionTree
    mi_trace: list[tuple[int, float]]
    message_dists: list[ConditionalPmf] = field(default_factory=list)
    cn_dists: list[ConditionalPmf] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return len(self.vn_trees)

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "format": FORMAT_NAME,
            "version": FORMAT_VERSION,
            "profile": {"d_v": self.profile.d_v, "d_c": self.profile.d_c,
                        "rate": str(self.profile.rate)},
            "snr_db": self.snr_db,
            "q_ch": self.q_ch,
            "q_msg": self.q_msg,
            "iterations": self.iterations,
            "channel": {"thresholds": self.channel.thresholds.tolist(),
                        **_pmf_dict(self.channel.quantized_dist)},
            "vn_trees": [_tree_dict(t) for t in self.vn_trees],
            "decision_tree": _tree_dict(self.decision_tree),
            "mi_trace": [[i, mi] for i, mi in self.mi_trace],
            "message_dists": [_pmf_dict(d) for d in self.message_dists],
            "cn_dists": [_pmf_dict(d) for d in self.cn_dists],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"

    def save(self, path) -> str:
        text = self.dumps()
        Path(path).write_text(text)
        return hashlib.sha256(text.encode()).hexdigest()

    def sha256(self) -> str:
        return hashlib.sha256(self.dumps().encode()).hexdigest()

    @classmethod
    def from_dict(cls, d: dict) -> "DesignArtifact":
        if d.get("format") != FORMAT_NAME:
            raise ValueError("not a design artifact file")
        if d.get("version") != FORMAT_VERSION:
            raise ValueError(f"unsupported artifact version {d.get('version')}")
        prof = d["profile"]
        ch = d["channel"]
        trees = [_tree_from(t, LutTree) for t in d["vn_trees"]]
        if len(trees) != d["iterations"]:
            raise ValueError("iteration count does not match the stored trees")
        return cls(
            profile=CodeProfile(prof["d_v"], prof["d_c"], Fraction(prof["rate"])),
            snr_db=d["snr_db"], q_ch=d["q_ch"], q_msg=d["q_msg"],
            channel=ChannelQuantizer(np.array(ch["thresholds"]), _pmf_from(ch)),
            vn_trees=trees,
            decision_tree=_tree_from(d["decision_tree"], DecisionTree),
            mi_trace=[(int(i), float(mi)) for i, mi in d["mi_trace"]],
            message_dists=[_pmf_from(x) for x in d.get("message_dists", [])],
            cn_dists=[_pmf_from(x) for x in d.get("cn_dists", [])],
        )

    @classmethod
    def loads(cls, text: str) -> "DesignArtifact":
        return cls.from_dict(json.loads(text))

    @classmethod
    def load(cls, path) -> "DesignArtifact":
        return cls.loads(Path(path).read_text())


def _pmf_dict(d: ConditionalPmf) -> dict:
    return {"p0": d.p0.tolist(), "p1": d.p1.tolist()}


def _pmf_from(d: dict) -> ConditionalPmf:
    return ConditionalPmf(np.array(d["p0"]), np.array(d["p1"]))


def _tree_dict(tree: LutTree) -> dict:
    return {
        "shape": str(tree.shape),
        "leaf_sizes": dict(sorted(tree.leaf_sizes.items())),
        "nodes": [{
            "children": [[k, r] for k, r in n.children],
            "arities": list(n.table.input_arities),
            "output_size": n.table.output_size,
            "passthrough": n.passthrough,
            "achieved_mi": None if np.isnan(n.table.achieved_mi) else n.table.achieved_mi,
            "table": n.table.table.tolist(),
        } for n in tree.nodes],
    }


def _tree_from(d: dict, cls):
    nodes = []
    for n in d["nodes"]:
        mi = n.get("achieved_mi")
        table = LutTable(tuple(n["arities"]), n["output_size"], np.array(n["table"]),
                         float("nan") if mi is None else mi)
        nodes.append(TreeNode(tuple((k, int(r)) for k, r in n["children"]), table,
                              bool(n["passthrough"])))
    return cls(TreeShape.parse(d["shape"]), tuple(nodes), dict(d["leaf_sizes"]))


def run_de(channel, profile: CodeProfile, schedule: DesignSchedule) -> DesignArtifact:
    """Design one LUT tree per iteration plus the decision tree.

    Iteration 1 maps the quantized channel alone onto the message alphabet;
    every later iteration evolves the messages through the check nodes and
    designs a tree over the channel and d_v - 1 check messages.
    """
    if isinstance(channel, ConditionalPmf):
        channel = ChannelQuantizer(_placeholder_thresholds(channel.size), channel)
    ch_dist = channel.quantized_dist
    if profile.d_v >= profile.d_c:
        raise ValueError("profile must be (d_v, d_c)-regular with d_v < d_c")
    m = schedule.msg_levels
    trees: list[LutTree] = []
    msg_dists: list[ConditionalPmf] = []
    cn_dists: list[ConditionalPmf] = []
    trace: list[tuple[int, float]] = []
    _check_mi(mutual_information(ch_dist), "channel")
    msg = None
    for it in range(1, schedule.iterations + 1):
        shape = schedule.vn_shape(it, profile.d_v)
        if it == 1:
            tree = design_vn_tree(ch_dist, None, shape, m, expect_c=0)
            cn = None
        else:
            cn = cn_evolve(msg, profile.d_c)
            _check_mi(mutual_information(cn), f"check stage {it - 1}")
            cn_dists.append(cn)
            tree = design_vn_tree(ch_dist, cn, shape, m, expect_c=profile.d_v - 1)
        msg = vn_joint_push(ch_dist, cn, tree)
        mi = mutual_information(msg)
        _check_mi(mi, f"variable stage {it}")
        trees.append(tree)
        msg_dists.append(msg)
        trace.append((it, mi))
    cn_final = cn_evolve(msg, profile.d_c)
    cn_dists.append(cn_final)
    dtree = design_decision_tree(ch_dist, cn_final, schedule.dn_shape(profile.d_v),
                                 out_size=m, expect_c=profile.d_v)
    return DesignArtifact(profile, schedule.snr_db, schedule.q_ch, schedule.q_msg, channel,
                          trees, dtree, trace, msg_dists, cn_dists)


def design(profile: CodeProfile, schedule: DesignSchedule) -> DesignArtifact:
    """Channel quantizer at the design SNR followed by :func:`run_de`."""
    chq = design_channel_quantizer(schedule.snr_db, profile.rate, schedule.ch_levels,
                                   schedule.fine_bins)
    return run_de(chq, profile, schedule)


def _check_mi(mi: float, where: str):
    if mi <= 0.0:
        raise DesignError(f"channel below design threshold: zero mutual information at {where}")


def _placeholder_thresholds(levels: int) -> np.ndarray:
    return np.arange(levels - 1, dtype=float) - (levels - 2) / 2
