"""MI-maximizing quantizers and the LUT trees built from them.

``design_quantizer`` finds the deterministic map of a finite binary-input
joint onto ``out_size`` labels with the largest I(label; x).  For binary
inputs an optimal map is contiguous in LLR order, so a dynamic program
over boundary positions is exact.  Trees of such quantizers replace the
arithmetic variable-node and decision updates.

Tree shape grammar
------------------
::

    node  := '(' item+ ')'     a LUT over its children
    pass  := '[' item ']'      identity pass-through (pipeline alignment)
    item  := node | pass | 'c' | 'L'

``c`` is a check-to-variable message leaf and ``L`` the channel leaf;
leaves are bound left to right.  The default variable-node tree for
d_v = 6 is ``((((c c) (c c)) [[c]]) [[[L]]])``.
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

import numpy as np

from . import channel as _ch
from .prob import (VOID_MASS, ConditionalPmf, MessageAlphabet, check_symmetry,
                   mutual_information, product, push_forward, symmetrize)

log = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-12


# -- the dynamic program ----------------------------------------------------

def _group_mi(g0, g1):
    """Per-group MI contribution 1/2 [g0 log2(2 g0/(g0+g1)) + g1 log2(2 g1/(g0+g1))]."""
    g0 = np.maximum(g0, 0.0)
    g1 = np.maximum(g1, 0.0)
    s = g0 + g1
    with np.errstate(divide="ignore", invalid="ignore"):
        t0 = np.where(g0 > 0, g0 * np.log2(2.0 * g0 / np.where(s > 0, s, 1.0)), 0.0)
        t1 = np.where(g1 > 0, g1 * np.log2(2.0 * g1 / np.where(s > 0, s, 1.0)), 0.0)
    return 0.5 * (t0 + t1)


def partition_dp(a0, a1, groups: int) -> list[int]:
    """Split the ordered atoms into ``groups`` nonempty contiguous runs
    maximizing the summed group MI.  Returns boundaries b_0=0 < ... < b_K=n.

    Cost is O(n^2 K) time and O(n K) memory.
    """
    n = len(a0)
    if not 1 <= groups <= n:
        raise ValueError(f"cannot split {n} atoms into {groups} groups")
    c0 = np.concatenate([[0.0], np.cumsum(a0)])
    c1 = np.concatenate([[0.0], np.cumsum(a1)])
    # best[j]: best value for the first j atoms with the current group count
    best = _group_mi(c0[1:], c1[1:])
    best = np.concatenate([[-np.inf], best])
    back = np.zeros((groups, n + 1), dtype=np.int64)
    for k in range(2, groups + 1):
        new = np.full(n + 1, -np.inf)
        for j in range(k, n + 1):
            i = np.arange(k - 1, j)
            vals = best[i] + _group_mi(c0[j] - c0[i], c1[j] - c1[i])
            arg = int(np.argmax(vals))
            new[j] = vals[arg]
            back[k - 1, j] = i[arg]
        best = new
    bounds = [n]
    j = n
    for k in range(groups, 1, -1):
        j = int(back[k - 1, j])
        bounds.append(j)
    bounds.append(0)
    return bounds[::-1]


def _sort_llr(p0, p1) -> np.ndarray:
    """LLR used for ordering; void atoms sit at 0."""
    with np.errstate(divide="ignore", invalid="ignore"):
        llr = np.log(p0) - np.log(p1)
    llr[(p0 < VOID_MASS) & (p1 < VOID_MASS)] = 0.0
    return llr


def llr_order(joint: ConditionalPmf) -> np.ndarray:
    """Atom indices by ascending LLR, ties by index."""
    llr = _sort_llr(joint.p0, joint.p1)
    return np.lexsort((np.arange(joint.size), llr))


def symmetric_lower_half(joint: ConditionalPmf) -> np.ndarray:
    """One atom per mirror pair (the non-positive-LLR one), LLR-sorted.

    Decided pairwise so that exactly n/2 atoms are returned; for a mirror
    pair with equal LLR the lower index is taken.
    """
    n = joint.size
    t = np.arange(n // 2)
    m = n - 1 - t
    p0, p1 = joint.p0, joint.p1
    void = (p0[t] < VOID_MASS) & (p1[t] < VOID_MASS)
    take_t = void | (p0[t] <= p1[t])
    lower = np.where(take_t, t, m)
    llr = _sort_llr(p0[lower], p1[lower])
    return lower[np.lexsort((lower, llr))]


@dataclass(frozen=True, eq=False)
class LutTable:
    """Output label for every mixed-radix input tuple (first input most significant)."""

    input_arities: tuple[int, ...]
    output_size: int
    table: np.ndarray
    achieved_mi: float = float("nan")
    void_levels: tuple[int, ...] = ()

    def __post_init__(self):
        tab = np.asarray(self.table, dtype=np.int64).ravel()
        tab.setflags(write=False)
        object.__setattr__(self, "table", tab)
        object.__setattr__(self, "input_arities", tuple(int(a) for a in self.input_arities))
        if tab.size != int(np.prod(self.input_arities)):
            raise ValueError("table length != product of input arities")
        if tab.size and (tab.min() < 0 or tab.max() >= self.output_size):
            raise ValueError("table entry outside output alphabet")

    @classmethod
    def identity(cls, size: int) -> "LutTable":
        return cls((size,), size, np.arange(size))

    def as_array(self) -> np.ndarray:
        return self.table.reshape(self.input_arities)

    def lookup(self, *labels):
        return self.as_array()[tuple(labels)]

    def reshaped(self, arities) -> "LutTable":
        return LutTable(tuple(arities), self.output_size, self.table,
                        self.achieved_mi, self.void_levels)

    def is_mirror_symmetric(self) -> bool:
        """Q(mirror(t)) == mirror(Q(t)) for every input tuple."""
        return bool(np.array_equal(self.table[::-1], self.output_size - 1 - self.table))

    def same_content(self, other: "LutTable") -> bool:
        return (self.input_arities == other.input_arities
                and self.output_size == other.output_size
                and np.array_equal(self.table, other.table))

    def dumps(self) -> str:
        head = f"# lut arities={','.join(map(str, self.input_arities))} out={self.output_size}\n"
        return head + "".join(f"{v}\n" for v in self.table)

    @classmethod
    def loads(cls, text: str) -> "LutTable":
        lines = text.split("\n")
        m = re.fullmatch(r"# lut arities=([\d,]+) out=(\d+)", lines[0].strip())
        if not m:
            raise ValueError("bad LUT header")
        arities = tuple(int(a) for a in m.group(1).split(","))
        return cls(arities, int(m.group(2)), [int(v) for v in lines[1:] if v.strip()])


def is_monotone(table: LutTable, joint: ConditionalPmf, rtol: float = 1e-9,
                decreasing: bool = False) -> bool:
    """Output never decreases as the input LLR strictly increases.

    LLRs within ``rtol`` of each other count as ties and void atoms are
    ignored.  Pass ``decreasing=True`` for decision tables, whose bit
    output falls as the LLR rises.
    """
    keep = ~((joint.p0 < VOID_MASS) & (joint.p1 < VOID_MASS))
    llr = _sort_llr(joint.p0, joint.p1)[keep]
    out = table.table[keep]
    if decreasing:
        out = -out
    order = np.argsort(llr, kind="stable")
    llr, out = llr[order], out[order]
    # tie groups
    finite_gap = np.abs(np.diff(llr)) > rtol * np.maximum(1.0, np.abs(llr[1:]))
    both_inf = np.isinf(llr[1:]) & (llr[1:] == llr[:-1])
    starts = np.concatenate([[0], np.flatnonzero(finite_gap & ~both_inf) + 1])
    ends = np.concatenate([starts[1:], [llr.size]])
    gmax = np.array([out[s:e].max() for s, e in zip(starts, ends)])
    gmin = np.array([out[s:e].min() for s, e in zip(starts, ends)])
    return bool(np.all(gmax[:-1] <= gmin[1:]))


def design_quantizer(joint: ConditionalPmf, out_size: int, symmetric: bool | None = None,
                     arities=None) -> tuple[LutTable, ConditionalPmf]:
    """MI-maximizing deterministic map of ``joint``'s atoms onto ``out_size`` labels.

    ``symmetric=None`` returns the unconstrained optimum, preferring the
    mirror-symmetric optimum when it is as good (within 1e-13 bit).
    ``symmetric=True`` restricts to mirror-symmetric maps; the joint must be
    symmetric and ``out_size`` even.
    """
    n = joint.size
    if out_size < 2:
        raise ValueError("out_size must be >= 2")
    arities = (n,) if arities is None else tuple(arities)
    sym_ok = out_size % 2 == 0 and n % 2 == 0 and check_symmetry(joint, SYMMETRY_TOL)
    if symmetric and not sym_ok:
        raise ValueError("symmetric design needs a symmetric joint and an even out_size")

    eff = out_size
    if n < out_size:
        eff = n
        log.warning("only %d input atoms for %d output levels; %d levels stay void",
                    n, out_size, out_size - eff)
    offset = (out_size - eff) // 2

    candidates = []
    if symmetric is not False and sym_ok and eff % 2 == 0:
        candidates.append(("sym", _symmetric_map(joint, eff)))
    if not symmetric:
        candidates.append(("free", _free_map(joint, eff)))
    scored = []
    for kind, mapping in candidates:
        mapping = mapping + offset
        out = push_forward(joint, mapping, out_size)
        scored.append((kind, mapping, out, mutual_information(out)))
    if len(scored) == 2 and scored[0][3] < scored[1][3] - 1e-13:
        scored = scored[1:]
    kind, mapping, out, mi = scored[0]
    if kind == "sym":
        out = symmetrize(out)
    void = tuple(int(k) for k in np.flatnonzero((out.p0 < VOID_MASS) & (out.p1 < VOID_MASS)))
    return LutTable(arities, out_size, mapping, mi, void), out


def _free_map(joint: ConditionalPmf, levels: int) -> np.ndarray:
    order = llr_order(joint)
    bounds = partition_dp(joint.p0[order], joint.p1[order], levels)
    mapping = np.empty(joint.size, dtype=np.int64)
    for g in range(levels):
        mapping[order[bounds[g]:bounds[g + 1]]] = g
    return mapping


def _symmetric_map(joint: ConditionalPmf, levels: int) -> np.ndarray:
    lower = symmetric_lower_half(joint)
    half = levels // 2
    # groups of the lower half carry the same MI as their mirror images
    bounds = partition_dp(joint.p0[lower], joint.p1[lower], half)
    mapping = np.empty(joint.size, dtype=np.int64)
    n = joint.size
    for g in range(half):
        atoms = lower[bounds[g]:bounds[g + 1]]
        mapping[atoms] = g
        mapping[n - 1 - atoms] = levels - 1 - g
    return mapping


def uniform_baseline_mi(joint: ConditionalPmf, out_size: int) -> float:
    """MI of the equal-width LLR quantizer spanning +-max finite |LLR|."""
    llr = _sort_llr(joint.p0, joint.p1)
    finite = np.isfinite(llr)
    span = np.abs(llr[finite]).max(initial=0.0)
    if span == 0:
        span = 1.0
    clipped = np.clip(llr, -span, span)
    edges = np.linspace(-span, span, out_size + 1)[1:-1]
    mapping = np.searchsorted(edges, clipped, side="right")
    if out_size % 2 == 0:
        # split LLR-zero atoms by mirror pair, as a symmetric quantizer must
        lower = set(symmetric_lower_half(joint).tolist()) if joint.size % 2 == 0 else set()
        zero = np.flatnonzero(clipped == 0)
        for t in zero:
            mapping[t] = out_size // 2 - 1 if t in lower else out_size // 2
    return mutual_information(push_forward(joint, mapping, out_size))


# -- tree shapes -------------------------------------------------------------

@dataclass(frozen=True)
class Leaf:
    kind: str  # 'c' or 'L'


@dataclass(frozen=True)
class Lut:
    children: tuple


@dataclass(frozen=True)
class Pass:
    child: object


ShapeNode = Union[Leaf, Lut, Pass]


class TreeShape:
    """Parsed tree-shape descriptor; see the module docstring for the grammar."""

    _token = re.compile(r"\s*([()\[\]]|c|L)")

    def __init__(self, root: ShapeNode):
        if not isinstance(root, Lut):
            raise ValueError("tree root must be a LUT node '( ... )'")
        self.root = root
        leaves = self.leaf_kinds()
        if leaves.count("L") != 1:
            raise ValueError(f"tree needs exactly one channel leaf 'L', found {leaves.count('L')}")

    @classmethod
    def parse(cls, text: str) -> "TreeShape":
        pos = 0
        tokens = []
        text = text.strip()
        while pos < len(text):
            m = cls._token.match(text, pos)
            if not m:
                raise ValueError(f"invalid tree shape at offset {pos}: {text[pos:pos + 10]!r}")
            tokens.append(m.group(1))
            pos = m.end()
            while pos < len(text) and text[pos].isspace():
                pos += 1
        it = iter(enumerate(tokens))

        def item(tok_i):
            i, tok = tok_i
            if tok in ("c", "L"):
                return Leaf(tok)
            if tok == "(":
                kids = []
                for nxt in it:
                    if nxt[1] == ")":
                        break
                    kids.append(item(nxt))
                else:
                    raise ValueError("unbalanced '(' in tree shape")
                if not kids:
                    raise ValueError("empty LUT node '()'")
                return Lut(tuple(kids))
            if tok == "[":
                nxt = next(it, None)
                if nxt is None:
                    raise ValueError("unbalanced '[' in tree shape")
                child = item(nxt)
                close = next(it, (None, None))
                if close[1] != "]":
                    raise ValueError("pass-through '[...]' takes exactly one item")
                return Pass(child)
            raise ValueError(f"unexpected token {tok!r} in tree shape")

        try:
            first = next(it)
        except StopIteration:
            raise ValueError("empty tree shape") from None
        root = item(first)
        if next(it, None) is not None:
            raise ValueError("trailing tokens after tree shape")
        return cls(root)

    def leaf_kinds(self) -> list[str]:
        out = []

        def walk(node):
            if isinstance(node, Leaf):
                out.append(node.kind)
            elif isinstance(node, Pass):
                walk(node.child)
            else:
                for c in node.children:
                    walk(c)

        walk(self.root)
        return out

    @property
    def n_cn_leaves(self) -> int:
        return self.leaf_kinds().count("c")

    def __str__(self):
        def fmt(node):
            if isinstance(node, Leaf):
                return node.kind
            if isinstance(node, Pass):
                return f"[{fmt(node.child)}]"
            return "(" + " ".join(fmt(c) for c in node.children) + ")"

        return fmt(self.root)

    def __repr__(self):
        return f"TreeShape.parse({str(self)!r})"

    def __eq__(self, other):
        return isinstance(other, TreeShape) and str(self) == str(other)

    def __hash__(self):
        return hash(str(self))


def _reduce(items: list[str], group: int) -> tuple[str, int]:
    levels = 0
    while len(items) > 1:
        nxt = []
        for i in range(0, len(items), group):
            chunk = items[i:i + group]
            nxt.append("(" + " ".join(chunk) + ")" if len(chunk) > 1 else f"[{chunk[0]}]")
        items = nxt
        levels += 1
    return items[0], levels


def default_vn_shape(d_v: int) -> TreeShape:
    """Pairwise reduction of the d_v-1 message leaves, then one LUT with L."""
    if d_v < 2:
        raise ValueError("d_v must be >= 2")
    top, levels = _reduce(["c"] * (d_v - 1), 2)
    return TreeShape.parse(f"({top} {'[' * levels}L{']' * levels})")


def default_decision_shape(d_v: int) -> TreeShape:
    """Three-input LUTs over the d_v message leaves; root also takes L."""
    items = ["c"] * d_v
    levels = 0
    while len(items) > 2:
        groups = []
        for i in range(0, len(items), 3):
            chunk = items[i:i + 3]
            groups.append("(" + " ".join(chunk) + ")" if len(chunk) > 1 else f"[{chunk[0]}]")
        items = groups
        levels += 1
    return TreeShape.parse(f"({' '.join(items)} {'[' * levels}L{']' * levels})")


CHANNEL_ONLY_SHAPE = "(L)"


# -- LUT trees ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TreeNode:
    """children: ('L', 0) channel leaf, ('c', s) message slot s, ('n', i) node i."""

    children: tuple[tuple[str, int], ...]
    table: LutTable
    passthrough: bool = False


@dataclass(frozen=True, eq=False)
class LutTree:
    shape: TreeShape
    nodes: tuple[TreeNode, ...]
    leaf_sizes: dict = field(default_factory=dict)  # {'L': |L|, 'c': |M|}

    def __post_init__(self):
        used_c = []
        for i, node in enumerate(self.nodes):
            if len(node.children) != len(node.table.input_arities):
                raise ValueError(f"node {i}: table arity does not match its children")
            for (kind, ref), ar in zip(node.children, node.table.input_arities):
                if kind == "n":
                    if ref >= i:
                        raise ValueError("nodes must be topologically ordered")
                    size = self.nodes[ref].table.output_size
                elif kind == "c":
                    used_c.append(ref)
                    size = self.leaf_sizes.get("c", ar)
                else:
                    size = self.leaf_sizes.get("L", ar)
                if size != ar:
                    raise ValueError(f"node {i}: input arity {ar} != child size {size}")
        if sorted(used_c) != list(range(self.shape.n_cn_leaves)):
            raise ValueError("every message leaf must be used exactly once")

    @property
    def root(self) -> TreeNode:
        return self.nodes[-1]

    @property
    def n_cn_leaves(self) -> int:
        return self.shape.n_cn_leaves

    @property
    def output_size(self) -> int:
        return self.root.table.output_size

    def evaluate(self, channel, messages):
        """Evaluate on label arrays by table indexing only.

        ``messages`` is a sequence of label arrays, one per message leaf.
        """
        vals = []
        for node in self.nodes:
            args = []
            for kind, ref in node.children:
                if kind == "L":
                    args.append(channel)
                elif kind == "c":
                    args.append(messages[ref])
                else:
                    args.append(vals[ref])
            vals.append(args[0] if node.passthrough else node.table.as_array()[tuple(args)])
        return vals[-1]

    def compose(self) -> LutTable:
        """Flatten into one table over (L, c_0, ..., c_{k-1})."""
        sizes = [self.leaf_sizes["L"]] + [self.leaf_sizes["c"]] * self.n_cn_leaves
        grids = np.indices(sizes).reshape(len(sizes), -1)
        out = self.evaluate(grids[0], list(grids[1:]))
        return LutTable(tuple(sizes), self.output_size, out)

    def tables(self) -> list[LutTable]:
        return [n.table for n in self.nodes if not n.passthrough]


class DecisionTree(LutTree):
    """LutTree whose root emits the decoded bit (1 = bit one)."""

    def __post_init__(self):
        super().__post_init__()
        if self.output_size != 2:
            raise ValueError("decision tree root must have two outputs")


def _tree_nodes(shape: TreeShape):
    """Post-order walk yielding (shape_node, child refs); leaves numbered left to right."""
    nodes = []
    counter = {"c": 0}

    def walk(node):
        if isinstance(node, Leaf):
            if node.kind == "L":
                return ("L", 0)
            slot = counter["c"]
            counter["c"] += 1
            return ("c", slot)
        kids = (node.child,) if isinstance(node, Pass) else node.children
        refs = tuple(walk(k) for k in kids)
        nodes.append((node, refs))
        return ("n", len(nodes) - 1)

    walk(shape.root)
    return nodes


def _design_tree(channel_dist: ConditionalPmf, cn_dist: ConditionalPmf | None,
                 shape: TreeShape, out_size: int, root_size: int, expect_c: int | None):
    if expect_c is not None and shape.n_cn_leaves != expect_c:
        raise ValueError(f"tree shape has {shape.n_cn_leaves} message leaves, expected {expect_c}")
    if shape.n_cn_leaves and cn_dist is None:
        raise ValueError("message leaves need a check-node distribution")
    leaf_dist = {"L": symmetrize(channel_dist)}
    if cn_dist is not None:
        leaf_dist["c"] = symmetrize(cn_dist)
    walk = _tree_nodes(shape)
    dists: list[ConditionalPmf] = []
    built: list[TreeNode] = []
    for idx, (node, refs) in enumerate(walk):
        kids = [leaf_dist[k] if k != "n" else dists[r] for k, r in refs]
        if isinstance(node, Pass):
            built.append(TreeNode(refs, LutTable.identity(kids[0].size), passthrough=True))
            dists.append(kids[0])
            continue
        size = root_size if idx == len(walk) - 1 else out_size
        joint = product(*kids)
        table, out = design_quantizer(joint, size, symmetric=True,
                                      arities=[k.size for k in kids])
        built.append(TreeNode(refs, table))
        dists.append(out)
    sizes = {k: d.size for k, d in leaf_dist.items()}
    return tuple(built), sizes, dists[-1]


def design_vn_tree(channel_dist: ConditionalPmf, cn_dist: ConditionalPmf | None,
                   shape: TreeShape | str, out_size: int, expect_c: int | None = None) -> LutTree:
    """Design every table of ``shape`` bottom-up, each MI-optimal for the
    joint of its own children."""
    shape = TreeShape.parse(shape) if isinstance(shape, str) else shape
    nodes, sizes, _ = _design_tree(channel_dist, cn_dist, shape, out_size, out_size, expect_c)
    return LutTree(shape, nodes, sizes)


def design_decision_tree(channel_dist: ConditionalPmf, cn_dist_final: ConditionalPmf,
                         shape: TreeShape | str, out_size: int | None = None,
                         expect_c: int | None = None) -> DecisionTree:
    shape = TreeShape.parse(shape) if isinstance(shape, str) else shape
    if out_size is None:
        out_size = cn_dist_final.size
    nodes, sizes, _ = _design_tree(channel_dist, cn_dist_final, shape, out_size, 2, expect_c)
    root = nodes[-1]
    # designed label 0 is the negative-LLR side, i.e. bit 1
    t = root.table
    flipped = LutTable(t.input_arities, 2, 1 - t.table, t.achieved_mi, t.void_levels)
    nodes = nodes[:-1] + (TreeNode(root.children, flipped),)
    return DecisionTree(shape, nodes, sizes)


def tree_node_joints(tree: LutTree, channel_dist: ConditionalPmf,
                     cn_dist: ConditionalPmf | None) -> list[ConditionalPmf | None]:
    """Input joint of every LUT node when the leaves follow the given
    distributions (None for pass-through nodes)."""
    leaf = {"L": symmetrize(channel_dist)}
    if cn_dist is not None:
        leaf["c"] = symmetrize(cn_dist)
    outs: list[ConditionalPmf] = []
    joints: list[ConditionalPmf | None] = []
    for node in tree.nodes:
        kids = [leaf[k] if k != "n" else outs[r] for k, r in node.children]
        if node.passthrough:
            joints.append(None)
            outs.append(kids[0])
            continue
        joint = product(*kids)
        joints.append(joint)
        outs.append(symmetrize(push_forward(joint, node.table.table, node.table.output_size)))
    return joints


# -- channel quantizer -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ChannelQuantizer:
    thresholds: np.ndarray
    quantized_dist: ConditionalPmf
    fine_dist: ConditionalPmf | None = None

    def __post_init__(self):
        t = np.asarray(self.thresholds, dtype=float)
        t.setflags(write=False)
        object.__setattr__(self, "thresholds", t)
        if t.size != self.quantized_dist.size - 1:
            raise ValueError("need levels - 1 thresholds")
        if np.any(np.diff(t) <= 0):
            raise ValueError("thresholds must be strictly increasing")
        if not np.allclose(t, -t[::-1], rtol=0, atol=1e-9):
            raise ValueError("thresholds must be symmetric about 0")

    @property
    def levels(self) -> int:
        return self.quantized_dist.size

    @property
    def alphabet(self) -> MessageAlphabet:
        return self.quantized_dist.alphabet()

    def quantize(self, llr) -> np.ndarray:
        """Label of each LLR; label k covers [t_{k-1}, t_k)."""
        return np.searchsorted(self.thresholds, llr, side="right").astype(np.uint8)


def fine_channel_pmf(snr_db: float, rate, fine_bins: int = 2000):
    """Equal-mixture-probability discretization of the channel LLR.

    Returns (edges, pmf) with edges[0] = -inf and edges[-1] = +inf.
    """
    if fine_bins % 2:
        raise ValueError("fine_bins must be even")
    half = fine_bins // 2
    upper = _ch.mixture_quantiles(0.5 + np.arange(1, half) / fine_bins, snr_db, rate)
    pos = np.concatenate([[0.0], upper, [np.inf]])
    edges = np.concatenate([-pos[::-1], pos[1:]])
    mu, sd = _ch.llr_moments(snr_db, rate)
    p0 = _ch.interval_prob(edges[:-1], edges[1:], mu, sd)
    p0 = p0 / p0.sum()
    return edges, ConditionalPmf(p0, p0[::-1].copy())


def design_channel_quantizer(snr_db: float, rate, levels: int,
                             fine_bins: int = 2000) -> ChannelQuantizer:
    """Max-MI quantizer of the BI-AWGN channel LLR onto ``levels`` labels."""
    if levels % 2 or levels < 2:
        raise ValueError("levels must be even and >= 2")
    if fine_bins < 100 * levels:
        raise ValueError(f"fine_bins must be >= 100 * levels = {100 * levels}")
    edges, fine = fine_channel_pmf(snr_db, Fraction(rate) if isinstance(rate, str) else rate, fine_bins)
    table, coarse = design_quantizer(fine, levels, symmetric=True)
    cut = np.flatnonzero(np.diff(table.table)) + 1
    thresholds = edges[cut]
    # fine edges are exact mirrors, so averaging only cleans up -0.0
    thresholds = 0.5 * (thresholds - thresholds[::-1])
    if mutual_information(coarse) < 1e-6:
        log.warning("channel MI below 1e-6 bit at %.2f dB", snr_db)
    return ChannelQuantizer(thresholds, coarse, fine)


# -- table sharing ---------------------------------------------------------------

@dataclass
class SharedTreeSet:
    unique_nodes: list  # (table, child keys) per shared node
    wiring: list[list[int]]  # per tree: shared-node index of each of its LUT nodes
    total_nodes: int

    @property
    def unique_count(self) -> int:
        return len(self.unique_nodes)

    @property
    def saved(self) -> int:
        return self.total_nodes - self.unique_count


def vn_leaf_bindings(d_v: int) -> list[dict]:
    """Leaf bindings of the d_v trees of one variable node: tree j reads
    every edge except j, in edge order."""
    out = []
    for j in range(d_v):
        others = [e for e in range(d_v) if e != j]
        out.append({("L", 0): ("ch",), **{("c", s): ("edge", e) for s, e in enumerate(others)}})
    return out


def share_tables(trees: list[LutTree], bindings: list[dict] | None = None) -> SharedTreeSet:
    """Deduplicate LUT nodes that compute the same function of the same
    inputs.  Without ``bindings`` every tree reads its own private leaves."""
    if bindings is None:
        bindings = [{("L", 0): ("ch", t), **{("c", s): ("c", t, s) for s in range(tr.n_cn_leaves)}}
                    for t, tr in enumerate(trees)]
    pool: dict = {}
    unique = []
    wiring = []
    total = 0
    for tree, bind in zip(trees, bindings):
        keys = []
        ids = []
        for node in tree.nodes:
            kid_keys = tuple(bind[(k, r)] if k != "n" else keys[r] for k, r in node.children)
            if node.passthrough:
                keys.append(kid_keys[0])
                continue
            t = node.table
            key = ("lut", t.input_arities, t.output_size, t.table.tobytes(), kid_keys)
            if key not in pool:
                pool[key] = len(unique)
                unique.append((t, kid_keys))
            keys.append(key)
            ids.append(pool[key])
            total += 1
        wiring.append(ids)
    return SharedTreeSet(unique, wiring, total)
