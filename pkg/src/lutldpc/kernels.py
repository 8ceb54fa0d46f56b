"""Backend selection for the decoder stage kernels.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
numpy implementation in ``_kernels_py``.  Setting ``LUTLDPC_PURE_PYTHON=1``
forces the fallback.  Both produce bit-identical results.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import _kernels_py
from .quantize import LutTree

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS = {"python": _kernels_py}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def default_backend_name() -> str:
    if os.environ.get("LUTLDPC_PURE_PYTHON", "") not in ("", "0"):
        return "python"
    return "cython" if _ckernels is not None else "python"


def get_backend(name: str | None = None):
    name = name or default_backend_name()
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"kernel backend '{name}' unavailable; have {available_backends()}") from None


@dataclass(frozen=True, eq=False)
class CompiledTree:
    """Flat form of a LutTree for the kernels.

    Pass-through nodes are folded away.  ``ref[t, a] >= 0`` names an earlier
    node; a negative value is leaf slot ``-1 - ref`` (0 = channel, s + 1 =
    message slot s).  Node t reads ``tab[off[t] + sum_a input_a * stride[t, a]]``.
    """

    n_nodes: int
    nin: np.ndarray
    ref: np.ndarray
    stride: np.ndarray
    off: np.ndarray
    tab: np.ndarray
    nd_tables: tuple
    output_size: int


def compile_tree(tree: LutTree) -> CompiledTree:
    resolved: list[int] = []   # original node index -> compiled ref
    nodes = []
    for node in tree.nodes:
        refs = []
        for kind, r in node.children:
            if kind == "L":
                refs.append(-1)
            elif kind == "c":
                refs.append(-2 - r)
            else:
                refs.append(resolved[r])
        if node.passthrough:
            resolved.append(refs[0])
            continue
        resolved.append(len(nodes))
        nodes.append((refs, node.table))
    if not nodes:
        raise ValueError("tree has no LUT node")
    width = max(len(r) for r, _ in nodes)
    t = len(nodes)
    nin = np.zeros(t, dtype=np.int32)
    ref = np.zeros((t, width), dtype=np.int32)
    stride = np.zeros((t, width), dtype=np.int64)
    off = np.zeros(t, dtype=np.int64)
    chunks, nd = [], []
    pos = 0
    for i, (refs, table) in enumerate(nodes):
        ar = table.input_arities
        nin[i] = len(ar)
        ref[i, :len(refs)] = refs
        stride[i, :len(ar)] = np.array([int(np.prod(ar[k + 1:])) for k in range(len(ar))])
        off[i] = pos
        flat = np.asarray(table.table, dtype=np.uint8)
        chunks.append(flat)
        nd.append(flat.reshape(ar))
        pos += flat.size
    return CompiledTree(t, nin, ref, stride, off, np.concatenate(chunks), tuple(nd),
                        tree.output_size)


def label_cn_tables(size: int):
    """(sign_of, mag_of, label_of) for a sign-symmetric alphabet of ``size`` labels."""
    if size % 2 or size < 2:
        raise ValueError("message alphabet must have an even size")
    half = size // 2
    k = np.arange(size)
    sign_of = (k < half).astype(np.uint8)
    mag_of = np.where(k >= half, k - half, half - 1 - k).astype(np.uint8)
    r = np.arange(half)
    label_of = np.stack([half + r, half - 1 - r]).astype(np.uint8)
    return sign_of, mag_of, label_of
