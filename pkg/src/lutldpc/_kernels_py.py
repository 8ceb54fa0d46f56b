"""Pure-numpy decoder stage kernels; the reference for ``_ckernels``.

All stages work on a batch of F frames.  Message buffers are [F, E] in
column-major edge order, so the d_v edges of VN n are n*d_v .. n*d_v+d_v-1.
Check-node adjacency comes as cn_edges[M, d_c].
"""
from __future__ import annotations

from contextlib import contextmanager

import numpy as np

# -- label instrumentation -----------------------------------------------------

_ARITH = {np.add, np.subtract, np.multiply, np.true_divide, np.floor_divide,
          np.negative, np.positive, np.absolute, np.power, np.remainder,
          np.fmod, np.sign, np.left_shift, np.right_shift}

label_arith_ops = 0
_debug = False


class _CountingArray(np.ndarray):
    """ndarray view that counts arithmetic ufuncs applied to it."""

    def __array_ufunc__(self, ufunc, method, *inputs, **kwargs):
        global label_arith_ops
        if ufunc in _ARITH:
            label_arith_ops += 1
        args = [i.view(np.ndarray) if isinstance(i, _CountingArray) else i for i in inputs]
        if "out" in kwargs:
            kwargs["out"] = tuple(o.view(np.ndarray) if isinstance(o, _CountingArray) else o
                                  for o in kwargs["out"])
        res = getattr(ufunc, method)(*args, **kwargs)
        if isinstance(res, np.ndarray):
            return res.view(_CountingArray)
        return res


@contextmanager
def count_label_arithmetic():
    """Within the block, LUT-path label arrays count arithmetic ufuncs.

    Yields a callable returning the number counted so far.
    """
    global _debug, label_arith_ops
    _debug, label_arith_ops = True, 0
    try:
        yield lambda: label_arith_ops
    finally:
        _debug = False


def _lab(a):
    return a.view(_CountingArray) if _debug else a


# -- float min-sum ------------------------------------------------------------------

def vn_init_float(llr, v2c, d_v):
    v2c.reshape(llr.shape[0], llr.shape[1], d_v)[...] = llr[:, :, None]


def vn_stage_float(llr, c2v, v2c, d_v):
    f, n = llr.shape
    c = c2v.reshape(f, n, d_v)
    total = llr.copy()
    for k in range(d_v):
        total += c[:, :, k]
    v2c.reshape(f, n, d_v)[...] = total[:, :, None] - c


def decide_float(llr, c2v, d_v):
    f, n = llr.shape
    c = c2v.reshape(f, n, d_v)
    total = llr.copy()
    for k in range(d_v):
        total += c[:, :, k]
    return (total < 0).astype(np.uint8)


def cn_stage_float(v2c, c2v, cn_edges):
    v = v2c[:, cn_edges]
    neg = v < 0
    parity = np.logical_xor.reduce(neg, axis=2)
    mag = np.abs(v)
    imin = np.argmin(mag, axis=2)
    m1 = np.take_along_axis(mag, imin[..., None], axis=2)
    np.put_along_axis(mag, imin[..., None], np.inf, axis=2)
    m2 = np.min(mag, axis=2, keepdims=True)
    first = np.arange(v.shape[2]) == imin[..., None]
    out = np.where(first, m2, m1)
    c2v[:, cn_edges] = np.where(parity[..., None] ^ neg, -out, out)


# -- fixed-point min-sum (odd integers in half-LSB units) ----------------------------

def _requant(s, ch_sign_neg, msg_max):
    """Nearest odd magnitude, ties toward zero; zero takes the channel sign."""
    mag = np.abs(s)
    odd = np.where(mag % 2 == 0, mag - 1, mag)
    odd = np.maximum(odd, 1)
    sat = mag > msg_max
    odd = np.minimum(odd, msg_max)
    neg = (s < 0) | ((s == 0) & ch_sign_neg)
    return np.where(neg, -odd, odd).astype(np.int32), int(sat.sum())


def vn_init_fixed(ch, v2c, d_v, msg_max):
    f, n = ch.shape
    out, sat = _requant(ch.astype(np.int64), ch < 0, msg_max)
    v2c.reshape(f, n, d_v)[...] = out[:, :, None]
    return sat


def vn_stage_fixed(ch, c2v, v2c, d_v, msg_max):
    f, n = ch.shape
    c = c2v.reshape(f, n, d_v).astype(np.int64)
    total = ch.astype(np.int64) + c.sum(axis=2)
    out, sat = _requant(total[:, :, None] - c, (ch < 0)[:, :, None], msg_max)
    v2c.reshape(f, n, d_v)[...] = out
    return sat


def decide_fixed(ch, c2v, d_v):
    f, n = ch.shape
    total = ch.astype(np.int64) + c2v.reshape(f, n, d_v).astype(np.int64).sum(axis=2)
    return ((total < 0) | ((total == 0) & (ch < 0))).astype(np.uint8)


def cn_stage_int(v2c, c2v, cn_edges):
    v = v2c[:, cn_edges]
    neg = v < 0
    parity = np.logical_xor.reduce(neg, axis=2)
    mag = np.abs(v)
    imin = np.argmin(mag, axis=2)
    m1 = np.take_along_axis(mag, imin[..., None], axis=2)
    np.put_along_axis(mag, imin[..., None], np.iinfo(mag.dtype).max, axis=2)
    m2 = np.min(mag, axis=2, keepdims=True)
    first = np.arange(v.shape[2]) == imin[..., None]
    out = np.where(first, m2, m1)
    c2v[:, cn_edges] = np.where(parity[..., None] ^ neg, -out, out)


# -- LUT decoder: labels only ---------------------------------------------------

def vn_init_lut(ch, v2c, d_v, first_table):
    f, n = ch.shape
    v2c.reshape(f, n, d_v)[...] = _lab(first_table)[_lab(ch)][:, :, None]


def _eval_tree(tree, leaves):
    vals = []
    for t in range(tree.n_nodes):
        args = []
        for a in range(tree.nin[t]):
            r = tree.ref[t, a]
            args.append(vals[r] if r >= 0 else leaves[-1 - r])
        vals.append(_lab(tree.nd_tables[t])[tuple(args)])
    return vals[-1]


def vn_stage_lut(ch, c2v, v2c, d_v, tree):
    f, n = ch.shape
    c = _lab(c2v.reshape(f, n, d_v))
    out = v2c.reshape(f, n, d_v)
    chl = _lab(ch)
    for j in range(d_v):
        leaves = [chl] + [c[:, :, k] for k in range(d_v) if k != j]
        out[:, :, j] = _eval_tree(tree, leaves)


def decide_lut(ch, c2v, d_v, tree):
    f, n = ch.shape
    c = _lab(c2v.reshape(f, n, d_v))
    leaves = [_lab(ch)] + [c[:, :, k] for k in range(d_v)]
    return np.asarray(_eval_tree(tree, leaves), dtype=np.uint8)


def cn_stage_label(v2c, c2v, cn_edges, sign_of, mag_of, label_of):
    """Min-sum on labels through lookups: sign_of/mag_of split a label,
    label_of[sign, mag] joins them back."""
    v = _lab(v2c)[:, cn_edges]
    neg = _lab(sign_of)[v]
    mag = _lab(mag_of)[v]
    parity = np.bitwise_xor.reduce(neg, axis=2)
    imin = np.argmin(mag, axis=2)
    m1 = np.take_along_axis(mag, imin[..., None], axis=2)
    masked = np.where(np.arange(v.shape[2]) == imin[..., None], np.iinfo(np.uint8).max, mag)
    m2 = np.min(masked, axis=2, keepdims=True)
    out_mag = np.where(np.arange(v.shape[2]) == imin[..., None], m2, m1)
    out_neg = neg ^ parity[..., None]
    c2v[:, cn_edges] = np.asarray(_lab(label_of)[out_neg, out_mag])
