# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled decoder stage kernels; same signatures as _kernels_py."""

from libc.math cimport fabs, INFINITY
from libc.stdint cimport uint8_t, int32_t, int64_t

import numpy as np

cdef enum:
    MAX_NODES = 64
    MAX_LEAVES = 64


# -- float min-sum --------------------------------------------------------------

def vn_init_float(const double[:, ::1] llr, double[:, ::1] v2c, int d_v):
    cdef Py_ssize_t F = llr.shape[0], N = llr.shape[1], f, n, k
    for f in range(F):
        for n in range(N):
            for k in range(d_v):
                v2c[f, n * d_v + k] = llr[f, n]


def vn_stage_float(const double[:, ::1] llr, const double[:, ::1] c2v,
                   double[:, ::1] v2c, int d_v):
    cdef Py_ssize_t F = llr.shape[0], N = llr.shape[1], f, n, k, base
    cdef double total
    for f in range(F):
        for n in range(N):
            base = n * d_v
            total = llr[f, n]
            for k in range(d_v):
                total += c2v[f, base + k]
            for k in range(d_v):
                v2c[f, base + k] = total - c2v[f, base + k]


def decide_float(const double[:, ::1] llr, const double[:, ::1] c2v, int d_v):
    cdef Py_ssize_t F = llr.shape[0], N = llr.shape[1], f, n, k, base
    cdef double total
    out = np.empty((F, N), dtype=np.uint8)
    cdef uint8_t[:, ::1] o = out
    for f in range(F):
        for n in range(N):
            base = n * d_v
            total = llr[f, n]
            for k in range(d_v):
                total += c2v[f, base + k]
            o[f, n] = total < 0
    return out


def cn_stage_float(const double[:, ::1] v2c, double[:, ::1] c2v,
                   const int64_t[:, ::1] cn_edges):
    cdef Py_ssize_t F = v2c.shape[0], M = cn_edges.shape[0], dc = cn_edges.shape[1]
    cdef Py_ssize_t f, m, k, e, imin
    cdef double m1, m2, a, v
    cdef int parity
    for f in range(F):
        for m in range(M):
            m1 = INFINITY
            m2 = INFINITY
            imin = 0
            parity = 0
            for k in range(dc):
                v = v2c[f, cn_edges[m, k]]
                parity ^= v < 0
                a = fabs(v)
                if a < m1:
                    m2 = m1
                    m1 = a
                    imin = k
                elif a < m2:
                    m2 = a
            for k in range(dc):
                e = cn_edges[m, k]
                a = m2 if k == imin else m1
                c2v[f, e] = -a if (parity ^ (v2c[f, e] < 0)) else a


# -- fixed-point min-sum ------------------------------------------------------------

cdef inline int32_t _requant(int64_t s, bint ch_neg, int32_t msg_max, int64_t* sat) nogil:
    cdef int64_t mag = -s if s < 0 else s
    cdef int64_t odd = mag - 1 if mag % 2 == 0 else mag
    if odd < 1:
        odd = 1
    if mag > msg_max:
        sat[0] += 1
    if odd > msg_max:
        odd = msg_max
    if s < 0 or (s == 0 and ch_neg):
        return <int32_t>(-odd)
    return <int32_t>odd


def vn_init_fixed(const int32_t[:, ::1] ch, int32_t[:, ::1] v2c, int d_v, int32_t msg_max):
    cdef Py_ssize_t F = ch.shape[0], N = ch.shape[1], f, n, k
    cdef int64_t sat = 0
    cdef int32_t out
    for f in range(F):
        for n in range(N):
            out = _requant(ch[f, n], ch[f, n] < 0, msg_max, &sat)
            for k in range(d_v):
                v2c[f, n * d_v + k] = out
    return sat


def vn_stage_fixed(const int32_t[:, ::1] ch, const int32_t[:, ::1] c2v,
                   int32_t[:, ::1] v2c, int d_v, int32_t msg_max):
    cdef Py_ssize_t F = ch.shape[0], N = ch.shape[1], f, n, k, base
    cdef int64_t total, sat = 0
    cdef bint neg
    for f in range(F):
        for n in range(N):
            base = n * d_v
            total = ch[f, n]
            neg = ch[f, n] < 0
            for k in range(d_v):
                total += c2v[f, base + k]
            for k in range(d_v):
                v2c[f, base + k] = _requant(total - c2v[f, base + k], neg, msg_max, &sat)
    return sat


def decide_fixed(const int32_t[:, ::1] ch, const int32_t[:, ::1] c2v, int d_v):
    cdef Py_ssize_t F = ch.shape[0], N = ch.shape[1], f, n, k, base
    cdef int64_t total
    out = np.empty((F, N), dtype=np.uint8)
    cdef uint8_t[:, ::1] o = out
    for f in range(F):
        for n in range(N):
            base = n * d_v
            total = ch[f, n]
            for k in range(d_v):
                total += c2v[f, base + k]
            o[f, n] = total < 0 or (total == 0 and ch[f, n] < 0)
    return out


def cn_stage_int(const int32_t[:, ::1] v2c, int32_t[:, ::1] c2v,
                 const int64_t[:, ::1] cn_edges):
    cdef Py_ssize_t F = v2c.shape[0], M = cn_edges.shape[0], dc = cn_edges.shape[1]
    cdef Py_ssize_t f, m, k, e, imin
    cdef int32_t m1, m2, a, v
    cdef int parity
    for f in range(F):
        for m in range(M):
            m1 = 2147483647
            m2 = 2147483647
            imin = 0
            parity = 0
            for k in range(dc):
                v = v2c[f, cn_edges[m, k]]
                parity ^= v < 0
                a = -v if v < 0 else v
                if a < m1:
                    m2 = m1
                    m1 = a
                    imin = k
                elif a < m2:
                    m2 = a
            for k in range(dc):
                e = cn_edges[m, k]
                a = m2 if k == imin else m1
                c2v[f, e] = -a if (parity ^ (v2c[f, e] < 0)) else a


# -- LUT decoder -------------------------------------------------------------------

def vn_init_lut(const uint8_t[:, ::1] ch, uint8_t[:, ::1] v2c, int d_v,
                const uint8_t[::1] first_table):
    cdef Py_ssize_t F = ch.shape[0], N = ch.shape[1], f, n, k
    cdef uint8_t out
    for f in range(F):
        for n in range(N):
            out = first_table[ch[f, n]]
            for k in range(d_v):
                v2c[f, n * d_v + k] = out


cdef inline uint8_t _eval_tree(int n_nodes, const int32_t[::1] nin, const int32_t[:, ::1] ref,
                               const int64_t[:, ::1] stride, const int64_t[::1] off,
                               const uint8_t[::1] tab, int32_t* leaf, int32_t* val) nogil:
    cdef int t, a, r
    cdef int64_t idx
    for t in range(n_nodes):
        idx = 0
        for a in range(nin[t]):
            r = ref[t, a]
            if r >= 0:
                idx += val[r] * stride[t, a]
            else:
                idx += leaf[-1 - r] * stride[t, a]
        val[t] = tab[off[t] + idx]
    return <uint8_t>val[n_nodes - 1]


def vn_stage_lut(const uint8_t[:, ::1] ch, const uint8_t[:, ::1] c2v,
                 uint8_t[:, ::1] v2c, int d_v, tree):
    cdef const int32_t[::1] nin = tree.nin
    cdef const int32_t[:, ::1] ref = tree.ref
    cdef const int64_t[:, ::1] stride = tree.stride
    cdef const int64_t[::1] off = tree.off
    cdef const uint8_t[::1] tab = tree.tab
    cdef int n_nodes = tree.n_nodes
    cdef Py_ssize_t F = ch.shape[0], N = ch.shape[1], f, n, j, k, base, s
    cdef int32_t leaf[MAX_LEAVES]
    cdef int32_t val[MAX_NODES]
    if n_nodes > MAX_NODES or d_v + 1 > MAX_LEAVES:
        raise ValueError("tree too large for the compiled kernel")
    for f in range(F):
        for n in range(N):
            base = n * d_v
            for j in range(d_v):
                leaf[0] = ch[f, n]
                s = 1
                for k in range(d_v):
                    if k != j:
                        leaf[s] = c2v[f, base + k]
                        s += 1
                v2c[f, base + j] = _eval_tree(n_nodes, nin, ref, stride, off, tab, leaf, val)


def decide_lut(const uint8_t[:, ::1] ch, const uint8_t[:, ::1] c2v, int d_v, tree):
    cdef const int32_t[::1] nin = tree.nin
    cdef const int32_t[:, ::1] ref = tree.ref
    cdef const int64_t[:, ::1] stride = tree.stride
    cdef const int64_t[::1] off = tree.off
    cdef const uint8_t[::1] tab = tree.tab
    cdef int n_nodes = tree.n_nodes
    cdef Py_ssize_t F = ch.shape[0], N = ch.shape[1], f, n, k, base
    cdef int32_t leaf[MAX_LEAVES]
    cdef int32_t val[MAX_NODES]
    if n_nodes > MAX_NODES or d_v + 1 > MAX_LEAVES:
        raise ValueError("tree too large for the compiled kernel")
    out = np.empty((F, N), dtype=np.uint8)
    cdef uint8_t[:, ::1] o = out
    for f in range(F):
        for n in range(N):
            base = n * d_v
            leaf[0] = ch[f, n]
            for k in range(d_v):
                leaf[k + 1] = c2v[f, base + k]
            o[f, n] = _eval_tree(n_nodes, nin, ref, stride, off, tab, leaf, val)
    return out


def cn_stage_label(const uint8_t[:, ::1] v2c, uint8_t[:, ::1] c2v,
                   const int64_t[:, ::1] cn_edges, const uint8_t[::1] sign_of,
                   const uint8_t[::1] mag_of, const uint8_t[:, ::1] label_of):
    cdef Py_ssize_t F = v2c.shape[0], M = cn_edges.shape[0], dc = cn_edges.shape[1]
    cdef Py_ssize_t f, m, k, e, imin
    cdef uint8_t m1, m2, a, lab
    cdef int parity
    for f in range(F):
        for m in range(M):
            m1 = 255
            m2 = 255
            imin = 0
            parity = 0
            for k in range(dc):
                lab = v2c[f, cn_edges[m, k]]
                parity ^= sign_of[lab]
                a = mag_of[lab]
                if a < m1:
                    m2 = m1
                    m1 = a
                    imin = k
                elif a < m2:
                    m2 = a
            for k in range(dc):
                e = cn_edges[m, k]
                a = m2 if k == imin else m1
                c2v[f, e] = label_of[parity ^ sign_of[v2c[f, e]], a]
