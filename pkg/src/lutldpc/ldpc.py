"""Parity-check matrices, Tanner graphs and alist I/O."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np


class AlistError(ValueError):
    """Malformed alist input; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class CodeProfile:
    d_v: int
    d_c: int
    rate: Fraction

    def __post_init__(self):
        if not (0 < self.d_v < self.d_c):
            raise ValueError(f"need 0 < d_v < d_c, got d_v={self.d_v}, d_c={self.d_c}")


@dataclass(frozen=True)
class ParityCheckMatrix:
    """Sparse binary H stored as both column and row supports.

    Supports are tuples of sorted 0-based indices.  Construct with
    :meth:`from_column_supports` unless both views are already at hand.
    """

    n_cols: int
    n_rows: int
    column_supports: tuple[tuple[int, ...], ...]
    row_supports: tuple[tuple[int, ...], ...]
    designed_rate: Fraction | None = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.column_supports) != self.n_cols:
            raise ValueError("column_supports length != n_cols")
        if len(self.row_supports) != self.n_rows:
            raise ValueError("row_supports length != n_rows")
        for kind, supports, bound in (
            ("column", self.column_supports, self.n_rows),
            ("row", self.row_supports, self.n_cols),
        ):
            for idx, sup in enumerate(supports):
                for a, b in zip(sup, sup[1:]):
                    if b <= a:
                        raise ValueError(f"{kind} {idx} support not strictly increasing")
                if sup and (sup[0] < 0 or sup[-1] >= bound):
                    raise ValueError(f"{kind} {idx}: index out of range")
        rebuilt = _transpose(self.column_supports, self.n_rows)
        if rebuilt != self.row_supports:
            raise ValueError("column and row supports describe different matrices")

    @classmethod
    def from_column_supports(cls, n_rows: int, columns: Sequence[Sequence[int]],
                             designed_rate: Fraction | None = None) -> "ParityCheckMatrix":
        cols = tuple(tuple(sorted(int(r) for r in c)) for c in columns)
        return cls(len(cols), n_rows, cols, _transpose(cols, n_rows), designed_rate)

    @classmethod
    def from_dense(cls, h) -> "ParityCheckMatrix":
        h = np.asarray(h)
        if h.ndim != 2:
            raise ValueError("dense H must be 2-D")
        cols = [np.flatnonzero(h[:, n]).tolist() for n in range(h.shape[1])]
        return cls.from_column_supports(h.shape[0], cols)

    def to_dense(self) -> np.ndarray:
        h = np.zeros((self.n_rows, self.n_cols), dtype=np.uint8)
        for n, sup in enumerate(self.column_supports):
            h[list(sup), n] = 1
        return h

    @property
    def column_weights(self) -> list[int]:
        return [len(s) for s in self.column_supports]

    @property
    def row_weights(self) -> list[int]:
        return [len(s) for s in self.row_supports]

    @property
    def is_regular(self) -> bool:
        return len(set(self.column_weights)) == 1 and len(set(self.row_weights)) == 1

    @property
    def rate(self) -> Fraction:
        """The designed rate if given, else 1 - M/N."""
        if self.designed_rate is not None:
            return self.designed_rate
        return 1 - Fraction(self.n_rows, self.n_cols)

    def profile(self) -> CodeProfile:
        """Degree profile of a regular matrix; raises for irregular ones."""
        if not self.is_regular:
            raise ValueError("irregular parity-check matrix: only (d_v, d_c)-regular codes are supported")
        return CodeProfile(self.column_weights[0], self.row_weights[0], self.rate)


def _transpose(supports, n_other: int) -> tuple[tuple[int, ...], ...]:
    out: list[list[int]] = [[] for _ in range(n_other)]
    for i, sup in enumerate(supports):
        for j in sup:
            if not 0 <= j < n_other:
                raise ValueError(f"index out of range: {j}")
            out[j].append(i)
    return tuple(tuple(o) for o in out)


@dataclass(frozen=True)
class TannerGraph:
    """Edge-indexed adjacency.  Edge ids are column-major: the edges of
    VN n are numbered consecutively in the order of its column support."""

    n_vn: int
    n_cn: int
    vn_edges: tuple[tuple[tuple[int, int], ...], ...]
    cn_edges: tuple[tuple[tuple[int, int], ...], ...]
    edge_count: int
    # flat arrays for the decoder kernels
    vn_ptr: np.ndarray = field(repr=False, compare=False)
    cn_ptr: np.ndarray = field(repr=False, compare=False)
    cn_edge_ids: np.ndarray = field(repr=False, compare=False)
    edge_vn: np.ndarray = field(repr=False, compare=False)
    edge_cn: np.ndarray = field(repr=False, compare=False)

    @property
    def is_regular(self) -> bool:
        return (len({len(e) for e in self.vn_edges}) == 1
                and len({len(e) for e in self.cn_edges}) == 1)

    @property
    def d_v(self) -> int:
        return len(self.vn_edges[0])

    @property
    def d_c(self) -> int:
        return len(self.cn_edges[0])


def build_tanner_graph(h: ParityCheckMatrix) -> TannerGraph:
    vn_edges = []
    cn_lists: list[list[tuple[int, int]]] = [[] for _ in range(h.n_rows)]
    edge_vn, edge_cn = [], []
    e = 0
    for n, sup in enumerate(h.column_supports):
        row = []
        for m in sup:
            row.append((m, e))
            cn_lists[m].append((n, e))
            edge_vn.append(n)
            edge_cn.append(m)
            e += 1
        vn_edges.append(tuple(row))
    # VNs are visited in increasing order, so each CN list is sorted by VN index
    cn_edges = tuple(tuple(c) for c in cn_lists)
    vn_ptr = np.zeros(h.n_cols + 1, dtype=np.int64)
    vn_ptr[1:] = np.cumsum([len(v) for v in vn_edges])
    cn_ptr = np.zeros(h.n_rows + 1, dtype=np.int64)
    cn_ptr[1:] = np.cumsum([len(c) for c in cn_edges])
    cn_edge_ids = np.array([eid for c in cn_edges for _, eid in c], dtype=np.int64)
    arrays = [vn_ptr, cn_ptr, cn_edge_ids,
              np.array(edge_vn, dtype=np.int64), np.array(edge_cn, dtype=np.int64)]
    for a in arrays:
        a.setflags(write=False)
    return TannerGraph(h.n_cols, h.n_rows, tuple(vn_edges), cn_edges, e, *arrays)


def check_syndrome(h: ParityCheckMatrix, word) -> bool:
    """True iff ``word`` satisfies every parity check."""
    w = np.asarray(word).astype(np.uint8) & 1
    if w.shape != (h.n_cols,):
        raise ValueError(f"word length {w.shape} does not match N={h.n_cols}")
    return all(int(w[list(sup)].sum()) % 2 == 0 for sup in h.row_supports)


# -- alist -----------------------------------------------------------------

def parse_alist(text: str | bytes) -> ParityCheckMatrix:
    """Parse MacKay's alist format.  Zero entries pad short support lines."""
    if isinstance(text, bytes):
        text = text.decode("ascii")
    lines = [(i + 1, ln.split()) for i, ln in enumerate(text.splitlines())]
    lines = [(no, toks) for no, toks in lines if toks]
    pos = 0

    def next_ints(expected: int | None, what: str) -> tuple[int, list[int]]:
        nonlocal pos
        if pos >= len(lines):
            raise AlistError(f"truncated file: expected {what}",
                             lines[-1][0] + 1 if lines else 1)
        no, toks = lines[pos]
        pos += 1
        try:
            vals = [int(t) for t in toks]
        except ValueError:
            raise AlistError(f"non-integer token in {what}", no) from None
        if expected is not None and len(vals) != expected:
            raise AlistError(f"{what}: expected {expected} values, got {len(vals)}", no)
        return no, vals

    no, (n, m) = next_ints(2, "header 'N M'")
    if n <= 0 or m <= 0:
        raise AlistError("N and M must be positive", no)
    no_max, (max_cw, max_rw) = next_ints(2, "max weights")
    no_cw, col_w = next_ints(n, "column weights")
    no_rw, row_w = next_ints(m, "row weights")
    if max(col_w) != max_cw or max(row_w) != max_rw:
        raise AlistError("declared max weights do not match the weight lists", no_max)

    def read_supports(count, weights, bound, max_w, what):
        out = []
        for k in range(count):
            no, vals = next_ints(None, f"{what} {k + 1} support")
            if len(vals) not in (weights[k], max_w):
                raise AlistError(f"{what} {k + 1}: expected {weights[k]} entries", no)
            nz = [v for v in vals if v != 0]
            if len(nz) != weights[k] or any(v == 0 for v in vals[:weights[k]]):
                raise AlistError(f"{what} {k + 1}: padding zero misuse", no)
            for v in nz:
                if not 1 <= v <= bound:
                    raise AlistError(f"{what} {k + 1}: index out of range ({v})", no)
            if len(set(nz)) != len(nz):
                raise AlistError(f"{what} {k + 1}: duplicate index", no)
            out.append(sorted(v - 1 for v in nz))
        return out

    cols = read_supports(n, col_w, m, max_cw, "column")
    start = lines[pos][0] if pos < len(lines) else None
    rows = read_supports(m, row_w, n, max_rw, "row")
    h = ParityCheckMatrix.from_column_supports(m, cols)
    if [list(r) for r in h.row_supports] != rows:
        raise AlistError("row lists inconsistent with column lists", start)
    return h


def serialize_alist(h: ParityCheckMatrix) -> str:
    cw, rw = h.column_weights, h.row_weights
    max_cw, max_rw = max(cw), max(rw)

    def fmt(sup, width):
        vals = [s + 1 for s in sup] + [0] * (width - len(sup))
        return " ".join(map(str, vals))

    out = [f"{h.n_cols} {h.n_rows}", f"{max_cw} {max_rw}",
           " ".join(map(str, cw)), " ".join(map(str, rw))]
    out += [fmt(s, max_cw) for s in h.column_supports]
    out += [fmt(s, max_rw) for s in h.row_supports]
    return "\n".join(out) + "\n"


# -- generators --------------------------------------------------------------

def qc_shift_matrix(d_v: int, d_c: int, z: int, seed: int = 0,
                    restarts: int = 100) -> np.ndarray:
    """Random circulant shifts for a fully populated d_v x d_c base matrix
    such that the lifted matrix has no 4-cycles."""
    rng = np.random.default_rng(seed)
    cand = np.arange(z)
    for _ in range(restarts):
        # used[a, b, d]: shift difference d already taken by row pair (a, b)
        used = np.zeros((d_v, d_v, z), dtype=bool)
        shifts = np.zeros((d_v, d_c), dtype=np.int64)
        col = np.zeros(d_v, dtype=np.int64)

        def place(i):
            if i == d_v:
                return True
            mask = np.ones(z, dtype=bool)
            for a in range(i):
                mask &= ~used[a, i, (col[a] - cand) % z]
            options = cand[mask]
            rng.shuffle(options)
            for v in options[:8]:
                col[i] = v
                if place(i + 1):
                    return True
            return False

        for j in range(d_c):
            col[:] = 0
            if not place(1):
                break
            for a in range(d_v):
                for b in range(a + 1, d_v):
                    used[a, b, (col[a] - col[b]) % z] = True
            shifts[:, j] = col
        else:
            return shifts
    raise RuntimeError(f"no 4-cycle-free ({d_v},{d_c}) QC shifts found for z={z}")


def qc_regular_matrix(d_v: int, d_c: int, z: int, seed: int = 0,
                      designed_rate: Fraction | None = None) -> ParityCheckMatrix:
    """(d_v, d_c)-regular quasi-cyclic H of size (d_v z) x (d_c z), girth >= 6."""
    shifts = qc_shift_matrix(d_v, d_c, z, seed)
    cols = []
    for j in range(d_c):
        for k in range(z):
            # circulant I shifted right by s: row r has a one at column (r + s) mod z
            cols.append([i * z + (k - shifts[i, j]) % z for i in range(d_v)])
    return ParityCheckMatrix.from_column_supports(d_v * z, cols, designed_rate)


def ieee8023an_like(seed: int = 0) -> ParityCheckMatrix:
    """2048-column, 384-row (6,32)-regular QC matrix, design rate 13/16,
    in the class of the 10GBASE-T code (not the standard's exact matrix)."""
    return qc_regular_matrix(6, 32, 64, seed)


def regular_36(n: int = 1008, seed: int = 0) -> ParityCheckMatrix:
    """(3,6)-regular QC matrix of blocklength n (multiple of 6)."""
    if n % 6:
        raise ValueError("blocklength must be a multiple of 6")
    return qc_regular_matrix(3, 6, n // 6, seed)


NAMED_CODES = {
    "802.3an-like": ieee8023an_like,
    "3-6-1008": lambda seed=0: regular_36(1008, seed),
    "3-6-96": lambda seed=0: regular_36(96, seed),
}


def named_code(name: str, seed: int = 0) -> ParityCheckMatrix:
    try:
        factory = NAMED_CODES[name]
    except KeyError:
        raise ValueError(f"unknown code {name!r}; choose from {sorted(NAMED_CODES)}") from None
    return factory(seed=seed)
