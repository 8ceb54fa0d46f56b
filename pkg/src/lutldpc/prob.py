"""Binary-input conditional PMFs over labeled alphabets.

Conventions: MI in bits, LLRs in natural-log units, log p(k|0)/p(k|1).
"""
from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

VOID_MASS = 1e-15
SUM_TOL = 1e-12
MIRROR_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class MessageAlphabet:
    """Sign-symmetric label set; label k < size/2 carries a negative LLR."""

    llr_values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.llr_values, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "llr_values", v)
        if v.ndim != 1 or v.size % 2:
            raise ValueError(f"alphabet size must be even, got {v.size}")
        if np.any(np.isnan(v)) or np.any(np.diff(v) <= 0):
            raise ValueError("llr_values must be strictly increasing")
        if not np.allclose(v, -v[::-1], rtol=0, atol=MIRROR_TOL, equal_nan=False):
            raise ValueError("llr_values are not mirror-symmetric")

    @property
    def size(self) -> int:
        return self.llr_values.size

    @property
    def labels(self) -> np.ndarray:
        return np.arange(self.size)

    def is_negative(self, label) -> np.ndarray:
        return np.asarray(label) < self.size // 2

    def mirror(self, label):
        return self.size - 1 - np.asarray(label)

    def __eq__(self, other):
        return isinstance(other, MessageAlphabet) and np.array_equal(self.llr_values, other.llr_values)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class ConditionalPmf:
    """p(symbol | x=0) and p(symbol | x=1) over ``len(p0)`` symbols."""

    p0: np.ndarray
    p1: np.ndarray

    def __post_init__(self):
        p0 = np.array(self.p0, dtype=float)
        p1 = np.array(self.p1, dtype=float)
        if p0.ndim != 1 or p0.shape != p1.shape or p0.size == 0:
            raise ValueError("p0 and p1 must be equal-length 1-D vectors")
        for name, p in (("p0", p0), ("p1", p1)):
            if np.any(p < 0) or not np.isfinite(p).all():
                raise ValueError(f"{name} has negative or non-finite entries")
            if abs(p.sum() - 1.0) > SUM_TOL:
                raise ValueError(f"{name} sums to {p.sum()!r}, not 1")
            p.setflags(write=False)
        object.__setattr__(self, "p0", p0)
        object.__setattr__(self, "p1", p1)

    @classmethod
    def normalized(cls, p0, p1) -> "ConditionalPmf":
        """Build from nonnegative weights, renormalizing each row."""
        p0 = np.asarray(p0, dtype=float)
        p1 = np.asarray(p1, dtype=float)
        return cls(p0 / p0.sum(), p1 / p1.sum())

    @property
    def size(self) -> int:
        return self.p0.size

    def alphabet(self) -> MessageAlphabet:
        return alphabet_from_llrs(llr_labels(self))

    def __eq__(self, other):
        return (isinstance(other, ConditionalPmf)
                and np.array_equal(self.p0, other.p0) and np.array_equal(self.p1, other.p1))

    __hash__ = None

    def __repr__(self):
        return f"ConditionalPmf(p0={self.p0.tolist()}, p1={self.p1.tolist()})"


def _xlogy_ratio(p, tot):
    """p * log2(2p / tot) with 0 log 0 = 0; tot = p0 + p1 avoids underflow of the mixture."""
    out = np.zeros_like(p)
    nz = p > 0
    out[nz] = p[nz] * np.log2(2.0 * p[nz] / tot[nz])
    return out


def mutual_information(d: ConditionalPmf) -> float:
    """I(symbol; x) in bits under a uniform prior on x."""
    tot = d.p0 + d.p1
    val = 0.5 * (_xlogy_ratio(d.p0, tot).sum() + _xlogy_ratio(d.p1, tot).sum())
    return float(min(max(val, 0.0), 1.0))


def mi_from_masses(p0, p1):
    """Vectorized MI of many pmf pairs along the last axis (bits)."""
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    tot = np.where(p0 + p1 > 0, p0 + p1, 1.0)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        t0 = np.where(p0 > 0, p0 * np.log2(2.0 * np.where(p0 > 0, p0, 1) / tot), 0.0)
        t1 = np.where(p1 > 0, p1 * np.log2(2.0 * np.where(p1 > 0, p1, 1) / tot), 0.0)
    return 0.5 * (t0 + t1).sum(axis=-1)


def llr_labels(d: ConditionalPmf) -> np.ndarray:
    """Per-symbol log(p0/p1); NaN marks void symbols, +-inf one-sided ones."""
    with np.errstate(divide="ignore", invalid="ignore"):
        llr = np.log(d.p0) - np.log(d.p1)
    llr[(d.p0 < VOID_MASS) & (d.p1 < VOID_MASS)] = np.nan
    return llr


def void_mask(d: ConditionalPmf) -> np.ndarray:
    return (d.p0 < VOID_MASS) & (d.p1 < VOID_MASS)


def alphabet_from_llrs(llr) -> MessageAlphabet:
    """Regularize raw per-label LLRs into a valid MessageAlphabet.

    The upper half defines the alphabet and the lower half is its exact
    mirror.  Labels that are void, infinite or out of order get a value
    just above their predecessor so the ordering stays strict.
    """
    llr = np.asarray(llr, dtype=float)
    half = llr.size // 2
    upper = 0.5 * (llr[half:] - llr[:half][::-1])
    prev = 0.0
    for k in range(half):
        if not np.isfinite(upper[k]) or upper[k] <= prev:
            upper[k] = prev + 1e-6
        prev = upper[k]
    return MessageAlphabet(np.concatenate([-upper[::-1], upper]))


def check_symmetry(d: ConditionalPmf, tol: float = 1e-12) -> bool:
    if d.size % 2:
        return False
    return bool(np.all(np.abs(d.p0 - d.p1[::-1]) <= tol))


def symmetrize(d: ConditionalPmf) -> ConditionalPmf:
    """Average each symbol with its mirror image under the other hypothesis."""
    if d.size % 2:
        raise ValueError("symmetrize needs an even alphabet size")
    p0 = 0.5 * (d.p0 + d.p1[::-1])
    return ConditionalPmf(p0, p0[::-1].copy())


def push_forward(d: ConditionalPmf, mapping, out_size: int | None = None) -> ConditionalPmf:
    """Distribution of mapping[symbol] for a deterministic relabeling."""
    mapping = np.asarray(mapping, dtype=np.int64)
    if mapping.shape != (d.size,):
        raise ValueError("mapping must assign one output per input symbol")
    if out_size is None:
        out_size = int(mapping.max()) + 1
    p0 = np.bincount(mapping, weights=d.p0, minlength=out_size)
    p1 = np.bincount(mapping, weights=d.p1, minlength=out_size)
    return ConditionalPmf(p0, p1)


def product(*dists: ConditionalPmf) -> ConditionalPmf:
    """Joint of conditionally independent components, flattened mixed-radix
    with the first component most significant."""
    p0 = np.ones(1)
    p1 = np.ones(1)
    for d in dists:
        p0 = np.multiply.outer(p0, d.p0).ravel()
        p1 = np.multiply.outer(p1, d.p1).ravel()
    return ConditionalPmf(p0, p1)


# -- text format -------------------------------------------------------------

def dumps_pmf(d: ConditionalPmf) -> str:
    llr = llr_labels(d)
    buf = io.StringIO()
    buf.write(f"# pmf |M|={d.size}\n")
    for k in range(d.size):
        buf.write(f"{k} {float(llr[k])!r} {float(d.p0[k])!r} {float(d.p1[k])!r}\n")
    return buf.getvalue()


def loads_pmf(text: str) -> ConditionalPmf:
    rows = [ln.split() for ln in text.splitlines()]
    header = rows[0] if rows else []
    if len(header) != 3 or header[:2] != ["#", "pmf"] or not header[2].startswith("|M|="):
        raise ValueError("missing '# pmf |M|=<size>' header")
    size = int(header[2][4:])
    body = [r for r in rows[1:] if r]
    if len(body) != size:
        raise ValueError(f"expected {size} rows, got {len(body)}")
    p0 = np.empty(size)
    p1 = np.empty(size)
    for k, row in enumerate(body):
        if len(row) != 4 or int(row[0]) != k:
            raise ValueError(f"bad row {k}: {' '.join(row)}")
        p0[k], p1[k] = float(row[2]), float(row[3])
    return ConditionalPmf(p0, p1)
