# -*- coding: utf-8 -*-
"""
Cross-dimensional vector algebra on R^inf.

A vector x of dimension m and a vector y of dimension n are compared in the
common dimension t = lcm(m, n) after every entry of x is repeated t/m times and
every entry of y t/n times (x (x) J_{t/m}, y (x) J_{t/n}, J_k = ones of length k).

The inner product never builds those length-t expansions: entry x_p covers
the interval [p*t/m, (p+1)*t/m) and y_q covers [q*t/n, (q+1)*t/n); the
product is (1/t) * sum x_p * y_q * |overlap| over a two-pointer merge, which
needs O(m + n) steps however large t gets.
"""

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from stpconv.errors import ConfigError, DimensionOverflowError, InvalidValueError, ShapeError


# ======================================================
# === CONFIGURATION ====================================
# ======================================================

# absolute tolerance for equivalence / zero-distance decisions
DEFAULT_ATOL = 1e-9

# interval end points stay exact in float64 below this bound
MAX_EXPANSION_DIM = 2**53


# ======================================================
# === TYPES ============================================
# ======================================================

class XVector:
    """Finite real vector of any positive dimension (an element of R^inf)."""

    __slots__ = ("_entries",)

    def __init__(self, entries):
        arr = np.array(entries, dtype=float).reshape(-1)
        if arr.size < 1:
            raise ShapeError("XVector needs dim >= 1, got an empty sequence")
        if not np.all(np.isfinite(arr)):
            raise InvalidValueError("XVector entries must be finite reals")
        arr.setflags(write=False)
        self._entries = arr

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def dim(self) -> int:
        return int(self._entries.size)

    def tolist(self) -> list:
        return self._entries.tolist()

    def __len__(self):
        return self.dim

    def __iter__(self):
        return iter(self._entries.tolist())

    def __getitem__(self, index):
        return float(self._entries[index])

    def __eq__(self, other):
        if not isinstance(other, XVector):
            return NotImplemented
        return self.dim == other.dim and bool(np.all(self._entries == other._entries))

    def __hash__(self):
        return hash(tuple(self._entries.tolist()))

    def __repr__(self):
        return f"XVector({self._entries.tolist()})"


@dataclass(frozen=True)
class EquivClass:
    """Equivalence class x-bar, held by its unique shortest representative."""

    canonical: XVector

    def representative(self, k: int) -> XVector:
        return stretch(self.canonical, k)


# ======================================================
# === CORE FUNCTIONS ===================================
# ======================================================

def lcm_dim(m: int, n: int) -> int:
    t = math.lcm(m, n)
    if t > MAX_EXPANSION_DIM:
        raise DimensionOverflowError(
            f"lcm({m}, {n}) = {t} exceeds the expansion bound {MAX_EXPANSION_DIM}")
    return t


def overlaps(m: int, n: int) -> Iterator[tuple[int, int, int]]:
    """Yield (p, q, length) for every pair of overlapping expansion intervals.

    Pairs come in increasing position order; lengths add up to lcm(m, n).
    """
    t = lcm_dim(m, n)
    a, b = t // m, t // n
    p = q = 0
    pos = 0
    while p < m and q < n:
        end = min((p + 1) * a, (q + 1) * b)
        yield p, q, end - pos
        pos = end
        if end == (p + 1) * a:
            p += 1
        if end == (q + 1) * b:
            q += 1


def overlap_weights(m: int, n: int) -> np.ndarray:
    """m x n matrix W with W[p, q] = |I_p & J_q| / t, so <x, y>_V = x^T W y."""
    t = lcm_dim(m, n)
    w = np.zeros((m, n))
    for p, q, length in overlaps(m, n):
        w[p, q] = length / t
    return w


def stretch(x: XVector, k: int) -> XVector:
    """x (x) J_k: every entry repeated k times, order preserved."""
    if k < 1:
        raise ConfigError(f"stretch factor must be >= 1, got {k}")
    return XVector(np.repeat(x.entries, k))


def scale(x: XVector, alpha: float) -> XVector:
    return XVector(alpha * x.entries)


def _expand_pair(x: XVector, y: XVector) -> tuple[np.ndarray, np.ndarray]:
    t = lcm_dim(x.dim, y.dim)
    return np.repeat(x.entries, t // x.dim), np.repeat(y.entries, t // y.dim)


def vadd(x: XVector, y: XVector) -> XVector:
    xe, ye = _expand_pair(x, y)
    return XVector(xe + ye)


def vsub(x: XVector, y: XVector) -> XVector:
    xe, ye = _expand_pair(x, y)
    return XVector(xe - ye)


def stp_inner(x: XVector, y: XVector) -> float:
    """<x, y>_V = (1/t) <x (x) J_{t/m}, y (x) J_{t/n}>."""
    t = lcm_dim(x.dim, y.dim)
    xs, ys = x.tolist(), y.tolist()
    total = 0.0
    for p, q, length in overlaps(x.dim, y.dim):
        total += xs[p] * ys[q] * length
    return total / t


def xnorm(x: XVector) -> float:
    return math.sqrt(max(stp_inner(x, x), 0.0))


def xdist(x: XVector, y: XVector) -> float:
    # same value as xnorm(vsub(x, y)) without building the length-t difference
    t = lcm_dim(x.dim, y.dim)
    xs, ys = x.tolist(), y.tolist()
    total = 0.0
    for p, q, length in overlaps(x.dim, y.dim):
        diff = xs[p] - ys[q]
        total += diff * diff * length
    return math.sqrt(total / t)


def equivalent(x: XVector, y: XVector, atol: float = DEFAULT_ATOL) -> bool:
    """x <-> y: the lcm expansions agree entrywise (within atol; atol=0 is exact)."""
    xs, ys = x.tolist(), y.tolist()
    return all(abs(xs[p] - ys[q]) <= atol for p, q, _ in overlaps(x.dim, y.dim))


def canonicalize(x: XVector) -> EquivClass:
    """Shortest representative of x-bar; its dimension divides x.dim."""
    m = x.dim
    for p in (d for d in range(1, m + 1) if m % d == 0):
        blocks = x.entries.reshape(p, m // p)
        # exact equality: class membership is structural
        if np.all(blocks == blocks[:, :1]):
            return EquivClass(XVector(blocks[:, 0]))
    raise AssertionError("unreachable: p = m always matches")


# ======================================================
# === OPERATIONS ON OMEGA ==============================
# ======================================================

def class_add(a: EquivClass, b: EquivClass) -> EquivClass:
    return canonicalize(vadd(a.canonical, b.canonical))


def class_inner(a: EquivClass, b: EquivClass) -> float:
    return stp_inner(a.canonical, b.canonical)


def class_dist(a: EquivClass, b: EquivClass) -> float:
    return xdist(a.canonical, b.canonical)
