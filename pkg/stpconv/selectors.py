# -*- coding: utf-8 -*-
"""
Structured 0/1 matrices: the banded window selector Xi, the swap matrix W
and their Kronecker compositions, plus the receptive-field matrix
R = P * Abar * Q built from them.

Applying a selector to a masked grid is pure selection: every output cell
copies exactly one input cell, so undefined cells pass through untouched and
no arithmetic is ever done on them.
"""

import logging

import numpy as np

from stpconv.errors import ConfigError, SelectorError, ShapeError
from stpconv.grid import MaskedGrid, window_count

logger = logging.getLogger(__name__)


class SelectorMatrix:
    """Dense 0/1 matrix with selection-style application to masked grids."""

    __slots__ = ("_entries",)

    def __init__(self, entries):
        arr = np.array(entries, dtype=np.int8)
        if arr.ndim != 2 or arr.size < 1:
            raise ShapeError(f"a selector needs 2 axes, got shape {arr.shape}")
        if not np.isin(arr, (0, 1)).all():
            raise SelectorError("selector entries must be 0 or 1")
        arr.setflags(write=False)
        self._entries = arr

    @property
    def dense(self) -> np.ndarray:
        return self._entries.astype(int)

    @property
    def shape(self) -> tuple[int, int]:
        return self._entries.shape

    @property
    def rows(self) -> int:
        return self._entries.shape[0]

    @property
    def cols(self) -> int:
        return self._entries.shape[1]

    @property
    def T(self) -> "SelectorMatrix":
        return SelectorMatrix(self._entries.T)

    def kron(self, other: "SelectorMatrix") -> "SelectorMatrix":
        return SelectorMatrix(np.kron(self._entries, other._entries))

    def __matmul__(self, other: "SelectorMatrix") -> "SelectorMatrix":
        if self.cols != other.rows:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        product = self.dense @ other.dense
        if product.max(initial=0) > 1:
            raise SelectorError("product of selectors is not a 0/1 matrix")
        return SelectorMatrix(product)

    def row_sources(self) -> np.ndarray:
        """Column of the single 1 in every row."""
        counts = self._entries.sum(axis=1)
        if not np.all(counts == 1):
            bad = int(np.flatnonzero(counts != 1)[0])
            raise SelectorError(f"row {bad + 1} holds {int(counts[bad])} ones, expected exactly 1")
        return self._entries.argmax(axis=1)

    def col_sources(self) -> np.ndarray:
        """Row of the single 1 in every column."""
        return self.T.row_sources()

    def apply_rows(self, grid: MaskedGrid) -> MaskedGrid:
        """self @ grid as a row selection."""
        if self.cols != grid.rows:
            raise ShapeError(f"rows: selector has {self.cols} columns, grid has {grid.rows} rows")
        idx = self.row_sources()
        return MaskedGrid(grid.data[idx, :], grid.mask[idx, :])

    def apply_cols(self, grid: MaskedGrid) -> MaskedGrid:
        """grid @ self as a column selection."""
        if self.rows != grid.cols:
            raise ShapeError(f"cols: selector has {self.rows} rows, grid has {grid.cols} columns")
        idx = self.col_sources()
        return MaskedGrid(grid.data[:, idx], grid.mask[:, idx])

    def __eq__(self, other):
        if not isinstance(other, SelectorMatrix):
            return NotImplemented
        return np.array_equal(self._entries, other._entries)

    __hash__ = None

    def __repr__(self):
        return f"SelectorMatrix({self.rows}x{self.cols})"


# ======================================================
# === CONSTRUCTORS =====================================
# ======================================================

def identity(n: int) -> SelectorMatrix:
    return SelectorMatrix(np.eye(n, dtype=np.int8))


def xi(n: int, eta: int, d: int) -> SelectorMatrix:
    """Xi^d_{n x eta}: ((n-1)d + eta) x (n*eta), identity blocks I_eta shifted by d.

    d == eta (non-overlapping windows) is accepted as well as 0 < d < eta.
    """
    if n < 1 or eta < 1 or d < 1:
        raise ConfigError(f"xi needs positive n, eta, d; got n={n}, eta={eta}, d={d}")
    if d > eta:
        raise ConfigError(f"xi needs step d <= block size eta, got d={d}, eta={eta}")
    rows = (n - 1) * d + eta
    entries = np.zeros((rows, n * eta), dtype=np.int8)
    for i in range(n):
        entries[i * d:i * d + eta, i * eta:(i + 1) * eta] = np.eye(eta, dtype=np.int8)
    return SelectorMatrix(entries)


def swap_matrix(m: int, n: int) -> SelectorMatrix:
    """W_[m,n] with W (x (x) y) = y (x) x for x in R^m, y in R^n."""
    if m < 1 or n < 1:
        raise ConfigError(f"swap matrix needs positive m, n; got m={m}, n={n}")
    entries = np.zeros((m * n, m * n), dtype=np.int8)
    for i in range(m):
        for j in range(n):
            entries[j * m + i, i * n + j] = 1
    return SelectorMatrix(entries)


# ======================================================
# === RECEPTIVE FIELD MATRIX ===========================
# ======================================================

def rfm_2d(abar: MaskedGrid, s: int, t: int, dv: int, dh: int) -> MaskedGrid:
    """R_A = P * Abar * Q with P^T = Xi^{dv}_{s_v x s}, Q = Xi^{dh}_{s_h x t}.

    Block (i, j) of the (s_v*s) x (s_h*t) result is receptive field (i, j).
    """
    s_v = window_count(abar.rows, s, dv, "vertical")
    s_h = window_count(abar.cols, t, dh, "horizontal")
    logger.debug("rfm_2d: %dx%d grid, %dx%d windows of %dx%d", abar.rows, abar.cols, s_v, s_h, s, t)
    p = xi(s_v, s, dv).T
    q = xi(s_h, t, dh)
    return q.apply_cols(p.apply_rows(abar))
