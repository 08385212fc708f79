# -*- coding: utf-8 -*-
"""
Masked 2D/3D containers, padding, window extraction and the
available-entry vectorization used by every STP convolution.

A cell is either a finite real or undefined. Undefined cells are a separate
boolean mask (numpy.ma convention: True = undefined); their stored value is
always 0.0 and is never read by any arithmetic.

Vectorization order (normative):
- 2D windows: column by column, left to right, top to bottom in a column.
- 3D windows: column by column; inside a column the depth slices front to
  back; inside a slice top to bottom.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from stpconv.errors import ConfigError, InvalidValueError, ShapeError
from stpconv.xdim_algebra import XVector

logger = logging.getLogger(__name__)


class ConvMode(str, Enum):
    CLASSICAL = "classical"
    STP = "stp"


class Fill(str, Enum):
    ZERO = "zero"
    UNDEFINED = "undefined"


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


# ======================================================
# === MASKED GRID ======================================
# ======================================================

class MaskedGrid:
    """Immutable 2D array of real-or-undefined cells."""

    __slots__ = ("_data", "_mask")

    def __init__(self, data, mask=None):
        data = np.array(data, dtype=float)
        if data.ndim != 2 or data.size < 1:
            raise ShapeError(f"a grid needs 2 axes and at least one cell, got shape {data.shape}")
        mask = np.zeros(data.shape, dtype=bool) if mask is None else np.array(mask, dtype=bool)
        if mask.shape != data.shape:
            raise ShapeError(f"mask shape {mask.shape} differs from grid shape {data.shape}")
        data[mask] = 0.0
        if not np.all(np.isfinite(data)):
            raise InvalidValueError("defined grid cells must be finite reals")
        self._data = _frozen(data)
        self._mask = _frozen(mask)

    # --- constructors ---

    @classmethod
    def from_rows(cls, rows) -> "MaskedGrid":
        """Build from nested lists; None marks an undefined cell."""
        rows = [list(r) for r in rows]
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            raise ShapeError("rows must be non-empty and of equal length")
        mask = [[v is None for v in r] for r in rows]
        data = [[0.0 if v is None else float(v) for v in r] for r in rows]
        return cls(data, mask)

    @classmethod
    def from_masked_array(cls, arr) -> "MaskedGrid":
        arr = np.ma.asarray(arr)
        return cls(np.ma.getdata(arr), np.ma.getmaskarray(arr))

    @classmethod
    def undefined(cls, rows: int, cols: int) -> "MaskedGrid":
        return cls(np.zeros((rows, cols)), np.ones((rows, cols), dtype=bool))

    # --- accessors ---

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def mask(self) -> np.ndarray:
        return self._mask

    @property
    def values(self) -> np.ma.MaskedArray:
        return np.ma.MaskedArray(self._data.copy(), mask=self._mask.copy())

    @property
    def shape(self) -> tuple[int, int]:
        return self._data.shape

    @property
    def rows(self) -> int:
        return self._data.shape[0]

    @property
    def cols(self) -> int:
        return self._data.shape[1]

    @property
    def defined_count(self) -> int:
        return int(self._mask.size - self._mask.sum())

    @property
    def is_fully_defined(self) -> bool:
        return not self._mask.any()

    def __getitem__(self, index) -> Optional[float]:
        i, j = index
        return None if self._mask[i, j] else float(self._data[i, j])

    def to_rows(self) -> list:
        return [[None if m else float(v) for v, m in zip(dr, mr)]
                for dr, mr in zip(self._data.tolist(), self._mask.tolist())]

    def sub(self, row: int, col: int, nrows: int, ncols: int) -> "MaskedGrid":
        """Submatrix with top-left corner (row, col), 0-based."""
        if row < 0 or col < 0 or row + nrows > self.rows or col + ncols > self.cols:
            raise ShapeError(
                f"submatrix rows {row}..{row + nrows - 1}, cols {col}..{col + ncols - 1} "
                f"outside grid {self.rows}x{self.cols}")
        return MaskedGrid(self._data[row:row + nrows, col:col + ncols],
                          self._mask[row:row + nrows, col:col + ncols])

    def with_mask(self, mask) -> "MaskedGrid":
        """Additionally mark cells undefined where mask is true."""
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != self.shape:
            raise ShapeError(f"mask shape {mask.shape} differs from grid shape {self.shape}")
        return MaskedGrid(self._data, self._mask | mask)

    def allclose(self, other: "MaskedGrid", atol: float = 1e-9) -> bool:
        if self.shape != other.shape or not np.array_equal(self._mask, other._mask):
            return False
        return bool(np.all(np.abs(self._data - other._data) <= atol))

    def __eq__(self, other):
        if not isinstance(other, MaskedGrid):
            return NotImplemented
        return self.allclose(other, atol=0.0)

    __hash__ = None

    def __repr__(self):
        return f"MaskedGrid({self.to_rows()})"


# ======================================================
# === MASKED CUBE ======================================
# ======================================================

class MaskedCube:
    """Order-3 masked array of eta slices, each m x n (front to back)."""

    __slots__ = ("_data", "_mask")

    def __init__(self, data, mask=None):
        data = np.array(data, dtype=float)
        if data.ndim != 3 or data.size < 1:
            raise ShapeError(f"a cube needs 3 axes (eta, m, n), got shape {data.shape}")
        mask = np.zeros(data.shape, dtype=bool) if mask is None else np.array(mask, dtype=bool)
        if mask.shape != data.shape:
            raise ShapeError(f"mask shape {mask.shape} differs from cube shape {data.shape}")
        data[mask] = 0.0
        if not np.all(np.isfinite(data)):
            raise InvalidValueError("defined cube cells must be finite reals")
        self._data = _frozen(data)
        self._mask = _frozen(mask)

    @classmethod
    def from_slices(cls, slices: Sequence[MaskedGrid]) -> "MaskedCube":
        if not slices:
            raise ShapeError("a cube needs at least one slice")
        shape = slices[0].shape
        for k, s in enumerate(slices):
            if s.shape != shape:
                raise ShapeError(f"slice {k + 1} has shape {s.shape}, expected {shape}")
        return cls(np.stack([s.data for s in slices]), np.stack([s.mask for s in slices]))

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def mask(self) -> np.ndarray:
        return self._mask

    @property
    def eta(self) -> int:
        return self._data.shape[0]

    @property
    def m(self) -> int:
        return self._data.shape[1]

    @property
    def n(self) -> int:
        return self._data.shape[2]

    @property
    def slices(self) -> tuple[MaskedGrid, ...]:
        return tuple(MaskedGrid(d, k) for d, k in zip(self._data, self._mask))

    @property
    def defined_count(self) -> int:
        return int(self._mask.size - self._mask.sum())

    def __eq__(self, other):
        if not isinstance(other, MaskedCube):
            return NotImplemented
        return (self._data.shape == other._data.shape
                and np.array_equal(self._mask, other._mask)
                and np.array_equal(self._data, other._data))

    __hash__ = None

    def __repr__(self):
        return f"MaskedCube(eta={self.eta}, m={self.m}, n={self.n})"


# ======================================================
# === CONFIGURATION ====================================
# ======================================================

@dataclass(frozen=True)
class ConvConfig:
    """Padding, step lengths and receptive-field size of a 2D convolution.

    pad_v / pad_h are per side, so the padded grid is
    (rows + 2*pad_v) x (cols + 2*pad_h).
    """

    rf_rows: int
    rf_cols: int
    pad_v: int = 0
    pad_h: int = 0
    stride_v: int = 1
    stride_h: int = 1
    mode: ConvMode = ConvMode.STP

    def __post_init__(self):
        try:
            object.__setattr__(self, "mode", ConvMode(self.mode))
        except ValueError:
            raise ConfigError(f"unknown mode {self.mode!r}") from None
        for name in ("rf_rows", "rf_cols", "stride_v", "stride_h"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("pad_v", "pad_h"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be nonnegative, got {getattr(self, name)}")

    @property
    def fill(self) -> Fill:
        return Fill.ZERO if self.mode is ConvMode.CLASSICAL else Fill.UNDEFINED

    def window_counts(self, padded_rows: int, padded_cols: int) -> tuple[int, int]:
        return (window_count(padded_rows, self.rf_rows, self.stride_v, "vertical"),
                window_count(padded_cols, self.rf_cols, self.stride_h, "horizontal"))


# ======================================================
# === OPERATIONS =======================================
# ======================================================

def window_count(extent: int, window: int, stride: int, axis: str) -> int:
    """Solve (count - 1) * stride + window = extent for an integer count."""
    if window > extent:
        raise ShapeError(f"{axis}: window {window} exceeds padded extent {extent}")
    if (extent - window) % stride:
        raise ShapeError(
            f"{axis}: padded extent {extent} minus window {window} "
            f"is not a multiple of stride {stride}")
    return (extent - window) // stride + 1


def enlarge(a: MaskedGrid, pad_v: int, pad_h: int, fill=Fill.ZERO) -> MaskedGrid:
    """Border a with pad_v rows top and bottom, pad_h columns left and right."""
    fill = Fill(fill)
    if pad_v < 0 or pad_h < 0:
        raise ConfigError(f"pads must be nonnegative, got ({pad_v}, {pad_h})")
    shape = (a.rows + 2 * pad_v, a.cols + 2 * pad_h)
    data = np.zeros(shape)
    mask = np.full(shape, fill is Fill.UNDEFINED)
    data[pad_v:pad_v + a.rows, pad_h:pad_h + a.cols] = a.data
    mask[pad_v:pad_v + a.rows, pad_h:pad_h + a.cols] = a.mask
    logger.debug("enlarged %dx%d grid to %dx%d, %s fill", a.rows, a.cols, shape[0], shape[1], fill.value)
    return MaskedGrid(data, mask)


def window(abar: MaskedGrid, i: int, j: int, cfg: ConvConfig) -> MaskedGrid:
    """Receptive field (i, j) of the padded grid abar, 1-based window indices."""
    s_v, s_h = cfg.window_counts(abar.rows, abar.cols)
    if not (1 <= i <= s_v):
        raise ShapeError(f"vertical: window index {i} outside 1..{s_v}")
    if not (1 <= j <= s_h):
        raise ShapeError(f"horizontal: window index {j} outside 1..{s_h}")
    return abar.sub((i - 1) * cfg.stride_v, (j - 1) * cfg.stride_h, cfg.rf_rows, cfg.rf_cols)


def available_vector(w: MaskedGrid) -> Optional[XVector]:
    """Defined cells of w in column-major order; None when nothing is defined."""
    values = w.data.T[~w.mask.T]
    return XVector(values) if values.size else None


def available_positions(w: MaskedGrid) -> np.ndarray:
    """(row, col) of the defined cells of w, in available_vector order."""
    cols, rows = np.nonzero(~w.mask.T)
    return np.column_stack([rows, cols])


def available_vector_3d(ws: Sequence[MaskedGrid]) -> Optional[XVector]:
    """Defined cells of a stack of windows: columns, then slices, then rows."""
    if not ws:
        raise ShapeError("a 3D window needs at least one slice")
    shape = ws[0].shape
    for k, w in enumerate(ws):
        if w.shape != shape:
            raise ShapeError(f"depth: slice {k + 1} has shape {w.shape}, expected {shape}")
    data = np.stack([w.data for w in ws]).transpose(2, 0, 1)
    mask = np.stack([w.mask for w in ws]).transpose(2, 0, 1)
    values = data[~mask]
    return XVector(values) if values.size else None
