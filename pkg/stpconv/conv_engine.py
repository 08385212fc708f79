# -*- coding: utf-8 -*-
"""
Convolution engine.

- classical_conv2d: zero padding, plain dot product of kernel and window.
- stp_conv2d: undefined padding, STP inner product of the kernel with the
  available entries of every window (rf size may differ from the kernel size).
- block_hadamard / tile_kernel / *_rfm: the receptive-field-matrix
  construction of both convolutions.
- 1D: discrete convolution variants, domain-based convolution and the STP
  convolution of masked sequences.
- grad_kernel / grad_input: analytic gradients of stp_conv2d, which is linear
  in both the kernel and the image.

All evaluation is sequential in row-major output order; multi_filter_conv
runs independent (channel, filter) pairs on a thread pool and keeps order.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Iterable, Optional, Sequence

import numpy as np
import pandas as pd

from stpconv.errors import ConfigError, InvalidValueError, ShapeError
from stpconv.grid import (
    ConvConfig,
    ConvMode,
    Fill,
    MaskedGrid,
    available_positions,
    available_vector,
    enlarge,
)
from stpconv.selectors import rfm_2d
from stpconv.xdim_algebra import XVector, overlap_weights, stp_inner

logger = logging.getLogger(__name__)


# ======================================================
# === TYPES ============================================
# ======================================================

class Kernel2D:
    """Fully defined s x t kernel with its column-major vector cached."""

    __slots__ = ("_grid", "_vec")

    def __init__(self, grid: MaskedGrid):
        if not grid.is_fully_defined:
            raise InvalidValueError("a kernel must not contain undefined cells")
        self._grid = grid
        self._vec = available_vector(grid)

    @classmethod
    def from_rows(cls, rows) -> "Kernel2D":
        return cls(MaskedGrid.from_rows(rows))

    @property
    def grid(self) -> MaskedGrid:
        return self._grid

    @property
    def vec(self) -> XVector:
        return self._vec

    @property
    def shape(self) -> tuple[int, int]:
        return self._grid.shape

    def __repr__(self):
        return f"Kernel2D({self._grid.to_rows()})"


@dataclass(frozen=True)
class FiniteSignal:
    """Real values on a finite, sorted set of integer indices."""

    support: tuple
    values: tuple

    def __post_init__(self):
        support = tuple(int(n) for n in self.support)
        values = tuple(float(v) for v in self.values)
        if not support:
            raise ShapeError("signal: support must be nonempty")
        if len(support) != len(values):
            raise ShapeError(f"signal: {len(support)} indices but {len(values)} values")
        if any(b <= a for a, b in zip(support, support[1:])):
            raise ShapeError("signal: support must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise InvalidValueError("signal values must be finite reals")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_mapping(cls, mapping: dict) -> "FiniteSignal":
        keys = sorted(mapping)
        return cls(tuple(keys), tuple(mapping[k] for k in keys))

    def as_dict(self) -> dict:
        return dict(zip(self.support, self.values))

    def restrict(self, domain: Iterable[int]) -> "FiniteSignal":
        domain = set(domain)
        kept = {n: v for n, v in zip(self.support, self.values) if n in domain}
        if not kept:
            raise ShapeError("signal: restriction to the domain is empty")
        return FiniteSignal.from_mapping(kept)

    def to_series(self) -> pd.Series:
        return pd.Series(self.values, index=pd.Index(self.support, name="index"), name="value")


class Variant(str, Enum):
    CONV = "conv"
    FLIPPED = "flipped"
    CROSS_CORRELATION = "cross_correlation"


@dataclass(frozen=True)
class Conv1DConfig:
    window: int
    stride: int = 1
    pad: int = 0

    def __post_init__(self):
        if self.window < 1:
            raise ConfigError(f"window must be positive, got {self.window}")
        if self.stride < 1:
            raise ConfigError(f"stride must be positive, got {self.stride}")
        if self.pad < 0:
            raise ConfigError(f"pad must be nonnegative, got {self.pad}")


@lru_cache(maxsize=256)
def _weights(m: int, n: int) -> np.ndarray:
    w = overlap_weights(m, n)
    w.setflags(write=False)
    return w


def _require_mode(cfg: ConvConfig, mode: ConvMode):
    if cfg.mode is not mode:
        raise ConfigError(f"expected a {mode.value} configuration, got mode {cfg.mode.value}")


# ======================================================
# === 2D CONVOLUTION ===================================
# ======================================================

def classical_conv2d(a: MaskedGrid, k: Kernel2D, cfg: ConvConfig) -> MaskedGrid:
    """s_ij = <V_c(K), V_c(Abar_ij)> over the zero-padded image."""
    _require_mode(cfg, ConvMode.CLASSICAL)
    if not a.is_fully_defined:
        raise ConfigError("classical convolution needs a fully defined image")
    if (cfg.rf_rows, cfg.rf_cols) != k.shape:
        raise ShapeError(
            f"rows/cols: receptive field {cfg.rf_rows}x{cfg.rf_cols} "
            f"must equal the kernel size {k.shape[0]}x{k.shape[1]} in classical mode")
    abar = enlarge(a, cfg.pad_v, cfg.pad_h, Fill.ZERO)
    s_v, s_h = cfg.window_counts(abar.rows, abar.cols)
    kvec = k.vec.entries
    out = np.zeros((s_v, s_h))
    for i in range(s_v):
        for j in range(s_h):
            r, c = i * cfg.stride_v, j * cfg.stride_h
            win = abar.data[r:r + cfg.rf_rows, c:c + cfg.rf_cols]
            out[i, j] = float(np.dot(kvec, win.T.reshape(-1)))
    return MaskedGrid(out)


def stp_conv2d(a: MaskedGrid, k: Kernel2D, cfg: ConvConfig) -> MaskedGrid:
    """s_ij = <available entries of window ij, V_c(K)>_V; undefined if none."""
    _require_mode(cfg, ConvMode.STP)
    abar = enlarge(a, cfg.pad_v, cfg.pad_h, Fill.UNDEFINED)
    s_v, s_h = cfg.window_counts(abar.rows, abar.cols)
    logger.debug("stp_conv2d: %dx%d windows of %dx%d, kernel %dx%d",
                 s_v, s_h, cfg.rf_rows, cfg.rf_cols, *k.shape)
    out = np.zeros((s_v, s_h))
    undefined = np.zeros((s_v, s_h), dtype=bool)
    for i in range(s_v):
        for j in range(s_h):
            win = abar.sub(i * cfg.stride_v, j * cfg.stride_h, cfg.rf_rows, cfg.rf_cols)
            x = available_vector(win)
            if x is None:
                undefined[i, j] = True
            else:
                out[i, j] = stp_inner(x, k.vec)
    return MaskedGrid(out, undefined)


def tile_kernel(k: Kernel2D, s_v: int, s_h: int) -> MaskedGrid:
    """J_{s_v x s_h} (x) K."""
    return MaskedGrid(np.kron(np.ones((s_v, s_h)), k.grid.data))


def block_hadamard(a: MaskedGrid, b: MaskedGrid, block_rows: int, block_cols: int,
                   mode=ConvMode.CLASSICAL) -> MaskedGrid:
    """Block Hadamard product: one inner product per pair of blocks.

    Classical mode takes the plain dot product of fully defined blocks. STP
    mode takes the STP inner product of the available entries of each block
    and leaves the cell undefined when either block has none.
    """
    mode = ConvMode(mode)
    if a.shape != b.shape:
        raise ShapeError(f"operands differ in size: {a.shape} vs {b.shape}")
    if a.rows % block_rows:
        raise ShapeError(f"rows: {a.rows} not divisible by block height {block_rows}")
    if a.cols % block_cols:
        raise ShapeError(f"cols: {a.cols} not divisible by block width {block_cols}")
    if mode is ConvMode.CLASSICAL and not (a.is_fully_defined and b.is_fully_defined):
        raise ConfigError("classical block Hadamard product needs fully defined operands")
    p, q = a.rows // block_rows, a.cols // block_cols
    out = np.zeros((p, q))
    undefined = np.zeros((p, q), dtype=bool)
    for i in range(p):
        for j in range(q):
            ab = a.sub(i * block_rows, j * block_cols, block_rows, block_cols)
            bb = b.sub(i * block_rows, j * block_cols, block_rows, block_cols)
            if mode is ConvMode.CLASSICAL:
                out[i, j] = float(np.dot(ab.data.T.reshape(-1), bb.data.T.reshape(-1)))
                continue
            xa, xb = available_vector(ab), available_vector(bb)
            if xa is None or xb is None:
                undefined[i, j] = True
            else:
                out[i, j] = stp_inner(xa, xb)
    return MaskedGrid(out, undefined)


def _rfm_conv(a: MaskedGrid, k: Kernel2D, cfg: ConvConfig) -> MaskedGrid:
    if (cfg.rf_rows, cfg.rf_cols) != k.shape:
        raise ShapeError(
            f"rows/cols: the block Hadamard construction needs receptive field "
            f"{cfg.rf_rows}x{cfg.rf_cols} equal to the kernel size {k.shape[0]}x{k.shape[1]}")
    abar = enlarge(a, cfg.pad_v, cfg.pad_h, cfg.fill)
    rfm = rfm_2d(abar, cfg.rf_rows, cfg.rf_cols, cfg.stride_v, cfg.stride_h)
    s_v, s_h = rfm.rows // cfg.rf_rows, rfm.cols // cfg.rf_cols
    return block_hadamard(tile_kernel(k, s_v, s_h), rfm, cfg.rf_rows, cfg.rf_cols, cfg.mode)


def classical_conv2d_rfm(a: MaskedGrid, k: Kernel2D, cfg: ConvConfig) -> MaskedGrid:
    """S = (J (x) K) block-Hadamard P*Abar*Q, zero padding."""
    _require_mode(cfg, ConvMode.CLASSICAL)
    if not a.is_fully_defined:
        raise ConfigError("classical convolution needs a fully defined image")
    return _rfm_conv(a, k, cfg)


def stp_conv2d_rfm(a: MaskedGrid, k: Kernel2D, cfg: ConvConfig) -> MaskedGrid:
    """S = (J (x) K) block-Hadamard_V P*Abar*Q, undefined padding."""
    _require_mode(cfg, ConvMode.STP)
    return _rfm_conv(a, k, cfg)


def multi_filter_conv(channels: Sequence[MaskedGrid], filters: Sequence[Kernel2D],
                      cfg: ConvConfig, max_workers: Optional[int] = None) -> list[MaskedGrid]:
    """Convolve every input channel with every filter, filter-major order.

    Output index f * len(channels) + c holds channel c convolved with filter f.
    """
    if not filters:
        raise ConfigError("at least one filter is required")
    if not channels:
        raise ConfigError("at least one input channel is required")
    shape = channels[0].shape
    for c, ch in enumerate(channels):
        if ch.shape != shape:
            raise ShapeError(f"channel {c + 1} has shape {ch.shape}, expected {shape}")
    conv = stp_conv2d if cfg.mode is ConvMode.STP else classical_conv2d
    pairs = [(ch, f) for f in filters for ch in channels]
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        return list(executor.map(lambda pair: conv(pair[0], pair[1], cfg), pairs))


# ======================================================
# === 1D CONVOLUTION ===================================
# ======================================================

# (index into f, index into k) -> output index
_OUTPUT_INDEX = {
    Variant.CONV: lambda i, j: i + j,
    Variant.FLIPPED: lambda i, j: i + j,
    Variant.CROSS_CORRELATION: lambda i, j: i - j,
}


def discrete_conv1d(f: FiniteSignal, k: FiniteSignal, variant=Variant.CONV) -> FiniteSignal:
    """Finite-support convolution, flipped convolution or cross-correlation.

    Only index pairs where both factors are in support contribute; the result
    support is every n with at least one contributing term.

        conv:              s(n) = sum_tau f(tau) k(n - tau)
        flipped:           s(n) = sum_tau f(n - tau) k(tau)
        cross_correlation: s(n) = sum_tau f(n + tau) k(tau)

    Each pair (i in supp f, j in supp k) lands on one output index n.
    """
    output_index = _OUTPUT_INDEX[Variant(variant)]
    acc: dict[int, float] = {}
    for i, fv in zip(f.support, f.values):
        for j, kv in zip(k.support, k.values):
            n = output_index(i, j)
            acc[n] = acc.get(n, 0.0) + fv * kv
    return FiniteSignal.from_mapping(acc)


def domain_conv1d(f: FiniteSignal, w: FiniteSignal,
                  domain: Optional[Iterable[int]] = None) -> FiniteSignal:
    """s(n) = sum over tau in D of f(tau) w(n - tau); D defaults to f.support."""
    if domain is not None:
        f = f.restrict(domain)
    acc: dict[int, float] = {}
    for tau, fv in zip(f.support, f.values):
        for sigma, wv in zip(w.support, w.values):
            acc[tau + sigma] = acc.get(tau + sigma, 0.0) + fv * wv
    return FiniteSignal.from_mapping(acc)


def domain_conv1d_reflected(f: FiniteSignal, w: FiniteSignal,
                            domain: Optional[Iterable[int]] = None) -> FiniteSignal:
    """Same product summed the other way: sum over tau in D' of w(tau) f(n - tau),
    D' = {tau | n - tau in D}."""
    if domain is not None:
        f = f.restrict(domain)
    fd, wd = f.as_dict(), w.as_dict()
    acc: dict[int, float] = {}
    for n in sorted({tau + sigma for tau in f.support for sigma in w.support}):
        acc[n] = sum(wd[tau] * fd[n - tau] for tau in w.support if n - tau in fd)
    return FiniteSignal.from_mapping(acc)


def l1_norm(f: FiniteSignal) -> float:
    return float(np.sum(np.abs(f.values)))


def as_masked_sequence(values) -> np.ma.MaskedArray:
    """1D masked float array; None entries become masked."""
    if isinstance(values, np.ma.MaskedArray):
        return np.ma.MaskedArray(np.ma.getdata(values).astype(float),
                                 mask=np.ma.getmaskarray(values))
    values = list(values)
    mask = [v is None for v in values]
    data = [0.0 if v is None else float(v) for v in values]
    return np.ma.MaskedArray(np.array(data, dtype=float), mask=np.array(mask, dtype=bool))


def stp_conv1d(f, k, cfg: Conv1DConfig) -> np.ma.MaskedArray:
    """STP convolution of a masked sequence with a kernel vector.

    f is a 1D masked array (or a sequence with None for missing samples);
    windows are padded with undefined samples and evaluated in index order.
    """
    f = as_masked_sequence(f)
    if f.ndim != 1 or f.size < 1:
        raise ShapeError(f"signal: expected a nonempty 1D sequence, got shape {f.shape}")
    kvec = k if isinstance(k, XVector) else XVector(k)
    row = MaskedGrid(np.ma.getdata(f).reshape(1, -1), np.ma.getmaskarray(f).reshape(1, -1))
    kernel = Kernel2D(MaskedGrid(kvec.entries.reshape(1, -1)))
    cfg2 = ConvConfig(rf_rows=1, rf_cols=cfg.window, pad_h=cfg.pad, stride_h=cfg.stride,
                      mode=ConvMode.STP)
    out = stp_conv2d(row, kernel, cfg2)
    return np.ma.MaskedArray(out.data[0].copy(), mask=out.mask[0].copy())


# ======================================================
# === GRADIENTS ========================================
# ======================================================

def grad_kernel(a: MaskedGrid, k: Kernel2D, cfg: ConvConfig) -> np.ma.MaskedArray:
    """d s_ij / d K for every output cell, shape (s_v, s_h, s, t).

    Cells whose window has no available entry are masked. The result does not
    depend on the kernel values, only on its shape.
    """
    _require_mode(cfg, ConvMode.STP)
    abar = enlarge(a, cfg.pad_v, cfg.pad_h, Fill.UNDEFINED)
    s_v, s_h = cfg.window_counts(abar.rows, abar.cols)
    s, t = k.shape
    n = s * t
    grads = np.zeros((s_v, s_h, s, t))
    undefined = np.zeros((s_v, s_h, s, t), dtype=bool)
    for i in range(s_v):
        for j in range(s_h):
            win = abar.sub(i * cfg.stride_v, j * cfg.stride_h, cfg.rf_rows, cfg.rf_cols)
            x = available_vector(win)
            if x is None:
                undefined[i, j] = True
                continue
            g = x.entries @ _weights(x.dim, n)
            grads[i, j] = g.reshape((s, t), order="F")
    return np.ma.MaskedArray(grads, mask=undefined)


def grad_input(a: MaskedGrid, k: Kernel2D, cfg: ConvConfig, upstream) -> MaskedGrid:
    """Adjoint of stp_conv2d: sum_ij upstream_ij * d s_ij / d a.

    upstream is an s_v x s_h array (or MaskedGrid); its entries on undefined
    output cells are ignored. Undefined input cells get no gradient.
    """
    _require_mode(cfg, ConvMode.STP)
    abar = enlarge(a, cfg.pad_v, cfg.pad_h, Fill.UNDEFINED)
    s_v, s_h = cfg.window_counts(abar.rows, abar.cols)
    if isinstance(upstream, MaskedGrid):
        up = np.where(upstream.mask, 0.0, upstream.data)
    else:
        up = np.ma.filled(np.ma.asarray(upstream, dtype=float), 0.0)
    if up.shape != (s_v, s_h):
        raise ShapeError(f"upstream has shape {up.shape}, output has shape {(s_v, s_h)}")
    kvec = k.vec.entries
    n = kvec.size
    grad = np.zeros(a.shape)
    for i in range(s_v):
        for j in range(s_h):
            r0, c0 = i * cfg.stride_v, j * cfg.stride_h
            win = abar.sub(r0, c0, cfg.rf_rows, cfg.rf_cols)
            pos = available_positions(win)
            if not len(pos):
                continue
            contrib = up[i, j] * (_weights(len(pos), n) @ kvec)
            rows = pos[:, 0] + r0 - cfg.pad_v
            cols = pos[:, 1] + c0 - cfg.pad_h
            np.add.at(grad, (rows, cols), contrib)
    return MaskedGrid(grad, a.mask)
