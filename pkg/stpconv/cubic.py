# -*- coding: utf-8 -*-
"""
Order-3 (cubic) STP convolution.

A cube of eta slices, each m x n, is matricized as the (eta*m) x n stack of
its slices. After undefined-fill enlargement in all three axes every
(vertical, depth, horizontal) window position gives one (xi*s) x t block of
the matrix Psi:

    block row  (v, z) -> v * n_z + z      (depth index fastest)
    block col  h
    inside a block, row k*s + r holds row r of depth slice k of the window

S[(v, z), h] is the STP inner product of the block's available entries
(column-major over the block, i.e. column, then slice, then row) with the
kernel vector taken in the same order over its matricized (xi*s) x t form.

Psi is built by direct gather. build_psi_chain builds the same matrix from
the selector chain (per-slice P*Abar*Q, the swap rearrangement
T = W[delta, n_v] (x) I_s, then the depth selector
H = I_{n_v} (x) Xi^T (x) I_s) and is checked against the gather in the tests.
"""

import logging
from dataclasses import dataclass

import numpy as np

from stpconv.errors import ConfigError, InvalidValueError, ShapeError
from stpconv.grid import MaskedCube, MaskedGrid, available_vector, window_count
from stpconv.selectors import identity, rfm_2d, swap_matrix, xi
from stpconv.xdim_algebra import XVector, stp_inner

logger = logging.getLogger(__name__)


# ======================================================
# === TYPES ============================================
# ======================================================

@dataclass(frozen=True)
class CubicConfig:
    """Kernel size, per-side pads and strides of an order-3 convolution.

    pad_depth undefined slices are added in front of and behind the cube, so
    the enlarged depth is delta = eta + 2*pad_depth.
    """

    kernel_rows: int
    kernel_cols: int
    kernel_depth: int
    pad_v: int = 0
    pad_h: int = 0
    pad_depth: int = 0
    stride_v: int = 1
    stride_h: int = 1
    stride_depth: int = 1

    def __post_init__(self):
        for name in ("kernel_rows", "kernel_cols", "kernel_depth",
                     "stride_v", "stride_h", "stride_depth"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("pad_v", "pad_h", "pad_depth"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be nonnegative, got {getattr(self, name)}")

    @classmethod
    def from_increments(cls, kernel_rows, kernel_cols, kernel_depth,
                        delta_m=0, delta_n=0, delta_eta=0, **strides) -> "CubicConfig":
        """Build from total size increments (p = m + delta_m, ...); odd totals are rejected."""
        for name, total in (("delta_m", delta_m), ("delta_n", delta_n), ("delta_eta", delta_eta)):
            if total < 0:
                raise ConfigError(f"{name} must be nonnegative, got {total}")
            if total % 2:
                raise ConfigError(f"{name} = {total} is odd; padding must split evenly between both sides")
        return cls(kernel_rows, kernel_cols, kernel_depth,
                   pad_v=delta_m // 2, pad_h=delta_n // 2, pad_depth=delta_eta // 2, **strides)

    @property
    def kernel_shape(self) -> tuple[int, int, int]:
        return self.kernel_rows, self.kernel_cols, self.kernel_depth

    def padded_shape(self, a: MaskedCube) -> tuple[int, int, int]:
        """(delta, p, q) of the enlarged cube."""
        return a.eta + 2 * self.pad_depth, a.m + 2 * self.pad_v, a.n + 2 * self.pad_h

    def window_counts(self, a: MaskedCube) -> tuple[int, int, int]:
        """(n_v, n_h, n_z) for the unpadded cube a."""
        delta, p, q = self.padded_shape(a)
        return (window_count(p, self.kernel_rows, self.stride_v, "vertical"),
                window_count(q, self.kernel_cols, self.stride_h, "horizontal"),
                window_count(delta, self.kernel_depth, self.stride_depth, "depth"))


class CubicKernel:
    """Fully defined s x t x xi kernel."""

    __slots__ = ("_cube", "_vec")

    def __init__(self, cube: MaskedCube):
        if cube.defined_count != cube.data.size:
            raise InvalidValueError("a kernel must not contain undefined cells")
        self._cube = cube
        self._vec = available_vector(matricize(cube))

    @classmethod
    def from_matricized(cls, grid: MaskedGrid, depth: int) -> "CubicKernel":
        return cls(dematricize(grid, depth))

    @property
    def cube(self) -> MaskedCube:
        return self._cube

    @property
    def vec(self) -> XVector:
        return self._vec

    @property
    def shape(self) -> tuple[int, int, int]:
        return self._cube.m, self._cube.n, self._cube.eta


class PsiMatrix:
    """(n_v*n_z) x n_h array of (xi*s) x t window blocks, stored as one grid."""

    __slots__ = ("_grid", "n_v", "n_z", "n_h", "s", "t", "xi")

    def __init__(self, grid: MaskedGrid, n_v: int, n_z: int, n_h: int, s: int, t: int, xi: int):
        if grid.shape != (n_v * n_z * xi * s, n_h * t):
            raise ShapeError(
                f"rows/cols: Psi grid {grid.rows}x{grid.cols} does not hold "
                f"{n_v * n_z}x{n_h} blocks of {xi * s}x{t}")
        self._grid = grid
        self.n_v, self.n_z, self.n_h = n_v, n_z, n_h
        self.s, self.t, self.xi = s, t, xi

    @property
    def grid(self) -> MaskedGrid:
        return self._grid

    @property
    def block_shape(self) -> tuple[int, int]:
        return self.xi * self.s, self.t

    @property
    def block_counts(self) -> tuple[int, int]:
        return self.n_v * self.n_z, self.n_h

    def block(self, i: int, j: int) -> MaskedGrid:
        """Block (i, j), 0-based; i = v * n_z + z."""
        rows, cols = self.block_counts
        if not (0 <= i < rows and 0 <= j < cols):
            raise ShapeError(f"block index ({i}, {j}) outside {rows}x{cols}")
        h, w = self.block_shape
        return self._grid.sub(i * h, j * w, h, w)

    @property
    def blocks(self) -> list[list[MaskedGrid]]:
        rows, cols = self.block_counts
        return [[self.block(i, j) for j in range(cols)] for i in range(rows)]

    def __eq__(self, other):
        if not isinstance(other, PsiMatrix):
            return NotImplemented
        return (self.block_counts, self.block_shape) == (other.block_counts, other.block_shape) \
            and self._grid == other._grid

    __hash__ = None


# ======================================================
# === OPERATIONS =======================================
# ======================================================

def matricize(a: MaskedCube) -> MaskedGrid:
    """(eta*m) x n stack of the slices A_1 .. A_eta."""
    return MaskedGrid(a.data.reshape(a.eta * a.m, a.n), a.mask.reshape(a.eta * a.m, a.n))


def dematricize(grid: MaskedGrid, eta: int) -> MaskedCube:
    if eta < 1 or grid.rows % eta:
        raise ShapeError(f"rows: {grid.rows} rows do not split into {eta} slices")
    m = grid.rows // eta
    return MaskedCube(grid.data.reshape(eta, m, grid.cols), grid.mask.reshape(eta, m, grid.cols))


def enlarge_cube(a: MaskedCube, cfg: CubicConfig) -> MaskedCube:
    """Undefined border of pad_v / pad_h cells per slice and pad_depth slices per side."""
    delta, p, q = cfg.padded_shape(a)
    data = np.zeros((delta, p, q))
    mask = np.ones((delta, p, q), dtype=bool)
    inner = (slice(cfg.pad_depth, cfg.pad_depth + a.eta),
             slice(cfg.pad_v, cfg.pad_v + a.m),
             slice(cfg.pad_h, cfg.pad_h + a.n))
    data[inner] = a.data
    mask[inner] = a.mask
    return MaskedCube(data, mask)


def build_psi(a: MaskedCube, cfg: CubicConfig) -> PsiMatrix:
    """Psi by direct gather of every (v, z, h) window."""
    n_v, n_h, n_z = cfg.window_counts(a)
    s, t, depth = cfg.kernel_shape
    abar = enlarge_cube(a, cfg)
    bh = depth * s
    data = np.zeros((n_v * n_z * bh, n_h * t))
    mask = np.zeros_like(data, dtype=bool)
    for v in range(n_v):
        r0 = v * cfg.stride_v
        for z in range(n_z):
            z0 = z * cfg.stride_depth
            row = (v * n_z + z) * bh
            for h in range(n_h):
                c0 = h * cfg.stride_h
                sel = (slice(z0, z0 + depth), slice(r0, r0 + s), slice(c0, c0 + t))
                data[row:row + bh, h * t:(h + 1) * t] = abar.data[sel].reshape(bh, t)
                mask[row:row + bh, h * t:(h + 1) * t] = abar.mask[sel].reshape(bh, t)
    logger.debug("build_psi: n_v=%d n_z=%d n_h=%d, blocks %dx%d", n_v, n_z, n_h, bh, t)
    return PsiMatrix(MaskedGrid(data, mask), n_v, n_z, n_h, s, t, depth)


def build_psi_chain(a: MaskedCube, cfg: CubicConfig) -> PsiMatrix:
    """Psi from the selector chain H * (T * [P*Abar_1*Q; ...; P*Abar_delta*Q]).

    Needs every stride to be at most the matching kernel extent.
    """
    n_v, n_h, n_z = cfg.window_counts(a)
    s, t, depth = cfg.kernel_shape
    abar = enlarge_cube(a, cfg)
    delta = abar.eta
    # rows ordered (slice d, window v, row r)
    stacked = [rfm_2d(sl, s, t, cfg.stride_v, cfg.stride_h) for sl in abar.slices]
    rbar = MaskedGrid(np.vstack([r.data for r in stacked]), np.vstack([r.mask for r in stacked]))
    # (d, v, r) -> (v, d, r)
    rearrange = swap_matrix(delta, n_v).kron(identity(s))
    # (v, d, r) -> (v, z, k, r)
    depth_sel = identity(n_v).kron(xi(n_z, depth, cfg.stride_depth).T).kron(identity(s))
    psi = depth_sel.apply_rows(rearrange.apply_rows(rbar))
    return PsiMatrix(psi, n_v, n_z, n_h, s, t, depth)


def stp_conv3d(a: MaskedCube, k: CubicKernel, cfg: CubicConfig) -> MaskedGrid:
    """S[(v, z), h] = <available entries of Psi block, kernel vec>_V."""
    if k.shape != cfg.kernel_shape:
        raise ShapeError(f"depth/rows/cols: kernel {k.shape} differs from configured {cfg.kernel_shape}")
    psi = build_psi(a, cfg)
    rows, cols = psi.block_counts
    out = np.zeros((rows, cols))
    undefined = np.zeros((rows, cols), dtype=bool)
    for i in range(rows):
        for j in range(cols):
            x = available_vector(psi.block(i, j))
            if x is None:
                undefined[i, j] = True
            else:
                out[i, j] = stp_inner(x, k.vec)
    return MaskedGrid(out, undefined)
