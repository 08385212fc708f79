import os

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stpconv import golden
from stpconv.conv_engine import Kernel2D, stp_conv2d
from stpconv.cubic import (
    CubicConfig,
    CubicKernel,
    build_psi,
    build_psi_chain,
    dematricize,
    enlarge_cube,
    matricize,
    stp_conv3d,
)
from stpconv.errors import ConfigError, InvalidValueError, ShapeError
from stpconv.grid import ConvConfig, MaskedCube, MaskedGrid, available_vector_3d
from stpconv.serialization import read_grid
from stpconv.xdim_algebra import stp_inner
from tests.strategies import masked_cubes


@pytest.fixture
def cube():
    return golden.cubic_image()


@pytest.fixture
def cfg():
    return golden.cubic_config()


def brute_force_psi_block(abar: MaskedCube, cfg: CubicConfig, v, z, h) -> MaskedGrid:
    s, t, depth = cfg.kernel_shape
    rows = []
    for k in range(depth):
        for r in range(s):
            row = []
            for c in range(t):
                zz = z * cfg.stride_depth + k
                rr = v * cfg.stride_v + r
                cc = h * cfg.stride_h + c
                row.append(None if abar.mask[zz, rr, cc] else float(abar.data[zz, rr, cc]))
            rows.append(row)
    return MaskedGrid.from_rows(rows)


@st.composite
def cubic_cases(draw):
    """(cube, cfg) with strides no larger than the kernel extents."""
    s, t, depth = (draw(st.integers(1, 2)) for _ in range(3))
    extents = []
    for window in (s, t, depth):
        stride = draw(st.integers(1, window))
        count = draw(st.integers(1, 3))
        padded = (count - 1) * stride + window
        pad = draw(st.integers(0, (padded - 1) // 2))
        extents.append((padded - 2 * pad, pad, stride))
    (m, pad_v, dv), (n, pad_h, dh), (eta, pad_z, dz) = extents
    cube = draw(masked_cubes(eta=eta, m=m, n=n))
    cfg = CubicConfig(s, t, depth, pad_v=pad_v, pad_h=pad_h, pad_depth=pad_z,
                      stride_v=dv, stride_h=dh, stride_depth=dz)
    return cube, cfg


# --- matricization ---

def test_matricize_stacks_slices(cube):
    assert matricize(cube).to_rows() == [[2, 1, 3, 2], [1, 3, 2, 2], [3, 2, 0, 1],
                                         [1, 1, 2, 3], [4, 2, 3, 4], [4, 0, 3, 3]]


def test_matricize_single_slice_is_unchanged():
    g = MaskedGrid.from_rows([[1, None], [3, 4]])
    assert matricize(MaskedCube.from_slices([g])) == g


@settings(max_examples=100)
@given(masked_cubes())
def test_dematricize_inverts_matricize(c):
    assert dematricize(matricize(c), c.eta) == c


def test_dematricize_rejects_uneven_split():
    with pytest.raises(ShapeError):
        dematricize(MaskedGrid(np.ones((5, 2))), 2)


# --- configuration ---

def test_from_increments_splits_evenly():
    c = CubicConfig.from_increments(2, 2, 3, delta_m=2, delta_n=4, delta_eta=2)
    assert (c.pad_v, c.pad_h, c.pad_depth) == (1, 2, 1)


def test_from_increments_rejects_odd_totals():
    with pytest.raises(ConfigError, match="delta_eta"):
        CubicConfig.from_increments(2, 2, 3, delta_eta=1)


def test_config_validation():
    with pytest.raises(ConfigError):
        CubicConfig(2, 2, 0)
    with pytest.raises(ConfigError):
        CubicConfig(2, 2, 2, pad_depth=-1)


def test_window_counts_of_example(cube, cfg):
    assert cfg.window_counts(cube) == (4, 5, 2)


def test_depth_stride_mismatch_names_depth(cube):
    bad = CubicConfig(2, 2, 3, pad_v=1, pad_h=1, pad_depth=1, stride_depth=2)
    with pytest.raises(ShapeError, match="depth"):
        build_psi(cube, bad)


# --- enlargement ---

def test_enlarge_cube_of_example(cube, cfg):
    abar = enlarge_cube(cube, cfg)
    assert (abar.eta, abar.m, abar.n) == (4, 5, 6)
    assert abar.slices[0].defined_count == 0
    assert abar.slices[3].defined_count == 0
    assert abar.slices[1].to_rows()[0] == [None] * 6
    assert abar.slices[1].to_rows()[1] == [None, 2, 1, 3, 2, None]
    assert abar.defined_count == cube.defined_count


def test_enlarge_cube_without_pads(cube):
    assert enlarge_cube(cube, CubicConfig(1, 1, 1)) == cube


# --- Psi ---

def test_psi_matches_reference_matrix(cube, cfg, data_dir):
    expected = read_grid(os.path.join(data_dir, "psi_cubic_example.csv"))
    psi = build_psi(cube, cfg)
    assert psi.grid.shape == (48, 10)
    assert psi.block_counts == (8, 5)
    assert psi.grid == expected


def test_psi_chain_matches_gather_on_example(cube, cfg):
    assert build_psi_chain(cube, cfg) == build_psi(cube, cfg)


@settings(max_examples=100)
@given(cubic_cases())
def test_psi_chain_matches_gather(case):
    c, cfg = case
    assert build_psi_chain(c, cfg) == build_psi(c, cfg)


@settings(max_examples=100)
@given(cubic_cases())
def test_psi_blocks_match_brute_force(case):
    c, cfg = case
    psi = build_psi(c, cfg)
    abar = enlarge_cube(c, cfg)
    n_v, n_h, n_z = cfg.window_counts(c)
    for v in range(n_v):
        for z in range(n_z):
            for h in range(n_h):
                assert psi.block(v * n_z + z, h) == brute_force_psi_block(abar, cfg, v, z, h)


def test_single_depth_window_stacks_slices(rng):
    c = MaskedCube(rng.normal(size=(2, 3, 3)))
    cfg = CubicConfig(2, 2, 2)
    psi = build_psi(c, cfg)
    assert psi.block_counts == (2, 2)
    block = psi.block(1, 0)
    assert block.sub(0, 0, 2, 2) == c.slices[0].sub(1, 0, 2, 2)
    assert block.sub(2, 0, 2, 2) == c.slices[1].sub(1, 0, 2, 2)


def test_psi_block_index_out_of_range(cube, cfg):
    with pytest.raises(ShapeError):
        build_psi(cube, cfg).block(8, 0)


# --- convolution ---

def test_cubic_example(cube, cfg):
    out = stp_conv3d(cube, golden.cubic_kernel(), cfg)
    expected = golden._scaled(golden.EXPECTED_CUBIC, 1 / 6)
    assert out.shape == (8, 5)
    np.testing.assert_allclose(out.data, expected.data, rtol=0, atol=1e-9)
    assert out.defined_count == 40


def test_cubic_example_rows_repeat_in_pairs(cube, cfg):
    out = stp_conv3d(cube, golden.cubic_kernel(), cfg)
    for v in range(4):
        assert out.sub(2 * v, 0, 1, 5) == out.sub(2 * v + 1, 0, 1, 5)


def test_cubic_kernel_vectorization():
    k = golden.cubic_kernel()
    assert k.shape == (2, 2, 3)
    assert k.vec.tolist() == [1, 0, 1, 2, 2, 3, 1, 1, -1, 3, 1, 3]
    assert k.vec == available_vector_3d(k.cube.slices)


def test_single_slice_reduces_to_2d(rng):
    a = MaskedGrid(rng.normal(size=(3, 4)), rng.random(size=(3, 4)) < 0.3)
    k = Kernel2D(MaskedGrid(rng.normal(size=(2, 2))))
    cube_out = stp_conv3d(MaskedCube.from_slices([a]),
                          CubicKernel(MaskedCube.from_slices([k.grid])),
                          CubicConfig(2, 2, 1, pad_v=1, pad_h=1))
    assert cube_out.allclose(stp_conv2d(a, k, ConvConfig(2, 2, pad_v=1, pad_h=1)), atol=1e-12)


def test_single_defined_voxel():
    data = np.zeros((2, 2, 2))
    mask = np.ones((2, 2, 2), dtype=bool)
    data[1, 0, 1], mask[1, 0, 1] = 5.0, False
    kernel = CubicKernel(MaskedCube(np.arange(1.0, 9.0).reshape(2, 2, 2)))
    out = stp_conv3d(MaskedCube(data, mask), kernel, CubicConfig(2, 2, 2))
    assert out.shape == (1, 1)
    assert out[0, 0] == pytest.approx(5.0 * 36 / 8)


def test_fully_defined_cube_is_correlation_over_size(rng):
    values = rng.normal(size=(3, 4, 4))
    kvals = rng.normal(size=(2, 2, 2))
    out = stp_conv3d(MaskedCube(values), CubicKernel(MaskedCube(kvals)), CubicConfig(2, 2, 2))
    assert out.shape == (3 * 2, 3)
    for v in range(3):
        for z in range(2):
            for h in range(3):
                corr = np.sum(values[z:z + 2, v:v + 2, h:h + 2] * kvals)
                assert out[v * 2 + z, h] == pytest.approx(corr / 8)


@settings(max_examples=100)
@given(cubic_cases())
def test_output_size_law(case):
    c, cfg = case
    kernel = CubicKernel(MaskedCube(np.ones((cfg.kernel_depth, cfg.kernel_rows, cfg.kernel_cols))))
    n_v, n_h, n_z = cfg.window_counts(c)
    out = stp_conv3d(c, kernel, cfg)
    assert out.shape == (n_v * n_z, n_h)
    psi = build_psi(c, cfg)
    for i in range(out.rows):
        for j in range(out.cols):
            block = psi.block(i, j)
            assert (out[i, j] is None) == (block.defined_count == 0)
            if block.defined_count:
                slices = [block.sub(k * cfg.kernel_rows, 0, cfg.kernel_rows, cfg.kernel_cols)
                          for k in range(cfg.kernel_depth)]
                assert out[i, j] == stp_inner(available_vector_3d(slices), kernel.vec)


def test_kernel_shape_must_match_config(cube):
    with pytest.raises(ShapeError):
        stp_conv3d(cube, golden.cubic_kernel(), CubicConfig(2, 2, 2, pad_v=1, pad_h=1, pad_depth=1))


def test_kernel_must_be_fully_defined():
    mask = np.zeros((1, 1, 2), dtype=bool)
    mask[0, 0, 1] = True
    with pytest.raises(InvalidValueError):
        CubicKernel(MaskedCube(np.ones((1, 1, 2)), mask))
