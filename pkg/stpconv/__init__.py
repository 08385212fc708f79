# -*- coding: utf-8 -*-
"""Dimension-free (semi-tensor product) convolution engine."""

from stpconv.conv_engine import (
    Conv1DConfig,
    FiniteSignal,
    Kernel2D,
    Variant,
    block_hadamard,
    classical_conv2d,
    classical_conv2d_rfm,
    discrete_conv1d,
    domain_conv1d,
    domain_conv1d_reflected,
    grad_input,
    grad_kernel,
    l1_norm,
    multi_filter_conv,
    stp_conv1d,
    stp_conv2d,
    stp_conv2d_rfm,
    tile_kernel,
)
from stpconv.cubic import (
    CubicConfig,
    CubicKernel,
    PsiMatrix,
    build_psi,
    build_psi_chain,
    dematricize,
    enlarge_cube,
    matricize,
    stp_conv3d,
)
from stpconv.errors import (
    ConfigError,
    DimensionOverflowError,
    InvalidValueError,
    ParseError,
    SelectorError,
    ShapeError,
    StpConvError,
)
from stpconv.grid import (
    ConvConfig,
    ConvMode,
    Fill,
    MaskedCube,
    MaskedGrid,
    available_vector,
    available_vector_3d,
    enlarge,
    window,
    window_count,
)
from stpconv.selectors import SelectorMatrix, rfm_2d, swap_matrix, xi
from stpconv.xdim_algebra import (
    EquivClass,
    XVector,
    canonicalize,
    equivalent,
    stp_inner,
    vadd,
    vsub,
    xdist,
    xnorm,
)
