# -*- coding: utf-8 -*-
"""
Embedded reference cases: fixture images, kernels and expected output
matrices of the six worked examples (classical, STP, irregular, damaged,
proportional, cubic), and the report that recomputes them.

None marks an undefined cell in every fixture below.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
import pandas as pd

from stpconv.conv_engine import Kernel2D, classical_conv2d, stp_conv2d
from stpconv.cubic import CubicConfig, CubicKernel, stp_conv3d
from stpconv.grid import ConvConfig, ConvMode, MaskedCube, MaskedGrid

logger = logging.getLogger(__name__)

# ======================================================
# === CONFIGURATION ====================================
# ======================================================

GOLDEN_ATOL = 1e-9

X = None

# ======================================================
# === FIXTURES =========================================
# ======================================================

KERNEL_2D = [[1.0, 0.4],
             [0.6, 1.5]]

IMAGE_BASIC = [[1, 2, -1, -2],
               [-3, -2, 1, 3],
               [2, -2, 1, -1]]

IMAGE_IRREGULAR = [[X, 1, -1, X],
                   [-2, 1, 2, 1],
                   [-3, 2, 3, X],
                   [2, -2, X, X]]

IMAGE_DAMAGED = [[1, -1, 1, 2],
                 [2, -1, X, 3],
                 [-1, 3, 2, 1]]

IMAGE_PROPORTIONAL = [[1, -1, 3, 2, 1],
                      [2, 1, -2, -1, 2],
                      [1, 3, 2, 1, 1],
                      [-1, -2, 1, 2, -1],
                      [2, 3, -3, -2, -1]]

CUBE_SLICES = [[[2, 1, 3, 2],
                [1, 3, 2, 2],
                [3, 2, 0, 1]],
               [[1, 1, 2, 3],
                [4, 2, 3, 4],
                [4, 0, 3, 3]]]

# matricized (depth*rows) x cols form of the 2 x 2 x 3 kernel
CUBIC_KERNEL_MATRICIZED = [[1, 1],
                           [0, 1],
                           [1, -1],
                           [2, 3],
                           [2, 1],
                           [3, 3]]

EXPECTED_CLASSICAL = [[1.5, 3.6, -0.3, -3.6, -1.2],
                      [-4.1, -3.0, 1.9, 3.3, -0.2],
                      [1.8, -5.6, -1.3, 1.3, 2.4],
                      [0.8, 1.2, -1.6, 0.6, -1.0]]

# scaled by 1/4
EXPECTED_STP = [[3.5, 5.4, 1.3, -5.4, -7.0],
                [-4.1, -3.0, 1.9, 3.3, 2.5],
                [-1.0, -5.6, -1.3, 1.3, 2.9],
                [7.0, -0.6, -1.3, -0.3, -3.5]]

# scaled by 1/12
EXPECTED_IRREGULAR = [[X, 10.5, -0.9, -10.5, X],
                      [-21.0, -0.3, 12.6, 5.3, 10.5],
                      [-26.7, -1.2, 22.5, 18.1, 10.5],
                      [-3.0, -12.0, 17.9, 31.5, X],
                      [21.0, -1.8, -21.0, X, X]]

# scaled by 1/12
EXPECTED_DAMAGED = [[10.5, -0.9, 0.9, 16.2, 21.0],
                    [16.2, 0.9, -0.7, 22.3, 26.7],
                    [3.9, 16.5, 12.2, 18.1, 20.1],
                    [-10.5, 12.3, 25.8, 15.3, 10.5]]

# scaled by 1/36
EXPECTED_PROPORTIONAL = [[29.7, 7.2, 43.2],
                         [14.7, 26.5, 7.5],
                         [35.1, -7.8, -9.9]]

# scaled by 1/6; depth windows of the same spatial window repeat
_CUBIC_ROWS = [[13.0, 9.5, 13.0, 21.5, 21.0],
               [20.0, 16.25, 18.0, 24.75, 24.5],
               [27.5, 21.25, 17.5, 25.0, 18.0],
               [29.5, 18.0, 12.5, 21.5, 16.5]]
EXPECTED_CUBIC = [row for row in _CUBIC_ROWS for _ in range(2)]


def _scaled(rows, factor: float) -> MaskedGrid:
    return MaskedGrid.from_rows([[None if v is None else v * factor for v in r] for r in rows])


def basic_kernel() -> Kernel2D:
    return Kernel2D.from_rows(KERNEL_2D)


def cubic_image() -> MaskedCube:
    return MaskedCube(np.array(CUBE_SLICES, dtype=float))


def cubic_kernel() -> CubicKernel:
    return CubicKernel.from_matricized(MaskedGrid.from_rows(CUBIC_KERNEL_MATRICIZED), depth=3)


def cubic_config() -> CubicConfig:
    return CubicConfig.from_increments(2, 2, 3, delta_m=2, delta_n=2, delta_eta=2)


# ======================================================
# === CASES ============================================
# ======================================================

@dataclass(frozen=True)
class GoldenCase:
    name: str
    compute: Callable[[], MaskedGrid]
    expected: MaskedGrid


def golden_cases() -> list[GoldenCase]:
    k = basic_kernel()
    pad1 = dict(rf_rows=2, rf_cols=2, pad_v=1, pad_h=1)
    return [
        GoldenCase("classical",
                   lambda: classical_conv2d(MaskedGrid.from_rows(IMAGE_BASIC), k,
                                            ConvConfig(**pad1, mode=ConvMode.CLASSICAL)),
                   MaskedGrid.from_rows(EXPECTED_CLASSICAL)),
        GoldenCase("stp",
                   lambda: stp_conv2d(MaskedGrid.from_rows(IMAGE_BASIC), k, ConvConfig(**pad1)),
                   _scaled(EXPECTED_STP, 1 / 4)),
        GoldenCase("irregular",
                   lambda: stp_conv2d(MaskedGrid.from_rows(IMAGE_IRREGULAR), k, ConvConfig(**pad1)),
                   _scaled(EXPECTED_IRREGULAR, 1 / 12)),
        GoldenCase("damaged",
                   lambda: stp_conv2d(MaskedGrid.from_rows(IMAGE_DAMAGED), k, ConvConfig(**pad1)),
                   _scaled(EXPECTED_DAMAGED, 1 / 12)),
        GoldenCase("proportional",
                   lambda: stp_conv2d(MaskedGrid.from_rows(IMAGE_PROPORTIONAL), k,
                                      ConvConfig(rf_rows=3, rf_cols=3, pad_v=1, pad_h=1,
                                                 stride_v=2, stride_h=2)),
                   _scaled(EXPECTED_PROPORTIONAL, 1 / 36)),
        GoldenCase("cubic",
                   lambda: stp_conv3d(cubic_image(), cubic_kernel(), cubic_config()),
                   _scaled(EXPECTED_CUBIC, 1 / 6)),
    ]


def max_deviation(actual: MaskedGrid, expected: MaskedGrid) -> float:
    """Largest absolute difference; inf when shapes or undefined patterns differ."""
    if actual.shape != expected.shape or not np.array_equal(actual.mask, expected.mask):
        return float("inf")
    defined = ~expected.mask
    if not defined.any():
        return 0.0
    return float(np.max(np.abs(actual.data[defined] - expected.data[defined])))


def paper_examples(cases: Optional[Sequence[GoldenCase]] = None,
                   atol: float = GOLDEN_ATOL) -> pd.DataFrame:
    """Recompute every case; one row per case with its max deviation and PASS/FAIL."""
    records = []
    for case in golden_cases() if cases is None else cases:
        deviation = max_deviation(case.compute(), case.expected)
        status = "PASS" if deviation <= atol else "FAIL"
        logger.debug("golden case %s: max deviation %.3g", case.name, deviation)
        records.append({"case": case.name, "max_abs_dev": deviation, "status": status})
    return pd.DataFrame.from_records(records, columns=["case", "max_abs_dev", "status"])
