# -*- coding: utf-8 -*-
"""
Job description and execution: one convolution from input files to an
output artifact (CSV or JSON file, or stdout).

run(job) never raises for bad input; it logs a one-line diagnostic and
returns the exit status (0 ok, 1 parse/config, 2 shape, 3 I/O).
"""

import logging
import sys
from dataclasses import asdict, dataclass, fields
from enum import Enum
from typing import Optional, TextIO, Union

import numpy as np

from stpconv import serialization as ser
from stpconv.conv_engine import (
    Conv1DConfig,
    FiniteSignal,
    Kernel2D,
    Variant,
    classical_conv2d,
    discrete_conv1d,
    domain_conv1d,
    stp_conv1d,
    stp_conv2d,
)
from stpconv.cubic import CubicConfig, CubicKernel, stp_conv3d
from stpconv.errors import ConfigError, ShapeError, StpConvError
from stpconv.grid import ConvConfig, ConvMode, MaskedCube, MaskedGrid

logger = logging.getLogger(__name__)

IO_ERROR_EXIT_CODE = 3

_INT_FIELDS = ("rf_rows", "rf_cols", "rf_depth", "pad_v", "pad_h", "pad_depth",
               "stride_v", "stride_h", "stride_depth")


class JobMode(str, Enum):
    CLASSICAL2D = "classical2d"
    STP1D = "stp1d"
    STP2D = "stp2d"
    STP3D = "stp3d"
    DOMAIN1D = "domain1d"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


@dataclass(frozen=True)
class JobSpec:
    """All inputs of one run; rf_* default to the kernel size when omitted."""

    mode: JobMode
    input: str
    kernel: str
    mask: Optional[str] = None
    output: Optional[str] = None
    format: OutputFormat = OutputFormat.CSV
    rf_rows: Optional[int] = None
    rf_cols: Optional[int] = None
    rf_depth: Optional[int] = None
    pad_v: int = 0
    pad_h: int = 0
    pad_depth: int = 0
    stride_v: int = 1
    stride_h: int = 1
    stride_depth: int = 1
    variant: Optional[Variant] = None

    def __post_init__(self):
        try:
            object.__setattr__(self, "mode", JobMode(self.mode))
            object.__setattr__(self, "format", OutputFormat(self.format))
            if self.variant is not None:
                object.__setattr__(self, "variant", Variant(self.variant))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        for name in ("input", "kernel"):
            if not getattr(self, name):
                raise ConfigError(f"job field '{name}' is required")
        for name in ("input", "kernel", "mask", "output"):
            value = getattr(self, name)
            if value is not None and not isinstance(value, str):
                raise ConfigError(f"job field '{name}' must be a path string, got {value!r}")
        for name in _INT_FIELDS:
            value = getattr(self, name)
            if value is None and name.startswith("rf_"):
                continue
            # bool is an int subclass but never a valid size
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"job field '{name}' must be an integer, got {value!r}")
        for name in ("stride_v", "stride_h", "stride_depth"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("pad_v", "pad_h", "pad_depth"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be nonnegative, got {getattr(self, name)}")
        for name in ("rf_rows", "rf_cols", "rf_depth"):
            if getattr(self, name) is not None and getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.variant is not None and self.mode is not JobMode.DOMAIN1D:
            raise ConfigError("variant only applies to domain1d jobs")

    @classmethod
    def from_dict(cls, d: dict) -> "JobSpec":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ConfigError(f"unknown job fields: {', '.join(unknown)}")
        missing = sorted(n for n in ("mode", "input", "kernel") if n not in d)
        if missing:
            raise ConfigError(f"missing job fields: {', '.join(missing)}")
        return cls(**d)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["mode"] = self.mode.value
        d["format"] = self.format.value
        d["variant"] = self.variant.value if self.variant else None
        return {k: v for k, v in d.items() if v is not None}


Result = Union[MaskedGrid, MaskedCube, FiniteSignal]


# ======================================================
# === EXECUTION ========================================
# ======================================================

def _image(job: JobSpec) -> MaskedGrid:
    a = ser.read_grid(job.input)
    if job.mask:
        a = a.with_mask(ser.mask_from_grid(ser.read_grid(job.mask), job.mask))
    return a


def _conv_config(job: JobSpec, k: Kernel2D, mode: ConvMode) -> ConvConfig:
    return ConvConfig(rf_rows=job.rf_rows or k.shape[0], rf_cols=job.rf_cols or k.shape[1],
                      pad_v=job.pad_v, pad_h=job.pad_h,
                      stride_v=job.stride_v, stride_h=job.stride_h, mode=mode)


def _run_stp1d(job: JobSpec) -> MaskedGrid:
    a = _image(job)
    k = ser.read_grid(job.kernel)
    if a.rows != 1 or k.rows != 1:
        raise ShapeError(f"rows: stp1d needs single-row input and kernel, got {a.rows} and {k.rows} rows")
    cfg = Conv1DConfig(window=job.rf_cols or k.cols, stride=job.stride_h, pad=job.pad_h)
    out = stp_conv1d(a.values[0], Kernel2D(k).vec, cfg)
    return MaskedGrid(np.ma.getdata(out).reshape(1, -1), np.ma.getmaskarray(out).reshape(1, -1))


def _run_stp3d(job: JobSpec) -> MaskedGrid:
    a = ser.read_cube(job.input)
    if job.mask:
        extra = ser.read_cube(job.mask)
        if extra.data.shape != a.data.shape:
            raise ShapeError(f"depth/rows/cols: mask {extra.data.shape} differs from input {a.data.shape}")
        masks = [ser.mask_from_grid(s, job.mask) for s in extra.slices]
        a = MaskedCube.from_slices([s.with_mask(m) for s, m in zip(a.slices, masks)])
    k = CubicKernel(ser.read_cube(job.kernel))
    s, t, depth = k.shape
    for name, rf, size in (("rf_rows", job.rf_rows, s), ("rf_cols", job.rf_cols, t),
                           ("rf_depth", job.rf_depth, depth)):
        if rf is not None and rf != size:
            raise ConfigError(f"{name} = {rf} must equal the kernel extent {size} in stp3d mode")
    cfg = CubicConfig(s, t, depth, pad_v=job.pad_v, pad_h=job.pad_h, pad_depth=job.pad_depth,
                      stride_v=job.stride_v, stride_h=job.stride_h, stride_depth=job.stride_depth)
    return stp_conv3d(a, k, cfg)


def execute(job: JobSpec) -> Result:
    """Read the job's inputs and compute its result; errors propagate."""
    logger.debug("executing %s job on %s", job.mode.value, job.input)
    if job.mode is JobMode.CLASSICAL2D:
        k = Kernel2D(ser.read_grid(job.kernel))
        return classical_conv2d(_image(job), k, _conv_config(job, k, ConvMode.CLASSICAL))
    if job.mode is JobMode.STP2D:
        k = Kernel2D(ser.read_grid(job.kernel))
        return stp_conv2d(_image(job), k, _conv_config(job, k, ConvMode.STP))
    if job.mode is JobMode.STP1D:
        return _run_stp1d(job)
    if job.mode is JobMode.STP3D:
        return _run_stp3d(job)
    f, w = ser.read_signal(job.input), ser.read_signal(job.kernel)
    if job.variant is not None:
        return discrete_conv1d(f, w, job.variant)
    return domain_conv1d(f, w)


def render(result: Result, fmt=OutputFormat.CSV) -> str:
    fmt = OutputFormat(fmt)
    if isinstance(result, FiniteSignal):
        return ser.signal_to_json_text(result) if fmt is OutputFormat.JSON else ser.signal_to_csv_text(result)
    if isinstance(result, MaskedCube):
        return ser.cube_to_json_text(result) if fmt is OutputFormat.JSON else ser.cube_to_csv_text(result)
    return ser.grid_to_json_text(result) if fmt is OutputFormat.JSON else ser.grid_to_csv_text(result)


def run(job: JobSpec, stdout: Optional[TextIO] = None) -> int:
    """Execute job and write its artifact; returns the exit status."""
    try:
        text = render(execute(job), job.format)
        if job.output:
            ser.write_text(text, job.output)
        else:
            (stdout or sys.stdout).write(text)
    except StpConvError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return exc.exit_code
    except OSError as exc:
        logger.error("I/O error: %s", exc)
        return IO_ERROR_EXIT_CODE
    return 0
