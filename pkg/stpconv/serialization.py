# -*- coding: utf-8 -*-
"""
CSV / JSON reading and writing of masked grids, cubes and finite signals.

CSV dialect: comma separated, '.' decimal point, no header, one line per grid
row, the token UNDEFINED_TOKEN for undefined cells. Cubes are slice blocks
separated by one blank line. Finite 1D signals are 'index,value' lines.

JSON: {"rows": [[...]]} for grids, {"slices": [[[...]]]} for cubes,
{"index": [...], "value": [...]} for signals; null marks an undefined cell.

Numbers are written with SIGNIFICANT_DIGITS significant digits, so CSV and
JSON output of the same result agree to the last written digit.
"""

import io
import json
import logging
import re
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from stpconv.conv_engine import FiniteSignal
from stpconv.errors import ParseError
from stpconv.grid import MaskedCube, MaskedGrid

logger = logging.getLogger(__name__)

# ======================================================
# === CONFIGURATION ====================================
# ======================================================

UNDEFINED_TOKEN = "x"
SIGNIFICANT_DIGITS = 12

PathLike = Union[str, Path]


# ======================================================
# === VALUES ===========================================
# ======================================================

def format_value(value) -> str:
    if value is None:
        return UNDEFINED_TOKEN
    # + 0.0 turns -0.0 into 0.0
    return f"{float(value) + 0.0:.{SIGNIFICANT_DIGITS}g}"


def _rounded(value):
    return None if value is None else float(format_value(value))


def parse_token(token, where: str = "") -> float | None:
    token = str(token).strip()
    if token == UNDEFINED_TOKEN:
        return None
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"{where}unknown token {token!r}") from None
    if not np.isfinite(value):
        raise ParseError(f"{where}non-finite value {token!r}")
    return value


# ======================================================
# === CSV ==============================================
# ======================================================

def _read_csv_rows(text: str, source: str) -> list[list]:
    if not text.strip():
        raise ParseError(f"{source}: no data")
    try:
        df = pd.read_csv(io.StringIO(text), header=None, dtype=str,
                         keep_default_na=False, skip_blank_lines=True)
    except pd.errors.ParserError as exc:
        raise ParseError(f"{source}: ragged rows ({exc})") from None
    rows = []
    for i, record in enumerate(df.itertuples(index=False), start=1):
        if any(not isinstance(v, str) or v.strip() == "" for v in record):
            raise ParseError(f"{source}: row {i} has missing cells")
        rows.append([parse_token(v, f"{source}: row {i}: ") for v in record])
    return rows


def grid_from_csv_text(text: str, source: str = "<csv>") -> MaskedGrid:
    return MaskedGrid.from_rows(_read_csv_rows(text, source))


def cube_from_csv_text(text: str, source: str = "<csv>") -> MaskedCube:
    blocks = [b for b in re.split(r"\n[ \t]*\n", text.strip()) if b.strip()]
    if not blocks:
        raise ParseError(f"{source}: no data")
    slices = [grid_from_csv_text(b, f"{source}: slice {k}") for k, b in enumerate(blocks, start=1)]
    return MaskedCube.from_slices(slices)


def signal_from_csv_text(text: str, source: str = "<csv>") -> FiniteSignal:
    rows = _read_csv_rows(text, source)
    if any(len(r) != 2 for r in rows):
        raise ParseError(f"{source}: signal rows must be 'index,value'")
    support = []
    for i, (n, _) in enumerate(rows, start=1):
        if n is None or n != int(n):
            raise ParseError(f"{source}: row {i}: index must be an integer")
        if int(n) in support:
            raise ParseError(f"{source}: row {i}: duplicate index {int(n)}")
        support.append(int(n))
    if any(v is None for _, v in rows):
        raise ParseError(f"{source}: signal values must be defined")
    return FiniteSignal.from_mapping(dict(zip(support, (v for _, v in rows))))


def grid_to_csv_text(grid: MaskedGrid) -> str:
    df = pd.DataFrame([[format_value(v) for v in row] for row in grid.to_rows()])
    return df.to_csv(header=False, index=False, lineterminator="\n")


def cube_to_csv_text(cube: MaskedCube) -> str:
    return "\n".join(grid_to_csv_text(s) for s in cube.slices)


def signal_to_csv_text(signal: FiniteSignal) -> str:
    df = pd.DataFrame({"index": signal.support, "value": [format_value(v) for v in signal.values]})
    return df.to_csv(header=False, index=False, lineterminator="\n")


# ======================================================
# === JSON =============================================
# ======================================================

def _load_json(text: str, source: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def _json_rows(rows, source: str) -> list[list]:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise ParseError(f"{source}: expected a list of rows")
    out = []
    for i, row in enumerate(rows, start=1):
        parsed = []
        for v in row:
            if v is None:
                parsed.append(None)
            elif isinstance(v, (int, float)) and not isinstance(v, bool) and np.isfinite(v):
                parsed.append(float(v))
            elif isinstance(v, str):
                parsed.append(parse_token(v, f"{source}: row {i}: "))
            else:
                raise ParseError(f"{source}: row {i}: unknown value {v!r}")
        out.append(parsed)
    return out


def grid_from_json_text(text: str, source: str = "<json>") -> MaskedGrid:
    obj = _load_json(text, source)
    rows = obj.get("rows") if isinstance(obj, dict) else obj
    return MaskedGrid.from_rows(_json_rows(rows, source))


def cube_from_json_text(text: str, source: str = "<json>") -> MaskedCube:
    obj = _load_json(text, source)
    if not isinstance(obj, dict) or not isinstance(obj.get("slices"), list):
        raise ParseError(f"{source}: expected an object with a 'slices' list")
    slices = [MaskedGrid.from_rows(_json_rows(s, f"{source}: slice {k}"))
              for k, s in enumerate(obj["slices"], start=1)]
    return MaskedCube.from_slices(slices)


def signal_from_json_text(text: str, source: str = "<json>") -> FiniteSignal:
    obj = _load_json(text, source)
    if not isinstance(obj, dict) or "index" not in obj or "value" not in obj:
        raise ParseError(f"{source}: expected an object with 'index' and 'value'")
    index, value = obj["index"], obj["value"]
    if not isinstance(index, list) or not isinstance(value, list) or len(index) != len(value):
        raise ParseError(f"{source}: 'index' and 'value' must be lists of equal length")
    if not index:
        raise ParseError(f"{source}: no data")
    if any(not isinstance(n, int) or isinstance(n, bool) for n in index):
        raise ParseError(f"{source}: signal indices must be integers")
    for n, v in zip(index, value):
        if not isinstance(v, (int, float)) or isinstance(v, bool) or not np.isfinite(v):
            raise ParseError(f"{source}: index {n}: signal values must be finite numbers, got {v!r}")
    if len(set(index)) != len(index):
        dup = next(n for n in index if index.count(n) > 1)
        raise ParseError(f"{source}: duplicate index {dup}")
    return FiniteSignal.from_mapping({n: float(v) for n, v in zip(index, value)})


def grid_to_json_text(grid: MaskedGrid) -> str:
    return json.dumps({"rows": [[_rounded(v) for v in row] for row in grid.to_rows()]}) + "\n"


def cube_to_json_text(cube: MaskedCube) -> str:
    slices = [[[_rounded(v) for v in row] for row in s.to_rows()] for s in cube.slices]
    return json.dumps({"slices": slices}) + "\n"


def signal_to_json_text(signal: FiniteSignal) -> str:
    return json.dumps({"index": list(signal.support),
                       "value": [_rounded(v) for v in signal.values]}) + "\n"


# ======================================================
# === FILES ============================================
# ======================================================

def _is_json(path: PathLike) -> bool:
    return Path(path).suffix.lower() == ".json"


def _read_text(path: PathLike) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError:
        raise ParseError(f"{path}: not valid UTF-8 text") from None


def read_grid(path: PathLike) -> MaskedGrid:
    text = _read_text(path)
    grid = grid_from_json_text(text, str(path)) if _is_json(path) else grid_from_csv_text(text, str(path))
    logger.debug("read %dx%d grid from %s", grid.rows, grid.cols, path)
    return grid


def read_cube(path: PathLike) -> MaskedCube:
    text = _read_text(path)
    cube = cube_from_json_text(text, str(path)) if _is_json(path) else cube_from_csv_text(text, str(path))
    logger.debug("read cube eta=%d m=%d n=%d from %s", cube.eta, cube.m, cube.n, path)
    return cube


def read_signal(path: PathLike) -> FiniteSignal:
    text = _read_text(path)
    return signal_from_json_text(text, str(path)) if _is_json(path) else signal_from_csv_text(text, str(path))


def mask_from_grid(grid: MaskedGrid, source: str = "mask") -> np.ndarray:
    """0/1 grid (1 = undefined) as a boolean mask."""
    if not grid.is_fully_defined or not np.isin(grid.data, (0.0, 1.0)).all():
        raise ParseError(f"{source}: mask cells must be 0 or 1")
    return grid.data.astype(bool)


def write_text(text: str, path: PathLike) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="")
    logger.debug("wrote %s", path)
