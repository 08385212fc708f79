import os

import numpy as np
import pytest
from hypothesis import settings

from stpconv import golden
from stpconv.conv_engine import Kernel2D
from stpconv.grid import MaskedGrid

settings.register_profile("stpconv", deadline=None)
settings.load_profile("stpconv")

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
EXAMPLES_DIR = os.path.join(ROOT, "input_files", "examples")
DATA_DIR = os.path.join(os.path.dirname(__file__), "data")


@pytest.fixture
def examples_dir():
    return EXAMPLES_DIR


@pytest.fixture
def data_dir():
    return DATA_DIR


@pytest.fixture
def rng():
    return np.random.default_rng(20240117)


@pytest.fixture
def basic_kernel() -> Kernel2D:
    return Kernel2D.from_rows(golden.KERNEL_2D)


@pytest.fixture
def basic_image() -> MaskedGrid:
    return MaskedGrid.from_rows(golden.IMAGE_BASIC)


@pytest.fixture
def write_csv(tmp_path):
    """Write text to a file under tmp_path and return its path."""
    def _write(name: str, text: str) -> str:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)
    return _write
