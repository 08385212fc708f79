# -*- coding: utf-8 -*-
"""
Write the reference fixtures (images, kernels, signals) to
input_files/examples/ and one JSON job file per reference run to
input_files/jobs/. Outputs of the jobs go to output/.
"""

import os
import sys

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
sys.path.insert(0, ROOT)

from stpconv import golden  # noqa: E402
from stpconv.batch import write_job_file  # noqa: E402
from stpconv.conv_engine import FiniteSignal  # noqa: E402
from stpconv.grid import MaskedGrid  # noqa: E402
from stpconv.jobs import JobSpec  # noqa: E402
from stpconv.serialization import (  # noqa: E402
    cube_to_csv_text,
    cube_to_json_text,
    grid_to_csv_text,
    signal_to_csv_text,
    write_text,
)

# ======================================================
# === USER CONFIGURATION ===============================
# ======================================================

EXAMPLE_FOLDER = os.path.join(ROOT, "input_files", "examples")
JOB_FOLDER = os.path.join(ROOT, "input_files", "jobs")

# paths inside job files are relative to the job file
EXAMPLES_REL = "../examples"
OUTPUT_REL = "../../output"

GRIDS = {
    "kernel_2x2.csv": golden.KERNEL_2D,
    "image_basic.csv": golden.IMAGE_BASIC,
    "image_irregular.csv": golden.IMAGE_IRREGULAR,
    "image_damaged.csv": golden.IMAGE_DAMAGED,
    "image_proportional.csv": golden.IMAGE_PROPORTIONAL,
    "signal_1d.csv": [[1, None, 2, 3, -1]],
    "kernel_1d.csv": [[1, 0.6, 0.4, 1.5]],
}

SIGNALS = {
    "signal_f.csv": {0: 1.0, 2: -1.0, 3: 2.0},
    "signal_w.csv": {0: 0.5, 1: 1.0},
}

PAD1 = dict(pad_v=1, pad_h=1)

JOBS = {
    "classical_basic": dict(mode="classical2d", input="image_basic.csv", kernel="kernel_2x2.csv", **PAD1),
    "stp_basic": dict(mode="stp2d", input="image_basic.csv", kernel="kernel_2x2.csv", **PAD1),
    "stp_irregular": dict(mode="stp2d", input="image_irregular.csv", kernel="kernel_2x2.csv", **PAD1),
    "stp_damaged": dict(mode="stp2d", input="image_damaged.csv", kernel="kernel_2x2.csv", **PAD1),
    "stp_proportional": dict(mode="stp2d", input="image_proportional.csv", kernel="kernel_2x2.csv",
                             rf_rows=3, rf_cols=3, stride_v=2, stride_h=2, **PAD1),
    "stp_cubic": dict(mode="stp3d", input="cube.json", kernel="cubic_kernel.json",
                      pad_depth=1, format="json", **PAD1),
    "stp1d_signal": dict(mode="stp1d", input="signal_1d.csv", kernel="kernel_1d.csv",
                         rf_cols=2, pad_h=1),
    "domain1d_signals": dict(mode="domain1d", input="signal_f.csv", kernel="signal_w.csv"),
}


# ======================================================
# === MAIN =============================================
# ======================================================

def write_fixtures():
    for name, rows in GRIDS.items():
        write_text(grid_to_csv_text(MaskedGrid.from_rows(rows)), os.path.join(EXAMPLE_FOLDER, name))
    for name, mapping in SIGNALS.items():
        write_text(signal_to_csv_text(FiniteSignal.from_mapping(mapping)),
                   os.path.join(EXAMPLE_FOLDER, name))
    cube = golden.cubic_image()
    write_text(cube_to_json_text(cube), os.path.join(EXAMPLE_FOLDER, "cube.json"))
    write_text(cube_to_csv_text(cube), os.path.join(EXAMPLE_FOLDER, "cube.csv"))
    write_text(cube_to_json_text(golden.cubic_kernel().cube),
               os.path.join(EXAMPLE_FOLDER, "cubic_kernel.json"))


def write_jobs():
    for name, fields in JOBS.items():
        fmt = fields.get("format", "csv")
        job = JobSpec(**{
            **fields,
            "input": f"{EXAMPLES_REL}/{fields['input']}",
            "kernel": f"{EXAMPLES_REL}/{fields['kernel']}",
            "output": f"{OUTPUT_REL}/{name}.{fmt}",
        })
        write_job_file(os.path.join(JOB_FOLDER, f"{name}.json"), job)


if __name__ == "__main__":
    write_fixtures()
    write_jobs()
    print(f"Wrote fixtures to {EXAMPLE_FOLDER} and {len(JOBS)} job files to {JOB_FOLDER}")
