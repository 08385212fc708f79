# -*- coding: utf-8 -*-
"""
Run all job files of input_files/jobs/ in parallel, with a CSV run log.

Same options as `python -m stpconv batch`:
- --include-done: recompute jobs already logged as OK
- --retry-errors: rerun only failed jobs
- --list-only: show the selection and exit
"""

import os
import sys

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
sys.path.insert(0, ROOT)

from stpconv.cli import main  # noqa: E402

# ======================================================
# === USER CONFIGURATION ===============================
# ======================================================

JOB_FOLDER = os.path.join(ROOT, "input_files", "jobs")
CSV_LOGFILE = os.path.join(ROOT, "run_log.csv")
MAX_WORKERS = 6

if __name__ == "__main__":
    os.chdir(ROOT)
    sys.exit(main(["batch", "--folder", JOB_FOLDER, "--log", CSV_LOGFILE,
                   "--workers", str(MAX_WORKERS), *sys.argv[1:]]))
