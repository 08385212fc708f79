# -*- coding: utf-8 -*-
"""
Run many JSON job files in parallel and keep a CSV run log.

- Jobs already logged as OK are skipped unless include_done is set.
- retry_only reruns only the jobs whose last logged status is not OK.
- A failing job never stops the batch; its exit code goes into the log.
"""

import csv
import glob
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor, as_completed
from datetime import datetime
from typing import Optional, Sequence

from stpconv.errors import ParseError, StpConvError
from stpconv.jobs import IO_ERROR_EXIT_CODE, JobSpec, run

logger = logging.getLogger(__name__)

# ======================================================
# === USER CONFIGURATION ===============================
# ======================================================

JOB_FOLDER = "input_files/jobs"
OUTPUT_FOLDER = "output"
MAX_WORKERS = 6
CSV_LOGFILE = "run_log.csv"

LOG_FIELDS = ["job_file", "output", "start_time", "end_time",
              "duration_sec", "exit_code", "status"]


# ======================================================
# === JOB FILES ========================================
# ======================================================

def write_job_file(path: str, job: JobSpec) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(job.to_dict(), f, indent=2)
        f.write("\n")


def load_job_file(path: str) -> JobSpec:
    """Read a job file; relative paths inside it are taken relative to the file."""
    with open(path, encoding="utf-8") as f:
        try:
            d = json.load(f)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON ({exc.msg})") from None
        except UnicodeDecodeError:
            raise ParseError(f"{path}: not valid UTF-8 text") from None
    if not isinstance(d, dict):
        raise ParseError(f"{path}: a job file holds one JSON object")
    base = os.path.dirname(os.path.abspath(path))
    for key in ("input", "kernel", "mask", "output"):
        # non-string values are left for JobSpec to reject
        if isinstance(d.get(key), str) and d[key] and not os.path.isabs(d[key]):
            d[key] = os.path.normpath(os.path.join(base, d[key]))
    return JobSpec.from_dict(d)


def list_job_files(folder: str = JOB_FOLDER) -> list[str]:
    return sorted(glob.glob(os.path.join(folder, "*.json")))


# ======================================================
# === RUN LOG ==========================================
# ======================================================

def read_logfile(logfile: str = CSV_LOGFILE) -> list[dict]:
    if not os.path.isfile(logfile):
        return []
    with open(logfile, newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f))


def write_results_to_csv(results: Sequence[dict], logfile: str = CSV_LOGFILE, mode: str = "a") -> None:
    file_exists = os.path.isfile(logfile)
    with open(logfile, mode, newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=LOG_FIELDS)
        if not file_exists or mode == "w":
            writer.writeheader()
        for res in results:
            writer.writerow(res)


def select_job_files(retry_only: bool = False, include_done: bool = False,
                     folder: str = JOB_FOLDER, logfile: str = CSV_LOGFILE) -> list[str]:
    """Job files of folder, filtered against the run log.

    Only the latest log entry of a job counts.
    """
    files = list_job_files(folder)
    last_status = {}
    for row in read_logfile(logfile):
        last_status[os.path.abspath(row["job_file"])] = row["status"]

    if retry_only:
        return [f for f in files if last_status.get(os.path.abspath(f), "OK") != "OK"]
    if include_done:
        return files
    return [f for f in files if last_status.get(os.path.abspath(f)) != "OK"]


# ======================================================
# === CORE FUNCTIONS ===================================
# ======================================================

def run_job_file(job_file: str) -> dict:
    job_file = os.path.abspath(job_file)
    start_time = datetime.now()
    output = ""
    try:
        job = load_job_file(job_file)
        output = job.output or ""
        exit_code = run(job)
    except StpConvError as exc:
        logger.error("%s: %s", os.path.basename(job_file), exc)
        exit_code = exc.exit_code
    except OSError as exc:
        logger.error("%s: %s", os.path.basename(job_file), exc)
        exit_code = IO_ERROR_EXIT_CODE
    end_time = datetime.now()

    return {
        "job_file": job_file,
        "output": output,
        "start_time": start_time.isoformat(),
        "end_time": end_time.isoformat(),
        "duration_sec": (end_time - start_time).total_seconds(),
        "exit_code": exit_code,
        "status": "OK" if exit_code == 0 else "ERROR",
    }


def run_batch(job_files: Sequence[str], max_workers: int = MAX_WORKERS,
              logfile: Optional[str] = CSV_LOGFILE) -> list[dict]:
    """Run job_files on a thread pool; records come back sorted by job file."""
    results = []
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        future_to_file = {executor.submit(run_job_file, f): f for f in job_files}
        for future in as_completed(future_to_file):
            res = future.result()
            results.append(res)
            name = os.path.basename(res["job_file"])
            if res["status"] == "OK":
                logger.info("%s finished in %.3fs", name, res["duration_sec"])
            else:
                logger.error("%s FAILED (exit code %s)", name, res["exit_code"])
    results.sort(key=lambda r: r["job_file"])
    if logfile:
        write_results_to_csv(results, logfile)
    return results
