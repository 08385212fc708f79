# -*- coding: utf-8 -*-
"""
Command line front end.

    python -m stpconv run --mode stp2d --input a.csv --kernel k.csv --pad-v 1 --pad-h 1
    python -m stpconv run --job input_files/jobs/stp_basic.json
    python -m stpconv examples
    python -m stpconv batch --retry-errors

Exit codes: 0 ok, 1 parse/config error, 2 shape/stride mismatch, 3 I/O failure.
Results go to stdout unless --output is given; diagnostics go to stderr.
"""

import argparse
import logging
import os
import sys

from stpconv import batch
from stpconv.conv_engine import Variant
from stpconv.errors import ConfigError, StpConvError
from stpconv.golden import GOLDEN_ATOL, paper_examples
from stpconv.jobs import IO_ERROR_EXIT_CODE, JobMode, JobSpec, OutputFormat, run

logger = logging.getLogger("stpconv")


def configure_logging(verbose: bool) -> None:
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s",
                        stream=sys.stderr)


class _Parser(argparse.ArgumentParser):
    # usage errors are configuration errors (exit 1), not shape errors
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stpconv", description="STP convolution engine")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="Run one convolution job")
    p_run.add_argument("--job", help="JSON job file (other job flags are then ignored)")
    p_run.add_argument("--mode", choices=[m.value for m in JobMode])
    p_run.add_argument("--input", "-i", help="Input grid / cube / signal (CSV or JSON)")
    p_run.add_argument("--kernel", "-k", help="Kernel file (CSV or JSON)")
    p_run.add_argument("--mask", help="0/1 mask file, 1 = undefined")
    for name in ("pad-v", "pad-h", "pad-depth"):
        p_run.add_argument(f"--{name}", type=int, default=0)
    for name in ("stride-v", "stride-h", "stride-depth"):
        p_run.add_argument(f"--{name}", type=int, default=1)
    for name in ("rf-rows", "rf-cols", "rf-depth"):
        p_run.add_argument(f"--{name}", type=int, default=None,
                           help="receptive field extent (default: kernel extent)")
    p_run.add_argument("--variant", choices=[v.value for v in Variant],
                       help="discrete 1D convolution variant for domain1d inputs")
    p_run.add_argument("--format", choices=[f.value for f in OutputFormat], default="csv")
    p_run.add_argument("--output", "-o", help="Output file (default: stdout)")
    p_run.add_argument("--verbose", "-v", action="store_true", help="Enable debug logging")

    p_ex = sub.add_parser("examples", help="Recompute the embedded reference examples")
    p_ex.add_argument("--verbose", "-v", action="store_true", help="Enable debug logging")

    p_batch = sub.add_parser("batch", help="Run all job files of a folder in parallel")
    p_batch.add_argument("--folder", default=batch.JOB_FOLDER, help="Folder with *.json job files")
    p_batch.add_argument("--log", default=batch.CSV_LOGFILE, help="CSV run log")
    p_batch.add_argument("--workers", type=int, default=batch.MAX_WORKERS)
    p_batch.add_argument("--retry-errors", action="store_true",
                         help="Rerun only jobs whose last run failed")
    p_batch.add_argument("--include-done", action="store_true",
                         help="Include jobs already marked as OK in the log")
    p_batch.add_argument("--list-only", action="store_true",
                         help="Only list selected job files and exit")
    p_batch.add_argument("--verbose", "-v", action="store_true", help="Enable debug logging")
    return parser


def _job_from_args(args) -> JobSpec:
    if args.job:
        return batch.load_job_file(args.job)
    missing = [flag for flag, value in (("--mode", args.mode), ("--input", args.input),
                                        ("--kernel", args.kernel)) if not value]
    if missing:
        raise ConfigError(f"missing required flags: {' '.join(missing)}")
    return JobSpec(mode=args.mode, input=args.input, kernel=args.kernel, mask=args.mask,
                   output=args.output, format=args.format,
                   rf_rows=args.rf_rows, rf_cols=args.rf_cols, rf_depth=args.rf_depth,
                   pad_v=args.pad_v, pad_h=args.pad_h, pad_depth=args.pad_depth,
                   stride_v=args.stride_v, stride_h=args.stride_h, stride_depth=args.stride_depth,
                   variant=args.variant)


def cmd_run(args) -> int:
    try:
        job = _job_from_args(args)
    except StpConvError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return exc.exit_code
    except OSError as exc:
        logger.error("I/O error: %s", exc)
        return IO_ERROR_EXIT_CODE
    return run(job)


def cmd_examples(args) -> int:
    report = paper_examples()
    print(report.to_string(index=False))
    failed = report.loc[report["status"] != "PASS", "case"].tolist()
    if failed:
        logger.error("golden cases above %.0e: %s", GOLDEN_ATOL, ", ".join(failed))
        return 1
    return 0


def cmd_batch(args) -> int:
    job_files = batch.select_job_files(retry_only=args.retry_errors, include_done=args.include_done,
                                       folder=args.folder, logfile=args.log)
    if not job_files:
        print("No job files to run (selection empty or all done).")
        return 0

    print("Selection:")
    for f in job_files:
        print(" -", os.path.relpath(f, args.folder))
    if args.list_only:
        print(f"{len(job_files)} job file(s) selected (list-only).")
        return 0

    logger.info("running %d jobs with up to %d parallel threads", len(job_files), args.workers)
    results = batch.run_batch(job_files, max_workers=args.workers, logfile=args.log)
    failed = [r for r in results if r["status"] != "OK"]
    print(f"{len(results) - len(failed)} OK, {len(failed)} failed")
    return 1 if failed else 0


COMMANDS = {"run": cmd_run, "examples": cmd_examples, "batch": cmd_batch}


def main(argv=None) -> int:
    argv = argv if argv is not None else sys.argv[1:]
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    return COMMANDS[args.command](args)
