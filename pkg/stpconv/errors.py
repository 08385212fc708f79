# -*- coding: utf-8 -*-
"""
Exception hierarchy of stpconv.

Every error carries the exit code the command line reports for it:
1 = parse/config error, 2 = shape/stride mismatch. I/O failures are plain
OSError and map to 3 in the CLI.
"""


class StpConvError(Exception):
    exit_code = 1


class ParseError(StpConvError, ValueError):
    exit_code = 1


class ConfigError(StpConvError, ValueError):
    exit_code = 1


class ShapeError(StpConvError, ValueError):
    exit_code = 2


class DimensionOverflowError(ShapeError):
    """lcm of two dimensions exceeds the supported expansion bound."""


class SelectorError(ShapeError):
    """A 0/1 matrix that does not act as a pure selection."""


class InvalidValueError(StpConvError, ValueError):
    """Non-finite number where a finite real is required."""
