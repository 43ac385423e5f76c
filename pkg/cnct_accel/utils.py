#!/usr/bin/env python3
"""Shared configuration, logging and exceptions for cnct_accel."""

from dotenv import load_dotenv
import os
import logging
import psutil
import gc

load_dotenv()

LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')


def resolve_log_level(name, fallback='WARNING'):
    """Upper-cased level name, or ``fallback`` when it is not a logging level."""
    level = str(name).upper()
    return level if level in LOG_LEVELS else fallback


_requested_level = os.getenv('LOG_LEVEL', 'WARNING')

# Configure package logging early. Handlers go to stderr; stdout is for records.
logging.basicConfig(
    level=resolve_log_level(_requested_level),
    format='%(asctime)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)
if resolve_log_level(_requested_level, fallback=None) is None:
    logger.warning(f"Ignoring unknown LOG_LEVEL {_requested_level!r}; using WARNING")

# Package-level defaults, overridable through the environment or a .env file
DEFAULT_REL_TOL = float(os.getenv('CNCT_REL_TOL', 1e-14))
DEFAULT_ABS_FLOOR = float(os.getenv('CNCT_ABS_FLOOR', 1e-300))
DEFAULT_MAX_ORDER = int(os.getenv('CNCT_MAX_ORDER', 50))
DEFAULT_MAX_TERMS = int(os.getenv('CNCT_MAX_TERMS', 10_000_000))
LERCH_DISPATCH_THRESHOLD = float(os.getenv('LERCH_DISPATCH_THRESHOLD', 0.5))
QUANTILE_SCAN_CAP = int(os.getenv('QUANTILE_SCAN_CAP', 1_000_000_000))
MEMORY_WARN_MB = float(os.getenv('CNCT_MEMORY_WARN_MB', 400))
MEMORY_COLLECT_MB = float(os.getenv('CNCT_MEMORY_COLLECT_MB', 500))


class AccelError(Exception):
    """Base class for all errors raised by cnct_accel."""


class DomainError(AccelError, ValueError):
    """A precondition on the arguments or on the series terms is violated."""


class ConvergenceError(AccelError, ArithmeticError):
    """A summation could not reach its target within the allowed work.

    Attributes:
        best: best estimate available when the work stopped, or None
        terms_used: oracle evaluations spent, when known
    """

    def __init__(self, message, best=None, terms_used=None):
        super().__init__(message)
        self.best = best
        self.terms_used = terms_used


class BreakdownError(AccelError, ArithmeticError):
    """A transformation denominator vanished.

    Attributes:
        last_estimate: last estimate computed before the breakdown, or None
    """

    def __init__(self, message, last_estimate=None):
        super().__init__(message)
        self.last_estimate = last_estimate


def check_memory_usage():
    """Return the resident set size in MB.

    Memoized term caches (condensed series, the harmonic table) can grow large
    on slow series; above MEMORY_COLLECT_MB a collection is forced.
    """
    rss_mb = psutil.Process().memory_info().rss / 1024 / 1024

    if rss_mb > MEMORY_WARN_MB:
        logger.warning(f"Resident memory at {rss_mb:.1f} MB")
        if rss_mb > MEMORY_COLLECT_MB:
            collected = gc.collect()
            logger.info(f"Collected {collected} objects after memory passed {MEMORY_COLLECT_MB:.0f} MB")

    return rss_mb


# Shared mutable request counters for the HTTP surface (tests may supply their own)
stats = {
    'total_requests': 0,
    'successful_evaluations': 0,
    'failed_evaluations': 0,
    'non_converged': 0
}
