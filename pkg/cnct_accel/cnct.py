"""Summation drivers: the combined nonlinear-condensation transformation (CNCT),
direct delta acceleration, and plain term-by-term summation.

Each driver returns an AccelResult. Running out of order or oracle budget,
or a breakdown of the delta transformation, is reported through
``converged=False`` together with the best estimate reached; only violated
preconditions raise (DomainError).
"""

import logging
import math
import time
from dataclasses import dataclass, replace
from typing import List, NamedTuple

from .condense import INNER_TOL_FACTOR, CondensedSeries, iter_condensed_partial_sums
from .kernel import DeltaAccelerator, TermOracle, is_finite
from .utils import (ConvergenceError, DomainError, DEFAULT_ABS_FLOOR, DEFAULT_MAX_ORDER,
                    DEFAULT_MAX_TERMS, DEFAULT_REL_TOL)

logger = logging.getLogger(__name__)

METHOD_CNCT = 'cnct'
METHOD_DELTA = 'delta_direct'
METHOD_DIRECT = 'direct'

# Direct summation heuristic: a term is negligible when SAFETY_FACTOR * |a(n)|
# sits below the tolerance; NEGLIGIBLE_RUN consecutive ones stop the sum.
DIRECT_SAFETY_FACTOR = 10
DIRECT_NEGLIGIBLE_RUN = 3


@dataclass(frozen=True)
class ToleranceSpec:
    rel_tol: float = DEFAULT_REL_TOL
    abs_floor: float = DEFAULT_ABS_FLOOR
    max_order: int = DEFAULT_MAX_ORDER
    max_terms: int = DEFAULT_MAX_TERMS

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be positive, got {self.rel_tol!r}")
        if not self.abs_floor >= 0:
            raise DomainError(f"abs_floor must be nonnegative, got {self.abs_floor!r}")
        if self.max_order < 2:
            raise DomainError(f"max_order must be at least 2, got {self.max_order!r}")
        if self.max_terms < 1:
            raise DomainError(f"max_terms must be at least 1, got {self.max_terms!r}")

    def threshold(self, value):
        """Absolute tolerance around ``value``."""
        return self.rel_tol * max(abs(value), self.abs_floor)


@dataclass(frozen=True)
class AccelResult:
    """
    Outcome of a summation.

    ``order`` is the transformation order reached (-1 for direct summation)
    and ``terms_used`` the exact number of oracle evaluations.
    """
    value: float
    error_estimate: float
    order: int
    terms_used: int
    converged: bool
    method: str

    def scaled(self, factor):
        """Result for the series multiplied by ``factor``."""
        return replace(self, value=factor * self.value, error_estimate=abs(factor) * self.error_estimate)


class TableRow(NamedTuple):
    order: int
    delta: float
    terms_used: int


def _resolve(tol):
    return tol if tol is not None else ToleranceSpec()


def _has_converged(estimates, tol):
    if len(estimates) < 3:
        return False
    bound = tol.threshold(estimates[-1])
    return (abs(estimates[-1] - estimates[-2]) <= bound
            and abs(estimates[-2] - estimates[-3]) <= bound)


def _error_estimate(estimates):
    diffs = [abs(estimates[i] - estimates[i - 1]) for i in range(max(1, len(estimates) - 2), len(estimates))]
    return max(diffs) if diffs else math.inf


def _accelerate(next_sum, calls, tol, method):
    """
    Feed partial sums next_sum(0), next_sum(1), ... into a delta accelerator.

    Args:
        next_sum: callable returning partial sum n (may raise ConvergenceError
            when the oracle budget runs out)
        calls: callable returning the oracle evaluations spent so far
        tol: ToleranceSpec
        method: method tag for the result

    Returns:
        AccelResult
    """
    acc = DeltaAccelerator(beta=1)
    last_sum = None
    converged = False
    try:
        for n in range(tol.max_order + 2):
            last_sum = next_sum(n)
            acc.push(last_sum)
            if acc.broken:
                break
            if acc.estimates:
                logger.debug(f"{method} order {acc.order}: {acc.estimate!r}")
            if _has_converged(acc.estimates, tol):
                converged = True
                break
    except ConvergenceError as e:
        logger.warning(f"{method} stopped early: {e}")

    value = acc.estimate
    if value is None:
        value = last_sum if last_sum is not None else 0.0
        error = math.inf
    else:
        error = _error_estimate(acc.estimates)

    if not converged:
        logger.warning(f"{method} did not converge (order {acc.order}, {calls()} terms, state {acc.state})")
    return AccelResult(value, error, acc.order, calls(), converged, method)


def cnct_sum(oracle: TermOracle, tol: ToleranceSpec = None) -> AccelResult:
    """
    Sum a nonnegative-term series with the CNCT.

    Condensed partial sums S_0, S_1, ... are pushed into a delta accelerator
    (beta = 1); convergence is declared when two consecutive diagonal
    differences are within ``tol.rel_tol``.

    Args:
        oracle: term oracle with nonnegative terms
        tol: ToleranceSpec (defaults from the environment)

    Returns:
        AccelResult with method 'cnct'
    """
    tol = _resolve(tol)
    start = time.time()
    cs = CondensedSeries(oracle, inner_rel_tol=tol.rel_tol * INNER_TOL_FACTOR, call_budget=tol.max_terms)
    sums = iter_condensed_partial_sums(cs)

    result = _accelerate(lambda j: next(sums), lambda: cs.calls, tol, METHOD_CNCT)
    elapsed = time.time() - start
    logger.info(f"cnct_sum finished in {elapsed:.3f}s: order {result.order}, "
                f"{result.terms_used} terms, converged={result.converged}")
    return result


def cnct_table(oracle: TermOracle, n_max: int, tol: ToleranceSpec = None) -> List[TableRow]:
    """
    Diagonal CNCT estimates for orders 0..n_max.

    Row 0 is the first condensed term A_0. A breakdown or an exhausted
    oracle budget ends the table early (with a warning).

    Returns:
        list of TableRow(order, delta, terms_used)
    """
    if n_max < 0:
        raise DomainError(f"n_max must be nonnegative, got {n_max}")
    tol = _resolve(tol)
    cs = CondensedSeries(oracle, inner_rel_tol=tol.rel_tol * INNER_TOL_FACTOR, call_budget=tol.max_terms)
    acc = DeltaAccelerator(beta=1)
    rows = []
    try:
        for _, total in zip(range(n_max + 2), iter_condensed_partial_sums(cs)):
            acc.push(total)
            if acc.broken:
                logger.warning(f"cnct_table stopped at order {acc.order} after breakdown")
                break
            if acc.estimate is not None:
                rows.append(TableRow(acc.order, acc.estimate, cs.calls))
    except ConvergenceError as e:
        logger.warning(f"cnct_table stopped at order {len(rows) - 1}: {e}")
    return rows


def delta_sum(oracle: TermOracle, tol: ToleranceSpec = None) -> AccelResult:
    """Apply the delta transformation directly to the partial sums of the series."""
    tol = _resolve(tol)
    start = time.time()
    calls = 0
    total = 0.0

    def next_sum(n):
        nonlocal calls, total
        if calls >= tol.max_terms:
            raise ConvergenceError(f"oracle budget of {tol.max_terms} evaluations exhausted", total)
        calls += 1
        term = oracle(n)
        if not is_finite(term):
            raise DomainError(f"term a({n}) is not finite: {term!r}")
        total = total + term
        return total

    result = _accelerate(next_sum, lambda: calls, tol, METHOD_DELTA)
    elapsed = time.time() - start
    logger.info(f"delta_sum finished in {elapsed:.3f}s: order {result.order}, "
                f"{result.terms_used} terms, converged={result.converged}")
    return result


def direct_sum(oracle: TermOracle, tol: ToleranceSpec = None) -> AccelResult:
    """
    Add terms one by one (baseline).

    Stops when DIRECT_NEGLIGIBLE_RUN consecutive terms satisfy
    10 * |a(n)| <= rel_tol * max(|s_n|, abs_floor), or at ``tol.max_terms``.
    The stopping rule is a heuristic.
    """
    tol = _resolve(tol)
    start = time.time()
    total = 0.0
    term = math.inf
    run = 0
    terms_used = 0
    converged = False
    for n in range(tol.max_terms):
        term = oracle(n)
        terms_used += 1
        if not is_finite(term):
            raise DomainError(f"term a({n}) is not finite: {term!r}")
        total = total + term
        if DIRECT_SAFETY_FACTOR * abs(term) <= tol.threshold(total):
            run += 1
        else:
            run = 0
        if run >= DIRECT_NEGLIGIBLE_RUN:
            converged = True
            break

    elapsed = time.time() - start
    if converged:
        logger.info(f"direct_sum converged in {elapsed:.3f}s after {terms_used} terms")
    else:
        logger.warning(f"direct_sum reached max_terms={tol.max_terms} in {elapsed:.3f}s without converging")
    return AccelResult(total, DIRECT_SAFETY_FACTOR * abs(term), -1, terms_used, converged, METHOD_DIRECT)
