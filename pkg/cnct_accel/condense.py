"""Van Wijngaarden condensation of nonnegative-term series.

A series sum_k a(k) with nonnegative terms is rewritten as the alternating
series sum_j (-1)^j A_j with

    A_j = sum_i 2^i * a(2^i * (j + 1) - 1)

Input indices are 0-based and held as Python integers; the oracle receives
the exact integer index.
"""

import logging
from itertools import count, islice
from typing import Iterator, List

from .kernel import TermOracle, epsilon_estimate, is_finite
from .utils import ConvergenceError, DomainError, DEFAULT_REL_TOL

logger = logging.getLogger(__name__)

MAX_INDEX = 2 ** 62
# inner sums are truncated this much below the outer target
INNER_TOL_FACTOR = 1e-2
# relative agreement required between two tail extrapolations at the index cap
TAIL_AGREEMENT = 1e-12


class CountingOracle:
    """Term oracle wrapper that counts its evaluations."""

    def __init__(self, oracle):
        self.oracle = oracle
        self.calls = 0

    def __call__(self, k):
        self.calls += 1
        return self.oracle(k)


def scaled(oracle: TermOracle, factor) -> TermOracle:
    """Multiply every term of ``oracle`` by ``factor``."""
    if factor == 1:
        return oracle

    def scaled_oracle(k):
        return factor * oracle(k)

    return scaled_oracle


class CondensedSeries:
    """
    Memoizing producer of condensed terms A_j.

    A single CondensedSeries is single-writer: do not share one between
    threads. ``calls`` counts every oracle evaluation exactly once.
    """

    def __init__(self, oracle: TermOracle, inner_rel_tol=DEFAULT_REL_TOL * INNER_TOL_FACTOR,
                 max_index=MAX_INDEX, call_budget=None):
        if not inner_rel_tol > 0:
            raise DomainError(f"inner_rel_tol must be positive, got {inner_rel_tol!r}")
        if max_index < 0:
            raise DomainError(f"max_index must be nonnegative, got {max_index!r}")
        self.oracle = oracle
        self.inner_rel_tol = inner_rel_tol
        self.max_index = max_index
        self.call_budget = call_budget
        self.memo = {}
        self.calls = 0

    def evaluate(self, index):
        """Evaluate one input term, enforcing the budget and nonnegativity."""
        if self.call_budget is not None and self.calls >= self.call_budget:
            raise ConvergenceError(f"oracle budget of {self.call_budget} evaluations exhausted")
        self.calls += 1
        term = self.oracle(index)
        if not is_finite(term):
            raise DomainError(f"term a({index}) is not finite: {term!r}")
        if term < 0:
            raise DomainError(f"condensation needs nonnegative terms, a({index}) = {term!r}")
        return term


def _extrapolate_tail(inner, j):
    """Aitken-extrapolate inner partial sums that hit the index cap."""
    if len(inner) < 4:
        raise ConvergenceError(f"inner sum for A_{j} reached the index cap after {len(inner)} terms",
                               inner[-1] if inner else None)

    latest = epsilon_estimate(inner[-3:])
    earlier = epsilon_estimate(inner[-4:-1])
    if abs(latest - earlier) > TAIL_AGREEMENT * abs(latest):
        raise ConvergenceError(f"inner sum for A_{j} does not decay within the index cap", latest)

    logger.warning(f"Inner sum for A_{j} reached the index cap; tail extrapolated "
                   f"({inner[-1]!r} -> {latest!r})")
    return latest


def condensed_term(cs: CondensedSeries, j: int):
    """
    Condensed term A_j, memoized.

    The inner sum stops when a weighted term falls below
    ``inner_rel_tol`` times the running inner sum, when it underflows to
    zero, or when the next index would exceed ``max_index`` (the tail is then
    extrapolated, or ConvergenceError is raised).

    Args:
        cs: condensed series
        j: nonnegative outer index

    Returns:
        A_j >= 0
    """
    if j < 0:
        raise DomainError(f"condensed index must be nonnegative, got {j}")
    if j in cs.memo:
        return cs.memo[j]

    m = j + 1
    total = 0.0
    inner = []
    i = 0
    while True:
        index = (m << i) - 1
        if index > cs.max_index:
            total = _extrapolate_tail(inner, j)
            break
        weighted = cs.evaluate(index) * (1 << i)
        total = total + weighted
        inner.append(total)
        # a leading zero term (a(0) = 0) must not end the inner sum
        if total > 0 and weighted <= cs.inner_rel_tol * total:
            break
        i += 1

    logger.debug(f"A_{j} = {total!r} from {len(inner)} inner terms")
    cs.memo[j] = total
    return total


def iter_condensed_partial_sums(cs: CondensedSeries) -> Iterator[float]:
    """Yield the alternating partial sums S_0, S_1, ... one condensed term at a time."""
    total = 0.0
    for j in count():
        term = condensed_term(cs, j)
        total = total + term if j % 2 == 0 else total - term
        yield total


def condensed_partial_sums(cs: CondensedSeries, n: int) -> List[float]:
    """Alternating partial sums S_m = A_0 - A_1 + ... +/- A_m for m = 0..n."""
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n}")
    return list(islice(iter_condensed_partial_sums(cs), n + 1))
