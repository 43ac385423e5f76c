"""Sequence transformations: partial sums, the delta transformation and Wynn's epsilon algorithm.

Everything here works on plain real arithmetic (field operations, comparison
and ``abs``), so float, ``fractions.Fraction`` and ``mpmath.mpf`` sequences
are all accepted. Functions are pure; convergence decisions belong to the
drivers in :mod:`cnct_accel.cnct`.
"""

import logging
import math
from typing import Callable, List, Optional, Sequence

from .utils import BreakdownError, DomainError

logger = logging.getLogger(__name__)

TermOracle = Callable[[int], float]
RealSequence = Sequence[float]

# Denominators smaller than this (in binary64) flag a breakdown
BREAKDOWN_FLOOR = 1e-280

EMPTY = 'empty'
HEALTHY = 'healthy'
TERMINATED = 'terminated'
BREAKDOWN = 'breakdown'


def is_finite(x):
    """Finiteness test that also accepts exact real types."""
    try:
        return math.isfinite(x)
    except OverflowError:
        # exact values beyond the binary64 range are still finite
        return True


def check_sequence(s, minimum):
    """Validate a sequence of partial sums before transforming it."""
    if len(s) < minimum:
        raise DomainError(f"at least {minimum} partial sums are required, got {len(s)}")
    for index, value in enumerate(s):
        if not is_finite(value):
            raise DomainError(f"partial sum s_{index} is not finite: {value!r}")


def partial_sums(oracle: TermOracle, n_max: int) -> List[float]:
    """
    Accumulate s_n = a(0) + ... + a(n) for n = 0..n_max.

    Args:
        oracle: term oracle, index -> term value
        n_max: last index to include

    Returns:
        list of n_max + 1 partial sums
    """
    if n_max < 0:
        raise DomainError(f"n_max must be nonnegative, got {n_max}")

    sums = []
    total = 0
    for k in range(n_max + 1):
        term = oracle(k)
        if not is_finite(term):
            raise DomainError(f"term a({k}) is not finite: {term!r}")
        total = total + term
        sums.append(total)
    return sums


def _step(upper, lower, n, k, beta):
    """One delta recursion step X_{k+1}^{(n)} from X_k^{(n+1)} and X_k^{(n)}."""
    if k == 0:
        # the Pochhammer ratio is identically 1 in the first column
        return upper - lower
    a = beta + n + k
    c = beta + n + 2 * k
    return upper - (a * (a - 1)) * lower / (c * (c - 1))


def _is_breakdown(numerator, denominator):
    return (not is_finite(numerator) or not is_finite(denominator)
            or abs(denominator) < BREAKDOWN_FLOOR)


class DeltaAccelerator:
    """
    Online delta transformation, fed one partial sum at a time.

    After s_0..s_{N+1} have been pushed, ``estimate`` equals
    ``delta_estimate(s[:N + 2], beta)``. ``num`` and ``den`` hold the current
    moving diagonal, one entry per known remainder estimate omega_n.
    """

    def __init__(self, beta=1):
        if not beta > 0:
            raise DomainError(f"beta must be positive, got {beta!r}")
        self.beta = beta
        self.num = []
        self.den = []
        self.count = 0
        self.estimates = []
        self.state = EMPTY
        self.frozen = None
        self._first = None
        self._pending = None

    @property
    def estimate(self) -> Optional[float]:
        """Current best diagonal estimate, or None before two sums are known."""
        if self.state == BREAKDOWN:
            return self.frozen
        return self.estimates[-1] if self.estimates else None

    @property
    def order(self):
        return len(self.estimates) - 1

    @property
    def last_estimates(self):
        return tuple(self.estimates[-2:])

    @property
    def broken(self):
        return self.state == BREAKDOWN

    def _break_down(self, reason):
        self.frozen = self.estimates[-1] if self.estimates and self.state == HEALTHY else self.frozen
        self.state = BREAKDOWN
        logger.warning(f"Delta transformation breakdown after {self.count} partial sums: {reason}")

    def push(self, s_new):
        """
        Consume one more partial sum.

        Args:
            s_new: next partial sum (finite)

        Returns:
            the current estimate (None while only one sum is known)
        """
        if not is_finite(s_new):
            raise DomainError(f"partial sum is not finite: {s_new!r}")
        if self.state == BREAKDOWN:
            return self.frozen

        self.count += 1
        if self._pending is None:
            self._first = s_new
            self._pending = s_new
            self.state = HEALTHY
            return None

        s_prev, self._pending = self._pending, s_new
        omega = s_new - s_prev

        if self.state == TERMINATED:
            if omega != 0:
                self._break_down("nonzero term after a terminated run")
                return self.frozen
            self.estimates.append(self.estimates[-1])
            return self.estimate

        if omega == 0:
            # the series has terminated: s_prev is its exact sum
            self.frozen = self.estimates[-1] if self.estimates else None
            self.state = TERMINATED
            self.estimates.append(s_prev)
            logger.debug(f"Terminated series detected at partial sum {self.count - 2}")
            return self.estimate

        n = len(self.num)
        self.num.append(s_prev / omega)
        self.den.append(1 / omega)
        for j in range(n - 1, -1, -1):
            k = n - 1 - j
            self.num[j] = _step(self.num[j + 1], self.num[j], j, k, self.beta)
            self.den[j] = _step(self.den[j + 1], self.den[j], j, k, self.beta)

        if _is_breakdown(self.num[0], self.den[0]):
            self._break_down(f"|D| = {abs(self.den[0])!r} at order {n}")
            return self.frozen

        self.estimates.append(self._first if n == 0 else self.num[0] / self.den[0])
        return self.estimate


def accelerator_push(acc: DeltaAccelerator, s_new) -> DeltaAccelerator:
    """Push one partial sum into ``acc`` and return it."""
    acc.push(s_new)
    return acc


def delta_table(s: RealSequence, beta=1) -> List[float]:
    """
    Diagonal delta estimates of every order reachable from ``s``.

    Uses remainder estimates omega_j = s_{j+1} - s_j. Column k of the table is
    built from column k - 1 with the same recursion step as DeltaAccelerator,
    so both evaluations agree bit for bit.

    Args:
        s: partial sums s_0..s_{N+1}
        beta: shift parameter, beta > 0

    Returns:
        list [delta_0, ..., delta_N] of diagonal estimates (order 0 is s_0)

    Raises:
        BreakdownError: a diagonal denominator fell below BREAKDOWN_FLOOR,
            or a zero omega is followed by nonzero ones
    """
    check_sequence(s, 2)
    if not beta > 0:
        raise DomainError(f"beta must be positive, got {beta!r}")

    omegas = [s[j + 1] - s[j] for j in range(len(s) - 1)]
    zero = next((j for j, omega in enumerate(omegas) if omega == 0), None)
    usable = omegas if zero is None else omegas[:zero]

    num = [s[j] / omega for j, omega in enumerate(usable)]
    den = [1 / omega for omega in usable]
    estimates = []
    for k in range(len(usable)):
        if k > 0:
            num = [_step(num[n + 1], num[n], n, k - 1, beta) for n in range(len(num) - 1)]
            den = [_step(den[n + 1], den[n], n, k - 1, beta) for n in range(len(den) - 1)]
        if _is_breakdown(num[0], den[0]):
            last = estimates[-1] if estimates else None
            raise BreakdownError(f"delta denominator {abs(den[0])!r} below floor at order {k}", last)
        estimates.append(s[0] if k == 0 else num[0] / den[0])

    if zero is not None:
        if any(omega != 0 for omega in omegas[zero:]):
            last = estimates[-1] if estimates else None
            raise BreakdownError(f"zero remainder estimate at index {zero} inside the sequence", last)
        estimates.extend([s[zero]] * (len(omegas) - zero))

    return estimates


def delta_estimate(s: RealSequence, beta=1) -> float:
    """Order-N diagonal delta estimate from N + 2 partial sums."""
    return delta_table(s, beta)[-1]


class EpsilonTable:
    """
    Triangular epsilon table. Only even columns are estimates; odd columns
    are auxiliary.
    """

    def __init__(self, columns, degenerate=False):
        self.columns = columns
        self.max_even_column = (len(columns) - 1) // 2 * 2
        self.degenerate = degenerate

    @property
    def estimate(self):
        return self.columns[self.max_even_column][-1]

    def even_estimates(self):
        """Last entry of every completed even column, lowest column first."""
        return [self.columns[k][-1] for k in range(0, self.max_even_column + 1, 2)]


def epsilon_table(s: RealSequence) -> EpsilonTable:
    """
    Run Wynn's epsilon algorithm over ``s``.

    Column growth stops at the first vanishing difference; the table then
    ends at the last fully computed column.
    """
    check_sequence(s, 3)

    previous = [0] * (len(s) + 1)
    current = list(s)
    columns = [current]
    degenerate = False
    while len(current) >= 2:
        following = []
        for n in range(len(current) - 1):
            diff = current[n + 1] - current[n]
            if diff == 0 or abs(diff) < BREAKDOWN_FLOOR:
                degenerate = True
                break
            value = previous[n + 1] + 1 / diff
            if not is_finite(value):
                degenerate = True
                break
            following.append(value)
        if degenerate:
            logger.debug(f"Epsilon column {len(columns)} degenerate, stopping")
            break
        previous, current = current, following
        columns.append(current)

    return EpsilonTable(columns, degenerate)


def epsilon_estimate(s: RealSequence) -> float:
    """Highest even-column epsilon estimate reachable from ``s``."""
    return epsilon_table(s).estimate
