"""Special functions evaluated with the summation drivers.

Lerch's transcendent Phi(z, s, v) = sum_{n>=0} z^n / (n + v)^s for real
arguments, and its special cases (Riemann and Hurwitz zeta, polylogarithm),
plus harmonic numbers and the quadratic Euler sum
sum_k H_k^2 / k^2 = 17 pi^4 / 360.
"""

import logging
import math
import threading
from dataclasses import dataclass

from .cnct import AccelResult, ToleranceSpec, cnct_sum, delta_sum, direct_sum
from .kernel import TermOracle, is_finite
from .utils import DomainError, LERCH_DISPATCH_THRESHOLD

logger = logging.getLogger(__name__)

# Euler-Mascheroni constant, 30 significant digits
EULER_GAMMA = 0.577215664901532860606512090082
HARMONIC_CROSSOVER = 10_000
EULER_SUM_CLOSED_FORM = 17 * math.pi ** 4 / 360


@dataclass(frozen=True)
class LerchParams:
    """Arguments (z, s, v) of Phi with -1 < z <= 1, v > 0, and s > 1 when z = 1."""
    z: float
    s: float
    v: float

    def __post_init__(self):
        for name in ('z', 's', 'v'):
            if not is_finite(getattr(self, name)):
                raise DomainError(f"{name} must be finite, got {getattr(self, name)!r}")
        if not self.v > 0:
            raise DomainError(f"v must be positive, got {self.v!r}")
        if not -1 < self.z <= 1:
            raise DomainError(f"z must lie in (-1, 1], got {self.z!r}")
        if self.z == 1 and not self.s > 1:
            raise DomainError(f"the series diverges at z = 1 unless s > 1, got s = {self.s!r}")


def lerch_terms(z, s, v) -> TermOracle:
    """Term oracle k -> z^k / (k + v)^s."""
    z, s, v = float(z), float(s), float(v)

    def term(k):
        return z ** k / (k + v) ** s

    return term


def polylog_terms(s, z) -> TermOracle:
    """Term oracle k -> z^(k+1) / (k+1)^s of Li_s(z)."""
    z, s = float(z), float(s)

    def term(k):
        n = k + 1
        return z ** n / float(n) ** s

    return term


def lerch_phi(p: LerchParams, tol: ToleranceSpec = None, threshold=None) -> AccelResult:
    """
    Evaluate Phi(z, s, v).

    Dispatch on z: the CNCT for z > threshold (nonnegative, slowly convergent
    terms), the delta transformation on the raw partial sums for
    z < -threshold (alternating terms), and plain summation in between.

    Args:
        p: LerchParams
        tol: ToleranceSpec
        threshold: dispatch split, default LERCH_DISPATCH_THRESHOLD

    Returns:
        AccelResult
    """
    if threshold is None:
        threshold = LERCH_DISPATCH_THRESHOLD
    oracle = lerch_terms(p.z, p.s, p.v)

    if p.z > threshold:
        logger.debug(f"Phi({p.z}, {p.s}, {p.v}): CNCT")
        return cnct_sum(oracle, tol)
    if p.z < -threshold:
        logger.debug(f"Phi({p.z}, {p.s}, {p.v}): direct delta transformation")
        return delta_sum(oracle, tol)
    logger.debug(f"Phi({p.z}, {p.s}, {p.v}): direct summation")
    return direct_sum(oracle, tol)


def riemann_zeta(s, tol: ToleranceSpec = None) -> AccelResult:
    """zeta(s) for real s > 1 via the CNCT."""
    if not s > 1:
        raise DomainError(f"zeta(s) needs s > 1, got {s!r}")
    return cnct_sum(lerch_terms(1.0, s, 1.0), tol)


def hurwitz_zeta(s, v, tol: ToleranceSpec = None) -> AccelResult:
    """Generalized zeta(s, v) = Phi(1, s, v)."""
    return lerch_phi(LerchParams(1.0, s, v), tol)


def polylog(s, z, tol: ToleranceSpec = None) -> AccelResult:
    """Li_s(z) = z * Phi(z, s, 1) for -1 < z <= 1."""
    return lerch_phi(LerchParams(z, s, 1.0), tol).scaled(z)


_harmonic_cache = None
_harmonic_lock = threading.Lock()


def _harmonic_table():
    """Exact harmonic numbers H_0..H_HARMONIC_CROSSOVER, built once."""
    global _harmonic_cache

    if _harmonic_cache is None:
        with _harmonic_lock:
            if _harmonic_cache is None:
                table = [0.0] * (HARMONIC_CROSSOVER + 1)
                total = 0.0
                compensation = 0.0
                for k in range(1, HARMONIC_CROSSOVER + 1):
                    # compensated summation keeps the table within an ulp
                    y = 1.0 / k - compensation
                    t = total + y
                    compensation = (t - total) - y
                    total = t
                    table[k] = total
                _harmonic_cache = table
                logger.debug(f"Harmonic number cache built up to {HARMONIC_CROSSOVER}")
    return _harmonic_cache


def harmonic_number(k: int) -> float:
    """
    H_k = 1 + 1/2 + ... + 1/k.

    Cached exact sums up to HARMONIC_CROSSOVER, the asymptotic expansion
    ln k + gamma + 1/(2k) - 1/(12k^2) + 1/(120k^4) beyond.
    """
    if k < 1:
        raise DomainError(f"harmonic numbers are defined for k >= 1, got {k!r}")
    if k <= HARMONIC_CROSSOVER:
        return _harmonic_table()[k]

    x = float(k)
    x2 = x * x
    return math.log(k) + EULER_GAMMA + 1 / (2 * x) - 1 / (12 * x2) + 1 / (120 * x2 * x2)


def euler_sum_terms() -> TermOracle:
    """Term oracle k -> H_{k+1}^2 / (k+1)^2."""

    def term(k):
        n = k + 1
        return (harmonic_number(n) / float(n)) ** 2

    return term


def euler_harmonic_sum(tol: ToleranceSpec = None) -> AccelResult:
    """sum_{k>=1} H_k^2 / k^2 via the CNCT; the closed form is 17 pi^4 / 360."""
    return cnct_sum(euler_sum_terms(), tol)


def euler_harmonic_sum_direct(tol: ToleranceSpec = None) -> AccelResult:
    """Term-by-term baseline for the Euler sum."""
    return direct_sum(euler_sum_terms(), tol)
