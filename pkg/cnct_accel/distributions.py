"""The discrete Lerch distributional family.

P(X = k) = z^k (k + v)^(-s) / Phi(z, s, v) on the support k = 0, 1, 2, ...
Special cases: Zipf (z = 1, v = 1; the usual support {1, 2, ...} is this
family shifted by one), Zipf-Mandelbrot/Hurwitz (z = 1), geometric (s = 0).
"""

import logging
from dataclasses import dataclass

from .cnct import AccelResult, ToleranceSpec, cnct_sum, direct_sum
from .functions import LerchParams, lerch_phi
from .utils import ConvergenceError, DomainError, QUANTILE_SCAN_CAP

logger = logging.getLogger(__name__)

# moments use the CNCT above this z, plain summation below
MOMENT_CNCT_THRESHOLD = 0.5


@dataclass(frozen=True)
class LerchDistribution:
    params: LerchParams
    norm: float
    norm_err: float

    def weight(self, k):
        """Unnormalized mass z^k (k + v)^(-s)."""
        p = self.params
        return float(p.z) ** k * (k + float(p.v)) ** -float(p.s)


def dist_new(p: LerchParams, tol: ToleranceSpec = None) -> LerchDistribution:
    """
    Build a Lerch distribution, normalizing with Phi(z, s, v).

    Args:
        p: LerchParams with 0 <= z <= 1 (z = 0 is the point mass at 0)
        tol: ToleranceSpec for the normalizer

    Raises:
        DomainError: z < 0
        ConvergenceError: the normalizer did not converge
    """
    if p.z < 0:
        raise DomainError(f"probabilities need z >= 0, got {p.z!r}")

    result = lerch_phi(p, tol)
    if not result.converged:
        raise ConvergenceError(f"normalizer Phi({p.z}, {p.s}, {p.v}) did not converge",
                               result.value, result.terms_used)
    if not 0 < result.value < float('inf'):
        raise DomainError(f"normalizer Phi({p.z}, {p.s}, {p.v}) = {result.value!r} is not positive")

    logger.debug(f"Lerch distribution ({p.z}, {p.s}, {p.v}) normalized by {result.value!r}")
    return LerchDistribution(p, result.value, result.error_estimate)


def pmf(d: LerchDistribution, k: int) -> float:
    """P(X = k)."""
    if k < 0:
        raise DomainError(f"k must be nonnegative, got {k}")
    return min(1.0, max(0.0, d.weight(k) / d.norm))


def _running_cdf(d):
    total = 0.0
    k = 0
    while True:
        total += d.weight(k) / d.norm
        yield k, total
        k += 1


def cdf(d: LerchDistribution, k: int) -> float:
    """P(X <= k), accumulated in increasing order and clamped to [0, 1]."""
    if k < 0:
        raise DomainError(f"k must be nonnegative, got {k}")
    for j, total in _running_cdf(d):
        if j == k:
            return min(1.0, max(0.0, total))


def sf(d: LerchDistribution, k: int) -> float:
    """P(X > k)."""
    return min(1.0, max(0.0, 1.0 - cdf(d, k)))


def quantile(d: LerchDistribution, p: float, scan_cap: int = None) -> int:
    """
    Smallest k with cdf(k) >= p, by sequential scan.

    Raises:
        ConvergenceError: the scan cap is exceeded, or the running sum
            saturates below p (heavy tail or p beyond the normalizer's accuracy)
    """
    if not 0 <= p < 1:
        raise DomainError(f"p must lie in [0, 1), got {p!r}")
    if scan_cap is None:
        scan_cap = QUANTILE_SCAN_CAP

    previous = -1.0
    for k, total in _running_cdf(d):
        if total >= p:
            return k
        if total <= previous:
            logger.warning(f"Quantile scan saturated at cdf {total!r} < p = {p!r} (k = {k})")
            raise ConvergenceError(f"cdf saturates at {total!r} below p = {p!r}; tail too heavy", k)
        if k >= scan_cap:
            logger.warning(f"Quantile scan reached cap {scan_cap} at cdf {total!r}")
            raise ConvergenceError(f"quantile scan exceeded {scan_cap} steps; tail too heavy at p = {p!r}", k)
        previous = total


def moment(d: LerchDistribution, r: int, tol: ToleranceSpec = None) -> AccelResult:
    """
    Raw moment E[X^r] = sum_k k^r z^k (k + v)^(-s) / Phi.

    Uses the CNCT when z > 0.5, plain summation otherwise. The error estimate
    combines the summation error with the normalizer's.
    """
    p = d.params
    if r < 1:
        raise DomainError(f"moment order must be a positive integer, got {r!r}")
    if p.z == 1 and not p.s > r + 1:
        raise DomainError(f"E[X^{r}] does not exist for s = {p.s!r} (needs s > {r + 1})")

    def term(k):
        return float(k) ** r * d.weight(k)

    if p.z > MOMENT_CNCT_THRESHOLD:
        result = cnct_sum(term, tol)
    else:
        result = direct_sum(term, tol)

    value = result.value / d.norm
    error = result.error_estimate / d.norm + abs(value) * d.norm_err / d.norm
    return AccelResult(value, error, result.order, result.terms_used, result.converged, result.method)


def mean(d: LerchDistribution, tol: ToleranceSpec = None) -> AccelResult:
    return moment(d, 1, tol)


def variance(d: LerchDistribution, tol: ToleranceSpec = None) -> AccelResult:
    """Var X = E[X^2] - E[X]^2."""
    first = moment(d, 1, tol)
    second = moment(d, 2, tol)
    value = second.value - first.value ** 2
    error = second.error_estimate + 2 * abs(first.value) * first.error_estimate
    return AccelResult(value, error, max(first.order, second.order), first.terms_used + second.terms_used,
                       first.converged and second.converged, second.method)
