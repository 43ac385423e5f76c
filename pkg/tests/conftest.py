"""Shared test fixtures and configuration"""

import pytest
import sys
from pathlib import Path

# Add the parent directory to the path so imports work
sys.path.insert(0, str(Path(__file__).parent.parent))

from cnct_accel.cnct import ToleranceSpec
from cnct_accel.condense import CountingOracle


@pytest.fixture
def stats():
    """Fixture providing a fresh stats dictionary"""
    return {
        'total_requests': 0,
        'successful_evaluations': 0,
        'failed_evaluations': 0,
        'non_converged': 0
    }


@pytest.fixture
def tight_tol():
    """Fixture providing the default tolerance with explicit values"""
    return ToleranceSpec(rel_tol=1e-14, abs_floor=1e-300, max_order=50, max_terms=10_000_000)


@pytest.fixture
def zeta2_terms():
    """Fixture providing the terms 1/(k+1)^2"""
    return lambda k: 1.0 / float(k + 1) ** 2


@pytest.fixture
def counting():
    """Fixture wrapping an oracle in a call counter"""
    return CountingOracle


@pytest.fixture
def alternating_harmonic_sums():
    """Fixture providing s_0..s_11 of sum (-1)^k/(k+1)"""
    sums = []
    total = 0.0
    for k in range(12):
        total += (-1) ** k / (k + 1)
        sums.append(total)
    return sums
