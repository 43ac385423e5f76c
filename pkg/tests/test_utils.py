"""Tests for shared helpers and exceptions"""

from unittest.mock import patch, MagicMock

import pytest

from cnct_accel.utils import (AccelError, BreakdownError, ConvergenceError, DomainError, check_memory_usage,
                              resolve_log_level)


def _process_with_rss(megabytes):
    process = MagicMock()
    process.memory_info.return_value.rss = megabytes * 1024 * 1024
    return process


class TestCheckMemoryUsage:
    """Test cases for check_memory_usage"""

    @patch('cnct_accel.utils.gc.collect')
    @patch('cnct_accel.utils.psutil.Process')
    def test_low_usage(self, mock_process, mock_collect):
        """Test small processes are only measured"""
        mock_process.return_value = _process_with_rss(100)

        assert check_memory_usage() == pytest.approx(100.0)
        mock_collect.assert_not_called()

    @patch('cnct_accel.utils.gc.collect')
    @patch('cnct_accel.utils.psutil.Process')
    def test_high_usage_collects(self, mock_process, mock_collect):
        """Test a collection is forced above the collect threshold"""
        mock_process.return_value = _process_with_rss(800)
        mock_collect.return_value = 0

        assert check_memory_usage() == pytest.approx(800.0)
        mock_collect.assert_called_once()


class TestExceptions:
    """Test cases for the exception hierarchy"""

    def test_domain_error_is_value_error(self):
        """Test DomainError can be caught as ValueError"""
        with pytest.raises(ValueError):
            raise DomainError('bad')

    def test_convergence_error_carries_best(self):
        """Test ConvergenceError keeps the best estimate"""
        error = ConvergenceError('budget', best=1.5)
        assert error.best == 1.5
        assert isinstance(error, AccelError)

    def test_breakdown_error_carries_last_estimate(self):
        """Test BreakdownError keeps the last healthy estimate"""
        error = BreakdownError('zero denominator', last_estimate=0.7)
        assert error.last_estimate == 0.7
        assert isinstance(error, ArithmeticError)

    def test_convergence_error_carries_terms_used(self):
        """Test ConvergenceError keeps the evaluations spent"""
        assert ConvergenceError('budget', best=1.5, terms_used=50).terms_used == 50
        assert ConvergenceError('budget').terms_used is None


class TestResolveLogLevel:
    """Test cases for resolve_log_level"""

    @pytest.mark.parametrize("name,expected", [
        ('debug', 'DEBUG'),
        ('Info', 'INFO'),
        ('WARNING', 'WARNING'),
        ('chatty', 'WARNING'),
        ('', 'WARNING'),
    ])
    def test_levels(self, name, expected):
        """Test unknown names fall back instead of raising"""
        assert resolve_log_level(name) == expected

    def test_custom_fallback(self):
        """Test the fallback can flag an unknown name"""
        assert resolve_log_level('verbose', fallback=None) is None
