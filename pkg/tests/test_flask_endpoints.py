"""Tests for the HTTP endpoints"""

import math
from unittest.mock import patch

import pytest

from cnct_accel.flask_endpoints import app, tolerance_from_query
from cnct_accel.utils import DomainError


@pytest.fixture
def client(stats):
    """Fixture providing a test client with fresh counters"""
    app.config['TESTING'] = True
    with patch('cnct_accel.flask_endpoints.stats', stats):
        with app.test_client() as test_client:
            yield test_client


class TestEvalRoute:
    """Test cases for /eval/<function>"""

    def test_zeta(self, client, stats):
        """Test GET /eval/zeta?args=2"""
        response = client.get('/eval/zeta?args=2')
        data = response.get_json()

        assert response.status_code == 200
        assert data['value'] == pytest.approx(math.pi ** 2 / 6, rel=1e-14)
        assert data['converged'] is True
        assert stats['total_requests'] == 1
        assert stats['successful_evaluations'] == 1

    def test_lerch_with_tolerance(self, client):
        """Test query tolerance overrides"""
        response = client.get('/eval/lerch?args=0.9,2,1&tol=1e-10&max_order=30')
        assert response.status_code == 200
        assert response.get_json()['method'] == 'cnct'

    def test_unknown_function(self, client, stats):
        """Test an unknown function is a client error"""
        response = client.get('/eval/gamma?args=2')

        assert response.status_code == 400
        assert 'unknown function' in response.get_json()['error']
        assert stats['failed_evaluations'] == 1

    def test_bad_args(self, client):
        """Test non-numeric args are rejected"""
        response = client.get('/eval/zeta?args=two')
        assert response.status_code == 400

    def test_not_converged_counted(self, client, stats):
        """Test non-converged results are returned and counted"""
        response = client.get('/eval/zeta?args=2&max_terms=100')

        assert response.status_code == 200
        assert response.get_json()['converged'] is False
        assert stats['non_converged'] == 1

    @patch('cnct_accel.flask_endpoints.evaluate_function')
    def test_internal_error(self, mock_evaluate, client):
        """Test unexpected failures return 500"""
        mock_evaluate.side_effect = RuntimeError('boom')
        response = client.get('/eval/zeta?args=2')

        assert response.status_code == 500
        assert response.get_json()['error'] == 'Internal server error'


class TestTableRoute:
    """Test cases for /table/<function>"""

    def test_table(self, client):
        """Test a complete convergence table"""
        response = client.get('/table/zeta?args=2&orders=5')
        data = response.get_json()

        assert response.status_code == 200
        assert data['complete'] is True
        assert [row['n'] for row in data['rows']] == list(range(6))
        assert data['rows'][0]['delta'] == pytest.approx(2.0, rel=1e-15)

    def test_scaled_table(self, client):
        """Test the Li_3(0.99999)/10 row 0"""
        response = client.get('/table/polylog?args=3,0.99999&orders=0&scale=0.1')
        assert response.get_json()['rows'][0]['delta'] == pytest.approx(0.133331333415539, rel=1e-13)

    def test_negative_orders(self, client):
        """Test orders must be nonnegative"""
        assert client.get('/table/zeta?args=2&orders=-1').status_code == 400


class TestDistRoute:
    """Test cases for /dist/<query>"""

    def test_pmf(self, client):
        """Test the Zipf pmf at 0"""
        response = client.get('/dist/pmf?z=1&s=2&v=1&k=0')
        assert response.status_code == 200
        assert response.get_json()['value'] == pytest.approx(6 / math.pi ** 2, rel=1e-14)

    def test_missing_parameters(self, client):
        """Test z, s and v are required"""
        assert client.get('/dist/pmf?z=1&k=0').status_code == 400

    def test_unknown_query(self, client):
        """Test unknown queries are client errors"""
        assert client.get('/dist/median?z=0.5&s=0&v=1').status_code == 400


class TestAccelRoute:
    """Test cases for POST /accel"""

    def test_delta(self, client, alternating_harmonic_sums):
        """Test delta acceleration of posted partial sums"""
        response = client.post('/accel', json={'sums': alternating_harmonic_sums})
        data = response.get_json()

        assert response.status_code == 200
        assert abs(data['value'] - math.log(2)) < 1e-10
        assert data['method'] == 'delta'

    def test_epsilon(self, client):
        """Test the epsilon method"""
        response = client.post('/accel', json={'sums': [1.0, 1.5, 1.75], 'method': 'epsilon'})
        assert response.get_json()['value'] == 2.0

    @pytest.mark.parametrize("payload", [
        None,
        {},
        {'sums': [1.0, 2.0]},
        {'sums': ['a', 'b', 'c']},
        {'sums': [1.0, 1.5, 1.75], 'method': 'levin'},
    ])
    def test_invalid_payload(self, client, payload):
        """Test malformed requests are rejected"""
        response = client.post('/accel', json=payload)
        assert response.status_code == 400


class TestServiceRoutes:
    """Test cases for /health and /stats"""

    def test_health(self, client):
        """Test the health check lists the functions"""
        response = client.get('/health')
        data = response.get_json()

        assert response.status_code == 200
        assert data['status'] == 'healthy'
        assert 'zeta' in data['functions']

    @patch('cnct_accel.flask_endpoints.check_memory_usage')
    def test_stats(self, mock_memory, client, stats):
        """Test the stats endpoint reports counters and memory"""
        mock_memory.return_value = 123.45
        client.get('/eval/zeta?args=2')
        response = client.get('/stats')
        data = response.get_json()

        assert response.status_code == 200
        assert data['memory_mb'] == 123.5
        assert data['stats']['total_requests'] == 1
        assert data['service'] == 'cnct_accel'


class TestToleranceFromQuery:
    """Test cases for tolerance_from_query"""

    def test_defaults(self):
        """Test missing parameters keep the defaults"""
        tol = tolerance_from_query({})
        assert tol.rel_tol > 0

    def test_overrides(self):
        """Test parameters are parsed and validated"""
        tol = tolerance_from_query({'tol': '1e-8', 'max_terms': '1000'})
        assert tol.rel_tol == 1e-8
        assert tol.max_terms == 1000

    def test_invalid(self):
        """Test unparsable values are domain errors"""
        with pytest.raises(DomainError):
            tolerance_from_query({'max_order': 'many'})
